#include "vortex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vortex {

Json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json diagnostics_json(const DiagnosticsRecord& d) {
  Json j;
  j["sup_log_f"] = json_number(d.sup_log_f);
  j["l2_log_f"] = json_number(d.l2_log_f);
  j["apriori_bound"] = json_number(d.apriori_bound);
  j["apriori_margin"] = json_number(d.apriori_margin);
  j["inequality_margin"] = json_number(d.inequality_margin);
  j["energy_gap"] = json_number(d.energy_gap);
  j["energy_scale"] = json_number(d.energy_scale);
  j["cauchy_increment"] = json_number(d.cauchy_increment);
  j["monotonicity"] = json_number(d.monotonicity);
  j["newton_iterations"] = d.newton_iterations;
  j["min_ritz"] = json_number(d.min_ritz);
  return j;
}

Json solve_report_json(const SolveReport& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["cause"] = to_string(r.cause);
  j["message"] = r.message;
  j["final_residual"] = json_number(r.final_residual);
  j["final_sup_log_f"] = json_number(r.final_sup_log_f);
  j["eps_reached"] = json_number(r.eps_reached);
  j["max_sup_log_f"] = json_number(r.max_sup_log_f);
  j["max_l2_log_f"] = json_number(r.max_l2_log_f);
  j["newton_total"] = r.newton_total;
  j["steps"] = r.trace.size();
  j["flagged"] = r.flagged;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

Json stability_json(const StabilityReport& s) {
  Json j;
  j["mu_max"] = json_number(s.mu_max);
  j["mu_min_phi"] = json_number(s.mu_min_phi);
  j["volume"] = s.volume;
  j["tau_window_low"] = json_number(s.window_low);
  j["tau_window_high"] = json_number(s.window_high);
  j["window_empty"] = s.window_empty;
  if (s.verdict) j["verdict"] = to_string(*s.verdict);
  Json audited = Json::array();
  for (const SubSum& sub : s.audited) {
    Json e;
    e["members"] = sub.members;
    e["degree"] = sub.degree;
    e["slope"] = sub.slope;
    e["contains_phi"] = sub.contains_phi;
    audited.push_back(e);
  }
  j["audited_subsums"] = audited;
  j["scope"] = s.scope_note;
  return j;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  char buf[512];
  for (const TraceRow& row : trace) {
    const DiagnosticsRecord& d = row.diagnostics;
    std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%d\n", row.eps, row.residual_sup, d.sup_log_f,
                  d.apriori_margin, d.energy_gap, d.cauchy_increment, d.newton_iterations);
    out += buf;
  }
  return out;
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw std::invalid_argument("trace: unexpected header");
  std::vector<TraceRow> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::invalid_argument("trace line " + std::to_string(number) + ": expected 7 columns");
    try {
      TraceRow row;
      row.eps = std::stod(cells[0]);
      row.residual_sup = std::stod(cells[1]);
      row.diagnostics.sup_log_f = std::stod(cells[2]);
      row.diagnostics.apriori_margin = std::stod(cells[3]);
      row.diagnostics.energy_gap = std::stod(cells[4]);
      row.diagnostics.cauchy_increment = std::stod(cells[5]);
      row.diagnostics.newton_iterations = std::stoi(cells[6]);
      out.push_back(row);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("trace line " + std::to_string(number) + ": bad number");
    }
  }
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string convergence_svg(const std::vector<TraceRow>& trace, const std::string& title) {
  const double w = 640, h = 420, left = 70, right = 20, top = 40, bottom = 50;
  std::vector<double> xs, res, sup;
  for (const TraceRow& row : trace) {
    if (!(row.eps > 0.0)) continue;
    xs.push_back(std::log10(row.eps));
    res.push_back(std::log10(std::max(row.residual_sup, 1e-18)));
    sup.push_back(std::log10(std::max(row.diagnostics.sup_log_f, 1e-18)));
  }
  double x0 = -3, x1 = 0, y0 = -16, y1 = 2;
  if (!xs.empty()) {
    x0 = std::floor(*std::min_element(xs.begin(), xs.end()));
    x1 = std::max(std::ceil(*std::max_element(xs.begin(), xs.end())), x0 + 1);
    double lo = std::min(*std::min_element(res.begin(), res.end()), *std::min_element(sup.begin(), sup.end()));
    double hi = std::max(*std::max_element(res.begin(), res.end()), *std::max_element(sup.begin(), sup.end()));
    y0 = std::floor(lo);
    y1 = std::max(std::ceil(hi), y0 + 1);
  }
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\">" << title << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\"" << h - top - bottom
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int ystep = std::max(1, static_cast<int>((y1 - y0) / 8));
  for (int d = static_cast<int>(x0); d <= static_cast<int>(x1); ++d)
    s << "<text x=\"" << fmt(px(d)) << "\" y=\"" << h - bottom + 18 << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); d += ystep)
    s << "<text x=\"" << left - 6 << "\" y=\"" << fmt(py(d) + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">eps</text>\n";
  auto line = [&](const std::vector<double>& ys, const char* color) {
    if (ys.empty()) return;
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) s << fmt(px(xs[i])) << "," << fmt(py(ys[i])) << " ";
    s << "\"/>\n";
  };
  line(res, "#c0392b");
  line(sup, "#2c6fbb");
  s << "<text x=\"" << left + 10 << "\" y=\"" << top + 16 << "\" fill=\"#c0392b\">residual sup</text>\n";
  s << "<text x=\"" << left + 10 << "\" y=\"" << top + 32 << "\" fill=\"#2c6fbb\">sup |log f|</text>\n";
  s << "</svg>\n";
  return s.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace vortex
