#include "vortex/field.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace vortex {

MatrixField::MatrixField(std::size_t points, int rank)
    : points_(points), rank_(rank), data_(points * static_cast<std::size_t>(rank) * rank, Complex(0.0)) {
  if (rank <= 0) throw std::invalid_argument("MatrixField: rank must be positive");
}

MatrixField MatrixField::identity(std::size_t points, int rank) {
  MatrixField f(points, rank);
  for (std::size_t p = 0; p < points; ++p) f.at(p).setIdentity();
  return f;
}

MatrixField MatrixField::constant(std::size_t points, const CMat& value) {
  MatrixField f(points, static_cast<int>(value.rows()));
  for (std::size_t p = 0; p < points; ++p) f.at(p) = value;
  return f;
}

MatrixField MatrixField::from_scalar(const ComplexField& values) {
  MatrixField f(values.size(), 1);
  std::copy(values.begin(), values.end(), f.data_.begin());
  return f;
}

MatrixField MatrixField::from_real(const RealField& values) {
  MatrixField f(values.size(), 1);
  for (std::size_t p = 0; p < values.size(); ++p) f.data_[p] = values[p];
  return f;
}

ComplexField MatrixField::entry(int row, int col) const {
  ComplexField out(points_);
  const std::size_t offset = static_cast<std::size_t>(col) * rank_ + row;
  for (std::size_t p = 0; p < points_; ++p) out[p] = data_[p * fiber_size() + offset];
  return out;
}

void MatrixField::set_entry(int row, int col, const ComplexField& values) {
  assert(values.size() == points_);
  const std::size_t offset = static_cast<std::size_t>(col) * rank_ + row;
  for (std::size_t p = 0; p < points_; ++p) data_[p * fiber_size() + offset] = values[p];
}

MatrixField MatrixField::map(const std::function<CMat(const CMat&)>& fn) const {
  MatrixField out(points_, rank_);
  for (std::size_t p = 0; p < points_; ++p) out.at(p) = fn(at(p));
  return out;
}

MatrixField MatrixField::zip(const MatrixField& a, const MatrixField& b,
                             const std::function<CMat(const CMat&, const CMat&)>& fn) {
  if (a.points_ != b.points_ || a.rank_ != b.rank_) throw std::invalid_argument("MatrixField::zip: shape mismatch");
  MatrixField out(a.points_, a.rank_);
  for (std::size_t p = 0; p < a.points_; ++p) out.at(p) = fn(a.at(p), b.at(p));
  return out;
}

MatrixField& MatrixField::operator+=(const MatrixField& other) {
  if (other.data_.size() != data_.size()) throw std::invalid_argument("MatrixField: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

MatrixField& MatrixField::operator-=(const MatrixField& other) {
  if (other.data_.size() != data_.size()) throw std::invalid_argument("MatrixField: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

MatrixField& MatrixField::operator*=(double scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

void MatrixField::axpy(double alpha, const MatrixField& x) {
  if (x.data_.size() != data_.size()) throw std::invalid_argument("MatrixField: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * x.data_[i];
}

double MatrixField::dot(const MatrixField& other) const {
  if (other.data_.size() != data_.size()) throw std::invalid_argument("MatrixField: shape mismatch");
  // Re tr(A B^*) = Re sum_ij A_ij conj(B_ij)
  double sum = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) sum += (data_[i] * std::conj(other.data_[i])).real();
  return sum;
}

double MatrixField::sup_norm() const {
  double best = 0.0;
  for (std::size_t p = 0; p < points_; ++p) best = std::max(best, at(p).norm());
  return best;
}

double MatrixField::hermitian_defect() const {
  double best = 0.0;
  for (std::size_t p = 0; p < points_; ++p) best = std::max(best, fiber::hermitian_defect(at(p)));
  return best;
}

ComplexField MatrixField::trace() const {
  ComplexField out(points_);
  for (std::size_t p = 0; p < points_; ++p) out[p] = at(p).trace();
  return out;
}

MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
MatrixField operator*(double scale, MatrixField a) { return a *= scale; }

SectionField::SectionField(std::size_t points, int rank)
    : points_(points), rank_(rank), data_(points * static_cast<std::size_t>(rank), Complex(0.0)) {
  if (rank <= 0) throw std::invalid_argument("SectionField: rank must be positive");
}

SectionField SectionField::constant(std::size_t points, const CVec& value) {
  SectionField s(points, static_cast<int>(value.size()));
  for (std::size_t p = 0; p < points; ++p) s.at(p) = value;
  return s;
}

ComplexField SectionField::component(int i) const {
  ComplexField out(points_);
  for (std::size_t p = 0; p < points_; ++p) out[p] = data_[p * rank_ + i];
  return out;
}

void SectionField::set_component(int i, const ComplexField& values) {
  for (std::size_t p = 0; p < points_; ++p) data_[p * rank_ + i] = values[p];
}

double SectionField::sup_norm() const {
  double best = 0.0;
  for (std::size_t p = 0; p < points_; ++p) best = std::max(best, at(p).norm());
  return best;
}

}  // namespace vortex
