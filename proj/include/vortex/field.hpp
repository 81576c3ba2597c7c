// Grid-indexed carriers: complex scalar fields, r x r matrix fields and
// r-vector section fields. Matrix data is stored point-major with each
// fiber contiguous in column-major order so it can be viewed as an
// Eigen matrix without copying.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "vortex/fiber.hpp"

namespace vortex {

using ComplexField = std::vector<Complex>;
using RealField = std::vector<double>;

class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(std::size_t points, int rank);

  static MatrixField zeros(std::size_t points, int rank) { return MatrixField(points, rank); }
  static MatrixField identity(std::size_t points, int rank);
  static MatrixField constant(std::size_t points, const CMat& value);
  /// Rank-1 field with the given scalar values on the diagonal.
  static MatrixField from_scalar(const ComplexField& values);
  static MatrixField from_real(const RealField& values);

  std::size_t points() const { return points_; }
  int rank() const { return rank_; }

  Eigen::Map<CMat> at(std::size_t p) { return {data_.data() + p * fiber_size(), rank_, rank_}; }
  Eigen::Map<const CMat> at(std::size_t p) const {
    return {data_.data() + p * fiber_size(), rank_, rank_};
  }

  ComplexField entry(int row, int col) const;
  void set_entry(int row, int col, const ComplexField& values);

  /// Applies fn pointwise; fn receives and returns a fiber.
  MatrixField map(const std::function<CMat(const CMat&)>& fn) const;
  /// Pointwise combination of two fields of equal shape.
  static MatrixField zip(const MatrixField& a, const MatrixField& b,
                         const std::function<CMat(const CMat&, const CMat&)>& fn);

  MatrixField& operator+=(const MatrixField& other);
  MatrixField& operator-=(const MatrixField& other);
  MatrixField& operator*=(double scale);
  /// this += alpha * x
  void axpy(double alpha, const MatrixField& x);

  /// Real inner product sum_p Re tr(A_p B_p^*), without volume weights.
  double dot(const MatrixField& other) const;
  double sup_norm() const;
  /// max_p of the Hermitian defect of each fiber.
  double hermitian_defect() const;
  ComplexField trace() const;

  const std::vector<Complex>& raw() const { return data_; }
  std::vector<Complex>& raw() { return data_; }

 private:
  std::size_t fiber_size() const { return static_cast<std::size_t>(rank_) * rank_; }

  std::size_t points_ = 0;
  int rank_ = 0;
  std::vector<Complex> data_;
};

MatrixField operator+(MatrixField a, const MatrixField& b);
MatrixField operator-(MatrixField a, const MatrixField& b);
MatrixField operator*(double scale, MatrixField a);

class SectionField {
 public:
  SectionField() = default;
  SectionField(std::size_t points, int rank);
  static SectionField constant(std::size_t points, const CVec& value);

  std::size_t points() const { return points_; }
  int rank() const { return rank_; }

  Eigen::Map<CVec> at(std::size_t p) { return {data_.data() + p * rank_, rank_}; }
  Eigen::Map<const CVec> at(std::size_t p) const { return {data_.data() + p * rank_, rank_}; }

  ComplexField component(int i) const;
  void set_component(int i, const ComplexField& values);
  double sup_norm() const;

 private:
  std::size_t points_ = 0;
  int rank_ = 0;
  std::vector<Complex> data_;
};

}  // namespace vortex
