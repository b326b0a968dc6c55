#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hagcl {

// Dense row-major array of doubles with arbitrary rank.
//
// Rank-1 arrays of size one serve as scalars.  All numerics in the library
// run at 64-bit precision.
class Array {
public:
  Array() = default;
  explicit Array(std::vector<std::size_t> shape, double fill = 0.0);

  static Array scalar(double v);
  static Array zeros_like(const Array& other);
  // Builds a rank-2 array; every row must have the same length.
  static Array from_rows(const std::vector<std::vector<double>>& rows);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool is_scalar() const { return data_.size() == 1; }

  // First-axis helpers; rank-0/1 arrays count as a single column.
  std::size_t rows() const { return shape_.empty() ? 1 : shape_[0]; }
  std::size_t row_size() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(std::size_t r, std::size_t c) { return data_[r * row_size() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * row_size() + c]; }

  bool same_shape(const Array& other) const { return shape_ == other.shape_; }
  std::string shape_str() const;

  void fill(double v);
  double sum() const;
  double mean() const;
  bool all_finite() const;

private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

}  // namespace hagcl
