#include "hagcl/array.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "hagcl/error.hpp"

namespace hagcl {

Array::Array(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
  std::size_t n = 1;
  for (std::size_t d : shape_) n *= d;
  data_.assign(n, fill);
}

Array Array::scalar(double v) {
  Array a({1});
  a.data_[0] = v;
  return a;
}

Array Array::zeros_like(const Array& other) { return Array(other.shape_); }

Array Array::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows[0].size();
  Array out({r, c});
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw ShapeError("from_rows: ragged row lengths");
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) = rows[i][j];
  }
  return out;
}

std::size_t Array::row_size() const {
  std::size_t s = 1;
  for (std::size_t i = 1; i < shape_.size(); ++i) s *= shape_[i];
  return s;
}

std::string Array::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << 'x';
    os << shape_[i];
  }
  os << ']';
  return os.str();
}

void Array::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Array::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Array::mean() const { return data_.empty() ? 0.0 : sum() / static_cast<double>(data_.size()); }

bool Array::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace hagcl
