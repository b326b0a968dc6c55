#pragma once

#include <cstdint>
#include <vector>

#include "hagcl/value.hpp"

namespace hagcl {

// Elementwise operation kinds.  Binary kinds accept same-shape operands or a
// scalar on either side; no other broadcasting is supported.
enum class EwKind { Add, Sub, Mul, Div, Neg, Relu, Exp, Log, Sqrt, Sigmoid };

Value elementwise(EwKind kind, const Value& a);                  // unary kinds
Value elementwise(EwKind kind, const Value& a, const Value& b);  // binary kinds

Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value div(const Value& a, const Value& b);
Value neg(const Value& a);
Value relu(const Value& a);
Value exp(const Value& a);
Value log(const Value& a);
Value sqrt(const Value& a);
Value sigmoid(const Value& a);

// max(a, floor); the gradient passes where a >= floor.
Value clamp_min(const Value& a, double floor);

// [m x k] . [k x n] -> [m x n]
Value matmul(const Value& a, const Value& b);
Value transpose(const Value& a);

// Row s of the output is the sum of input rows whose segment id is s.
// Segments with no members are zero rows; backward scatters the output
// gradient back to the member rows.
Value segment_sum(const Value& values, const std::vector<std::size_t>& segment_ids,
                  std::size_t num_segments);

// Select rows by index; rows may repeat.  Backward scatter-adds.
Value gather_rows(const Value& values, const std::vector<std::size_t>& indices);

// Multiply row r of m by scales[r]; scales is [n] or [n x 1].
Value scale_rows(const Value& m, const Value& scales);

// Broadcast a [d] / [1 x d] row vector across every row of m.
Value add_rowvec(const Value& m, const Value& row);
Value mul_rowvec(const Value& m, const Value& row);

Value concat_cols(const Value& a, const Value& b);  // [n x da], [n x db] -> [n x (da+db)]
Value concat_rows(const Value& a, const Value& b);  // [na x d], [nb x d] -> [(na+nb) x d]

Value select_col(const Value& m, std::size_t col);  // [n x d] -> [n]

Value sum_all(const Value& a);   // -> scalar
Value mean_all(const Value& a);  // -> scalar

// Same data, new shape; sizes must agree.
Value reshape(const Value& a, std::vector<std::size_t> shape);

// Forward takes the `hard` values; backward passes the gradient to `soft`
// unchanged (straight-through estimator).
Value straight_through(const Value& soft, Array hard);

}  // namespace hagcl
