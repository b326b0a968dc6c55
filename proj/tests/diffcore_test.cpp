#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hagcl/adam.hpp"
#include "hagcl/error.hpp"
#include "hagcl/ops.hpp"
#include "testutil.hpp"

using namespace hagcl;
using testutil::gradient_check;
using testutil::project;
using testutil::random_array;
using testutil::random_array_away_from_zero;

TEST_CASE("matmul identity and unit selection") {
  const Value a = Value::constant(Array::from_rows({{1, 2}, {3, 4}}));
  const Value eye = Value::constant(Array::from_rows({{1, 0}, {0, 1}}));
  const Value out = matmul(a, eye);
  CHECK(out.data().at(0, 0) == 1.0);
  CHECK(out.data().at(0, 1) == 2.0);
  CHECK(out.data().at(1, 0) == 3.0);
  CHECK(out.data().at(1, 1) == 4.0);

  const Value row = Value::constant(Array::from_rows({{1, 0}}));
  const Value col = Value::constant(Array::from_rows({{2}, {5}}));
  CHECK(matmul(row, col).data()[0] == 2.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  const Value a = Value::constant(Array({2, 3}));
  const Value b = Value::constant(Array({2, 2}));
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("[2x3]"), ShapeError);
}

TEST_CASE("matmul gradient matches finite differences") {
  Value a = Value::param(random_array({3, 4}, 11));
  Value b = Value::param(random_array({4, 2}, 12));
  const double err = gradient_check([&] { return sum_all(matmul(a, b)); }, {a, b});
  CHECK(err < 1e-4);
}

TEST_CASE("relu dead region") {
  Value x = Value::param(Array::scalar(-1.0));
  Value y = relu(x);
  CHECK(y.data()[0] == 0.0);
  backward(sum_all(y));
  CHECK(x.grad()[0] == 0.0);
}

TEST_CASE("exp at zero") {
  Value x = Value::param(Array::scalar(0.0));
  Value y = exp(x);
  CHECK(y.data()[0] == 1.0);
  backward(y);
  CHECK(x.grad()[0] == 1.0);
}

TEST_CASE("log(exp(x)) composes to identity gradient") {
  Value x = Value::param(random_array({7}, 21, -2.0, 2.0));
  backward(sum_all(log(exp(x))));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x.grad()[i] - 1.0) < 1e-6);
}

TEST_CASE("elementwise domain errors") {
  CHECK_THROWS_AS(log(Value::scalar(0.0)), DomainError);
  CHECK_THROWS_AS(log(Value::scalar(-3.0)), DomainError);
  CHECK_THROWS_AS(div(Value::scalar(1.0), Value::scalar(0.0)), DomainError);
  CHECK_THROWS_AS(sqrt(Value::scalar(-1.0)), DomainError);
}

TEST_CASE("elementwise broadcasting is scalar-or-same-shape only") {
  const Value m = Value::constant(Array({2, 3}, 1.0));
  const Value s = Value::scalar(2.0);
  CHECK(mul(m, s).data().at(1, 2) == 2.0);
  CHECK(mul(s, m).data().at(0, 0) == 2.0);
  const Value v = Value::constant(Array({3}, 1.0));
  CHECK_THROWS_AS(add(m, v), ShapeError);
}

TEST_CASE("segment_sum hand cases") {
  const Value values = Value::constant(Array::from_rows({{1}, {2}, {3}}));
  const Value out = segment_sum(values, {0, 0, 1}, 2);
  CHECK(out.data().at(0, 0) == 3.0);
  CHECK(out.data().at(1, 0) == 3.0);

  // Empty segment stays a zero row.
  const Value v2 = Value::constant(Array::from_rows({{5}, {7}}));
  const Value out2 = segment_sum(v2, {1, 1}, 2);
  CHECK(out2.data().at(0, 0) == 0.0);
  CHECK(out2.data().at(1, 0) == 12.0);
}

TEST_CASE("segment_sum rejects out-of-range ids") {
  const Value values = Value::constant(Array({3, 2}));
  CHECK_THROWS_AS(segment_sum(values, {0, 1, 2}, 2), IndexError);
}

TEST_CASE("segment_sum gradient matches finite differences") {
  Value v = Value::param(random_array({5, 3}, 31));
  const std::vector<std::size_t> ids = {0, 2, 1, 2, 0};
  const double err =
      gradient_check([&] { return project(segment_sum(v, ids, 3), 32); }, {v});
  CHECK(err < 1e-4);
}

TEST_CASE("segment_sum backward conserves gradient mass") {
  Value v = Value::param(random_array({6, 2}, 41));
  const std::vector<std::size_t> ids = {0, 1, 1, 2, 0, 2};
  const Array weights = random_array({3, 2}, 42, -1.0, 1.0);
  backward(sum_all(mul(segment_sum(v, ids, 3), Value::constant(weights))));
  // Every member row receives exactly its segment's output gradient.
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(v.grad().at(r, c) == doctest::Approx(weights.at(ids[r], c)).epsilon(1e-12));
}

TEST_CASE("backward on a leaf") {
  Value x = Value::param(Array::scalar(4.0));
  backward(x);
  CHECK(x.grad()[0] == 1.0);
}

TEST_CASE("backward of sum of squares") {
  Value x = Value::param(Array::from_rows({{1, 2, 3}}));
  backward(sum_all(mul(x, x)));
  CHECK(x.grad()[0] == 2.0);
  CHECK(x.grad()[1] == 4.0);
  CHECK(x.grad()[2] == 6.0);
}

TEST_CASE("diamond graph accumulates additively") {
  Value x = Value::param(Array::scalar(3.0));
  backward(add(x, x));
  CHECK(x.grad()[0] == 2.0);
}

TEST_CASE("backward requires a scalar root") {
  Value x = Value::param(Array({2, 2}));
  CHECK_THROWS_AS(backward(x), ContractError);
}

TEST_CASE("backward twice yields identical gradients") {
  Value x = Value::param(random_array({4, 3}, 51));
  Value y = Value::param(random_array({3, 2}, 52));
  const Value loss = project(relu(matmul(x, y)), 53);
  backward(loss);
  const Array first = x.grad();
  backward(loss);
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(x.grad()[i] == first[i]);
}

TEST_CASE("gradient suite over the op set") {
  // A handful of instances per op here; the acceptance suite runs 20+.
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    const std::uint64_t s = 1000 + inst * 17;
    CAPTURE(inst);

    Value a = Value::param(random_array({3, 4}, s));
    Value b = Value::param(random_array({3, 4}, s + 1));
    CHECK(gradient_check([&] { return project(add(a, b), s + 2); }, {a, b}) < 1e-4);
    CHECK(gradient_check([&] { return project(sub(a, b), s + 3); }, {a, b}) < 1e-4);
    CHECK(gradient_check([&] { return project(mul(a, b), s + 4); }, {a, b}) < 1e-4);

    Value den = Value::param(random_array_away_from_zero({3, 4}, s + 5));
    CHECK(gradient_check([&] { return project(div(a, den), s + 6); }, {a, den}) < 1e-4);

    Value r = Value::param(random_array_away_from_zero({4, 4}, s + 7));
    CHECK(gradient_check([&] { return project(relu(r), s + 8); }, {r}) < 1e-4);
    CHECK(gradient_check([&] { return project(neg(r), s + 9); }, {r}) < 1e-4);
    CHECK(gradient_check([&] { return project(exp(mul(r, Value::scalar(0.5))), s + 10); }, {r}) <
          1e-4);
    CHECK(gradient_check([&] { return project(sigmoid(r), s + 11); }, {r}) < 1e-4);

    Value pos = Value::param(random_array({4, 3}, s + 12, 0.2, 2.0));
    CHECK(gradient_check([&] { return project(log(pos), s + 13); }, {pos}) < 1e-4);
    CHECK(gradient_check([&] { return project(sqrt(pos), s + 14); }, {pos}) < 1e-4);

    Value m = Value::param(random_array({4, 3}, s + 15));
    Value scales = Value::param(random_array({4}, s + 16));
    CHECK(gradient_check([&] { return project(scale_rows(m, scales), s + 17); }, {m, scales}) <
          1e-4);
    Value row = Value::param(random_array({3}, s + 18));
    CHECK(gradient_check([&] { return project(add_rowvec(m, row), s + 19); }, {m, row}) < 1e-4);
    CHECK(gradient_check([&] { return project(mul_rowvec(m, row), s + 20); }, {m, row}) < 1e-4);
    CHECK(gradient_check([&] { return project(transpose(m), s + 21); }, {m}) < 1e-4);

    const std::vector<std::size_t> idx = {2, 0, 0, 3, 1};
    CHECK(gradient_check([&] { return project(gather_rows(m, idx), s + 22); }, {m}) < 1e-4);

    Value c1 = Value::param(random_array({3, 2}, s + 23));
    Value c2 = Value::param(random_array({3, 4}, s + 24));
    CHECK(gradient_check([&] { return project(concat_cols(c1, c2), s + 25); }, {c1, c2}) < 1e-4);
    Value r2 = Value::param(random_array({2, 2}, s + 26));
    CHECK(gradient_check([&] { return project(concat_rows(c1, r2), s + 27); }, {c1, r2}) < 1e-4);
    CHECK(gradient_check([&] { return project(select_col(m, 1), s + 28); }, {m}) < 1e-4);
    CHECK(gradient_check([&] { return project(clamp_min(r, 0.05), s + 29); }, {r}) < 1e-4);
    CHECK(gradient_check([&] { return project(reshape(m, {3, 4}), s + 30); }, {m}) < 1e-4);
    CHECK(gradient_check([&] { return mean_all(mul(m, m)); }, {m}) < 1e-4);
  }
}

TEST_CASE("straight-through passes the soft gradient exactly") {
  Value logits = Value::param(random_array({5}, 61));
  const auto build_soft = [&] { return project(sigmoid(logits), 62); };
  backward(build_soft());
  const Array soft_grad = logits.grad();

  const auto build_hard = [&] {
    Value soft = sigmoid(logits);
    Array hard = Array::zeros_like(soft.data());
    for (std::size_t i = 0; i < hard.size(); ++i) hard[i] = soft.data()[i] >= 0.5 ? 1.0 : 0.0;
    return project(straight_through(soft, hard), 62);
  };
  backward(build_hard());
  for (std::size_t i = 0; i < soft_grad.size(); ++i) CHECK(logits.grad()[i] == soft_grad[i]);
}

TEST_CASE("adam first step moves by about lr") {
  Value p = Value::param(Array::scalar(0.0));
  AdamOptimizer opt({p}, {});
  p.mutable_grad()[0] = 1.0;
  opt.step();
  CHECK(p.data()[0] == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(opt.step_count() == 1);
  CHECK(p.grad()[0] == 0.0);  // gradients zeroed after the step
}

TEST_CASE("adam zero gradient leaves the parameter bit-identical") {
  Value p = Value::param(Array::scalar(1.25));
  AdamOptimizer opt({p}, {});
  opt.step();
  CHECK(p.data()[0] == 1.25);
  CHECK(opt.step_count() == 1);
}

TEST_CASE("adam is monotone under a constant gradient") {
  Value p = Value::param(Array::scalar(0.5));
  AdamOptimizer opt({p}, {});
  double prev = p.data()[0];
  for (int i = 0; i < 3; ++i) {
    p.mutable_grad()[0] = 2.0;
    opt.step();
    CHECK(p.data()[0] < prev);
    prev = p.data()[0];
  }
}

TEST_CASE("adam rejects a missing gradient") {
  Value p = Value::param(Array::scalar(0.0));
  AdamOptimizer opt({p}, {});
  p.mutable_grad() = Array({3});  // corrupt the buffer
  CHECK_THROWS_AS(opt.step(), ContractError);
}
