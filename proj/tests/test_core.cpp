#include <doctest.h>

#include "oracles.hpp"
#include "pflacg/line_search.hpp"
#include "pflacg/objective.hpp"
#include "pflacg/rng.hpp"

using namespace pflacg;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

QuadraticObjective identity_quadratic(Index n) {
  return QuadraticObjective(Matrix::Identity(n, n), Vector::Zero(n));
}

}  // namespace

TEST_CASE("rng reproduces streams and samples distinct indices") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng c(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }

  Rng d(9);
  auto idx = d.sample_distinct(50, 20);
  CHECK(idx.size() == 20);
  std::sort(idx.begin(), idx.end());
  CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
  for (auto i : idx) CHECK(i < 50);
}

TEST_CASE("eval_foo on the identity quadratic") {
  auto obj = identity_quadratic(2);
  FirstOrderCounters counters;

  auto r = eval_foo(obj, vec2(1, 2), counters);
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(r.grad[0] == doctest::Approx(1.0));
  CHECK(r.grad[1] == doctest::Approx(2.0));

  r = eval_foo(obj, vec2(0, 0), counters);
  CHECK(r.value == 0.0);
  CHECK(r.grad.norm() == 0.0);
  CHECK(counters.foo_calls == 2);

  CHECK_THROWS_AS(eval_foo(obj, Vector::Zero(3), counters), InputError);
}

TEST_CASE("quadratic objective with off-identity curvature") {
  Matrix q(2, 2);
  q << 2, 0, 0, 4;
  QuadraticObjective obj(q, vec2(1, -1));
  // value = (2 + 4)/2 + (1 - 1) = 3, grad = Qx + b = (3, 3)
  CHECK(obj.value(vec2(1, 1)) == doctest::Approx(3.0));
  CHECK(obj.gradient(vec2(1, 1))[0] == doctest::Approx(3.0));
  CHECK(obj.gradient(vec2(1, 1))[1] == doctest::Approx(3.0));

  Matrix bad(2, 2);
  bad << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(QuadraticObjective(bad, Vector::Zero(2)), InputError);
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(123);
  Matrix m(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) m(i, j) = rng.uniform();
  Matrix q = m.transpose() * m + Matrix::Identity(4, 4);
  Vector b(4);
  for (Index i = 0; i < 4; ++i) b[i] = rng.uniform(-1, 1);
  QuadraticObjective obj(q, b);

  for (int probe = 0; probe < 100; ++probe) {
    Vector x(4), d(4);
    for (Index i = 0; i < 4; ++i) {
      x[i] = rng.uniform(-2, 2);
      d[i] = rng.uniform(-1, 1);
    }
    d.normalize();
    const double h = 1e-5;
    const double fd = (obj.value(x + h * d) - obj.value(x - h * d)) / (2 * h);
    const double an = obj.gradient(x).dot(d);
    CHECK(fd == doctest::Approx(an).epsilon(1e-5));
  }
}

TEST_CASE("sigma0 estimate brackets the curvature") {
  auto id = identity_quadratic(2);
  CHECK(sigma0_estimate(id, vec2(0.3, -1), vec2(2, 0.5)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Matrix q(2, 2);
  q << 2, 0, 0, 8;
  QuadraticObjective obj(q, Vector::Zero(2));
  CHECK(sigma0_estimate(obj, vec2(0, 0), vec2(1, 0)) == doctest::Approx(2.0));
  CHECK(sigma0_estimate(obj, vec2(0, 0), vec2(0, 1)) == doctest::Approx(8.0));
  CHECK_THROWS_AS(sigma0_estimate(obj, vec2(1, 1), vec2(1, 1)), InputError);

  // Sandwich m <= estimate <= L on random pairs.
  Rng rng(5);
  auto [lo, hi] = testing::extreme_eigenvalues(q);
  for (int t = 0; t < 50; ++t) {
    Vector x(2), y(2);
    for (Index i = 0; i < 2; ++i) {
      x[i] = rng.uniform(-3, 3);
      y[i] = rng.uniform(-3, 3);
    }
    if ((x - y).norm() < 1e-10) continue;
    const double s = sigma0_estimate(obj, x, y);
    CHECK(s >= lo - 1e-9);
    CHECK(s <= hi + 1e-9);
  }
}

TEST_CASE("curvature oracle and its absence") {
  auto id = identity_quadratic(2);
  CHECK(*id.curvature_along(vec2(0, 0), vec2(0, 3)) == doctest::Approx(9.0));

  Matrix q(2, 2);
  q << 2, 0, 0, 8;
  QuadraticObjective obj(q, Vector::Zero(2));
  CHECK(*obj.curvature_along(vec2(0, 0), vec2(1, 1)) == doctest::Approx(10.0));

  // A non-quadratic oracle reports no curvature.
  struct Quartic : ObjectiveOracle {
    Index dim() const override { return 1; }
    double value(const Vector& x) const override { return std::pow(x[0], 4); }
    Vector gradient(const Vector& x) const override {
      Vector g(1);
      g[0] = 4 * std::pow(x[0], 3);
      return g;
    }
  } quartic;
  CHECK(!quartic.curvature_along(Vector::Ones(1), Vector::Ones(1)).has_value());
}

TEST_CASE("line search: exact on quadratics, clamped, golden fallback") {
  auto id = identity_quadratic(1);
  FirstOrderCounters counters;
  Vector x = Vector::Ones(1);
  Vector d = -Vector::Ones(1);

  CHECK(line_search(id, x, d, 1.0, counters) == doctest::Approx(1.0));
  CHECK(line_search(id, x, d, 0.4, counters) == doctest::Approx(0.4));
  // Stationary along d.
  CHECK(line_search(id, x, d, 1.0, /*slope=*/0.0, counters) == 0.0);

  struct Quartic : ObjectiveOracle {
    Index dim() const override { return 1; }
    double value(const Vector& x) const override {
      return std::pow(x[0] - 0.25, 4);
    }
    Vector gradient(const Vector& x) const override {
      Vector g(1);
      g[0] = 4 * std::pow(x[0] - 0.25, 3);
      return g;
    }
  } quartic;
  Vector x0 = Vector::Ones(1);
  const double lam = line_search(quartic, x0, d, 1.0, counters);
  CHECK(lam == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("regularized objective wraps the base oracle") {
  auto id = identity_quadratic(2);
  Vector anchor = vec2(1, 0);
  RegularizedObjective reg(id, 3.0, anchor);
  Vector x = vec2(2, 2);
  CHECK(reg.value(x) ==
        doctest::Approx(id.value(x) + 1.5 * (x - anchor).squaredNorm()));
  CHECK((reg.gradient(x) - (id.gradient(x) + 3.0 * (x - anchor))).norm() ==
        doctest::Approx(0.0));
  CHECK(*reg.curvature_along(x, vec2(1, 1)) == doctest::Approx(2.0 + 6.0));
}
