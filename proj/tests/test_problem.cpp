#include <doctest.h>

#include "oracles.hpp"
#include "pflacg/problem_gen.hpp"

using namespace pflacg;

TEST_CASE("generation is deterministic in the spec") {
  ProblemSpec spec;
  spec.kind = ProblemKind::structured_lasso;
  spec.n = 40;
  spec.alpha = 2.0;
  spec.seed = 99;
  spec.pair_count = 5;

  auto a = generate_experiment(spec);
  auto b = generate_experiment(spec);
  CHECK(a.objective->hessian() == b.objective->hessian());
  CHECK(a.objective->linear_term() == b.objective->linear_term());
  CHECK(a.region->description() == b.region->description());
  CHECK(a.start->id == b.start->id);

  spec.seed = 100;
  auto c = generate_experiment(spec);
  CHECK(a.objective->hessian() != c.objective->hessian());
}

TEST_CASE("sigma0 sandwich on generated quadratics") {
  ProblemSpec spec;
  spec.kind = ProblemKind::simplex;
  spec.n = 30;
  spec.alpha = 3.0;
  spec.seed = 4;
  auto exp = generate_experiment(spec);
  auto [mu, lip] = testing::extreme_eigenvalues(exp.objective->hessian());

  Rng rng(1007);
  for (int t = 0; t < 50; ++t) {
    Vector x(spec.n), y(spec.n);
    for (Index i = 0; i < spec.n; ++i) {
      x[i] = rng.uniform();
      y[i] = rng.uniform();
    }
    x /= x.sum();
    y /= y.sum();
    if ((x - y).norm() < 1e-12) continue;
    const double s = sigma0_estimate(*exp.objective, x, y);
    CHECK(s >= mu - 1e-9);
    CHECK(s <= lip + 1e-9);
  }
}

TEST_CASE("simplex family condition number tracks n^2 / (4 alpha)") {
  // At n = 400 with alpha = 0.8 the predicted condition number matches the
  // n = 10000, alpha = 500 setup (both give n^2/(4 alpha) = 5e4), so the
  // desk-size instance checks the full-scale figure.
  ProblemSpec spec;
  spec.kind = ProblemKind::simplex;
  spec.n = 400;
  spec.alpha = 0.8;
  spec.seed = 21;
  auto exp = generate_experiment(spec);
  auto [mu, lip] = testing::extreme_eigenvalues(exp.objective->hessian());
  const double kappa = lip / mu;
  CHECK(kappa >= 4.0e4);
  CHECK(kappa <= 6.0e4);

  const double top_estimate = lip - spec.alpha;
  CHECK(top_estimate ==
        doctest::Approx(double(spec.n) * double(spec.n) / 4.0).epsilon(0.15));

  const double full_scale_prediction = (1e8 / 4.0 + 500.0) / 500.0;
  CHECK(full_scale_prediction == doctest::Approx(5e4).epsilon(0.05));
}

TEST_CASE("lasso family: group structure and b range") {
  ProblemSpec spec;
  spec.kind = ProblemKind::structured_lasso;
  spec.n = 200;
  spec.alpha = 10.0;
  spec.seed = 8;
  spec.pair_count = 25;
  auto exp = generate_experiment(spec);

  auto* region = dynamic_cast<const MergedL1Ball*>(exp.region.get());
  REQUIRE(region != nullptr);
  CHECK(region->group_count() == 200 - 25);
  std::size_t pairs = 0;
  std::size_t covered = 0;
  for (std::size_t g = 0; g < region->group_count(); ++g) {
    const auto sz = region->group_members(g).size();
    CHECK((sz == 1 || sz == 2));
    if (sz == 2) ++pairs;
    covered += sz;
  }
  CHECK(pairs == 25);
  CHECK(covered == 200);

  // b entries drawn from [0, 100] for this family.
  CHECK(exp.objective->linear_term().maxCoeff() > 1.0);
  CHECK(exp.objective->linear_term().minCoeff() >= 0.0);
  CHECK(exp.objective->linear_term().maxCoeff() <= 100.0);
}

TEST_CASE("birkhoff family: zero and cap cells bind at LMO answers") {
  ProblemSpec spec;
  spec.kind = ProblemKind::constrained_birkhoff;
  spec.n = 64;
  spec.alpha = 1.0;
  spec.seed = 12;
  spec.zero_count = 8;
  spec.cap_count = 8;
  spec.max_eig = 1000.0;
  auto exp = generate_experiment(spec);

  auto* region = dynamic_cast<const HPolytope*>(exp.region.get());
  REQUIRE(region != nullptr);
  std::size_t zeroed = 0, capped = 0;
  for (Index i = 0; i < 64; ++i) {
    if (region->upper_bounds()[i] == 0.0) ++zeroed;
    if (region->upper_bounds()[i] == 0.5) ++capped;
  }
  CHECK(zeroed == 8);
  CHECK(capped == 8);

  // Scaled top eigenvalue: M'M rescaled to max_eig before the alpha shift.
  auto [mu, lip] = testing::extreme_eigenvalues(exp.objective->hessian());
  CHECK(lip == doctest::Approx(1000.0 + 1.0).epsilon(0.01));
  CHECK(mu >= 1.0 - 1e-9);

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Vector c(64);
    for (Index i = 0; i < 64; ++i) c[i] = rng.uniform(-1, 1);
    auto v = exp.region->lmo(c);
    for (Index i = 0; i < 64; ++i) {
      if (region->upper_bounds()[i] == 0.0) CHECK(std::abs(v->coords[i]) <= 1e-9);
      CHECK(v->coords[i] <= region->upper_bounds()[i] + 1e-9);
    }
  }
}

TEST_CASE("start vertex is a region vertex derived from the seed") {
  ProblemSpec spec;
  spec.kind = ProblemKind::simplex;
  spec.n = 10;
  spec.alpha = 1.0;
  spec.seed = 5;
  auto exp = generate_experiment(spec);
  CHECK(exp.region->contains(exp.start->coords, 1e-9));
  CHECK(exp.start->coords.maxCoeff() == 1.0);  // a simplex vertex
}

TEST_CASE("generation rejects bad configurations") {
  ProblemSpec spec;
  spec.kind = ProblemKind::custom;
  CHECK_THROWS_AS(generate_experiment(spec), InputError);
  spec.kind = ProblemKind::simplex;
  spec.n = 1;
  CHECK_THROWS_AS(generate_experiment(spec), InputError);
  spec.n = 10;
  spec.alpha = 0.0;
  CHECK_THROWS_AS(generate_experiment(spec), InputError);
  spec.alpha = 1.0;
  spec.kind = ProblemKind::constrained_birkhoff;
  spec.n = 10;  // not a square
  CHECK_THROWS_AS(generate_experiment(spec), InputError);
}

TEST_CASE("problem spec key-value round trip") {
  ProblemSpec spec;
  spec.kind = ProblemKind::constrained_birkhoff;
  spec.n = 64;
  spec.alpha = 1.5;
  spec.seed = 77;
  spec.zero_count = 4;
  spec.cap_count = 6;
  spec.cap_value = 0.25;
  spec.max_eig = 1e4;

  std::map<std::string, std::string> kv;
  problem_spec_to_map(spec, kv);
  auto back = problem_spec_from_map(kv);
  CHECK(back.kind == spec.kind);
  CHECK(back.n == spec.n);
  CHECK(back.alpha == doctest::Approx(spec.alpha));
  CHECK(back.seed == spec.seed);
  CHECK(back.zero_count == spec.zero_count);
  CHECK(back.cap_count == spec.cap_count);
  CHECK(back.cap_value == doctest::Approx(spec.cap_value));
  CHECK(back.max_eig == doctest::Approx(spec.max_eig));
}
