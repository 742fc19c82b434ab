#include <doctest.h>

#include "oracles.hpp"
#include "pflacg/hull_subproblem.hpp"
#include "pflacg/rng.hpp"

using namespace pflacg;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::shared_ptr<const Vertex> unit(Index n, Index i) {
  Vector v = Vector::Zero(n);
  v[i] = 1.0;
  return make_vertex(std::move(v));
}

// Objective of the subproblem in ambient space.
double ambient_value(const HullSubproblem& p, const Vector& u) {
  return p.linear.dot(u) + 0.5 * p.rho * (u - p.center).squaredNorm();
}

}  // namespace

TEST_CASE("singleton hull is immediate") {
  auto hull = HullGeometry::from({make_vertex(vec({2, 3}))});
  HullSubproblem p;
  p.hull = &hull;
  p.linear = vec({1, 1});
  p.center = vec({0, 0});
  p.rho = 1.0;
  p.epsilon = 1e-9;
  auto r = solve_hull_subproblem(p);
  CHECK(r.lambda.size() == 1);
  CHECK(r.certificate == 0.0);
  CHECK((r.u - vec({2, 3})).norm() == 0.0);
  CHECK(r.iterations == 0);
}

TEST_CASE("projection of an interior point is the identity") {
  auto hull = HullGeometry::from({unit(3, 0), unit(3, 1), unit(3, 2)});
  Vector c = vec({1.0 / 3, 1.0 / 3, 1.0 / 3});
  HullSubproblem p;
  p.hull = &hull;
  p.linear = Vector::Zero(3);
  p.center = c;
  p.rho = 1.0;
  p.epsilon = 1e-12;
  auto r = solve_hull_subproblem(p);
  CHECK((r.u - c).norm() <= 1e-6);
  CHECK(r.certificate <= 1e-12);
}

TEST_CASE("segment projection matches the 1-d grid oracle") {
  auto hull = HullGeometry::from({unit(2, 0), unit(2, 1)});
  HullSubproblem p;
  p.hull = &hull;
  p.linear = vec({0, 0});
  p.center = vec({0.9, -0.2});
  p.rho = 2.0;
  p.epsilon = 1e-10;
  auto r = solve_hull_subproblem(p);
  CHECK((r.u - vec({1, 0})).norm() <= 1e-5);

  // Dense grid over lambda in [0,1] (u = (t, 1-t)).
  double best = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t <= 1.0; t += 1e-5) {
    best = std::min(best, ambient_value(p, vec({t, 1 - t})));
  }
  CHECK(ambient_value(p, r.u) <= best + 1e-9);
}

TEST_CASE("huge epsilon returns the warm start after zero iterations") {
  auto hull = HullGeometry::from({unit(2, 0), unit(2, 1)});
  HullSubproblem p;
  p.hull = &hull;
  p.linear = vec({5, -1});
  p.center = vec({0, 0});
  p.rho = 1.0;
  p.epsilon = 1e9;
  auto r = solve_hull_subproblem(p);
  CHECK(r.iterations == 0);
  CHECK(r.lambda[0] == doctest::Approx(0.5));
  CHECK(r.lambda[1] == doctest::Approx(0.5));
}

TEST_CASE("certificate soundness against the face-enumeration oracle") {
  Rng rng(77);
  for (int inst = 0; inst < 40; ++inst) {
    const Index d = 1 + static_cast<Index>(rng.below(3));
    std::vector<std::shared_ptr<const Vertex>> verts;
    for (Index j = 0; j < d; ++j) {
      Vector v(4);
      for (Index i = 0; i < 4; ++i) v[i] = rng.uniform(-1, 1);
      verts.push_back(make_vertex(std::move(v)));
    }
    auto hull = HullGeometry::from(verts);
    HullSubproblem p;
    p.hull = &hull;
    p.linear = Vector::Zero(4);
    p.center = Vector::Zero(4);
    for (Index i = 0; i < 4; ++i) {
      p.linear[i] = rng.uniform(-1, 1);
      p.center[i] = rng.uniform(-1, 1);
    }
    p.rho = rng.uniform(0.5, 3.0);
    p.epsilon = 1e-8;
    p.criterion = inst % 2 == 0 ? SubproblemCriterion::fw_gap
                                : SubproblemCriterion::grad_map;
    auto r = solve_hull_subproblem(p);

    // Exact optimum in barycentric coordinates via face enumeration.
    const Vector g_bar = hull.v.transpose() * (p.linear - p.rho * p.center);
    const Matrix h_bar = p.rho * hull.gram;
    const Vector lam_star =
        testing::min_quadratic_over_simplex_bruteforce(g_bar, h_bar);
    const double opt = ambient_value(p, hull.v * lam_star);
    CHECK(ambient_value(p, r.u) - opt <= p.epsilon + 1e-10);
  }
}

TEST_CASE("restart certificates are non-increasing") {
  Rng rng(7);
  std::vector<std::shared_ptr<const Vertex>> verts;
  for (Index j = 0; j < 6; ++j) {
    Vector v(5);
    for (Index i = 0; i < 5; ++i) v[i] = rng.uniform(-1, 1);
    verts.push_back(make_vertex(std::move(v)));
  }
  auto hull = HullGeometry::from(verts);
  HullSubproblem p;
  p.hull = &hull;
  p.linear = vec({1, -2, 0.5, 0, 1});
  p.center = vec({0.2, 0.1, -0.3, 0.4, 0.0});
  p.rho = 2.0;
  p.epsilon = 1e-12;
  auto r = solve_hull_subproblem(p);
  for (std::size_t i = 1; i < r.restart_certificates.size(); ++i) {
    CHECK(r.restart_certificates[i] <= r.restart_certificates[i - 1]);
  }
}

TEST_CASE("grad-map criterion falls back when the gram matrix is singular") {
  // Three affinely dependent vertices on a line: V'V singular.
  auto a = make_vertex(vec({0, 0}));
  auto b = make_vertex(vec({1, 1}));
  auto c = make_vertex(vec({0.5, 0.5}));
  auto hull = HullGeometry::from({a, b, c});
  HullSubproblem p;
  p.hull = &hull;
  p.linear = vec({1, 0});
  p.center = vec({0, 0});
  p.rho = 1.0;
  p.epsilon = 1e-9;
  p.criterion = SubproblemCriterion::grad_map;
  auto r = solve_hull_subproblem(p);  // must not divide by the zero eigenvalue
  CHECK(ambient_value(p, r.u) <=
        ambient_value(p, vec({0, 0})) + 1e-9);  // optimum at the origin vertex
}

TEST_CASE("iteration cap raises an accuracy error carrying the certificate") {
  Rng rng(9);
  std::vector<std::shared_ptr<const Vertex>> verts;
  for (Index j = 0; j < 4; ++j) {
    Vector v(3);
    for (Index i = 0; i < 3; ++i) v[i] = rng.uniform(-1, 1);
    verts.push_back(make_vertex(std::move(v)));
  }
  auto hull = HullGeometry::from(verts);
  HullSubproblem p;
  p.hull = &hull;
  p.linear = vec({1, 2, 3});
  p.center = vec({-1, 0.5, 0});
  p.rho = 1.0;
  p.epsilon = 0.0;  // unreachable exactly; stall acceptance may still end it
  p.max_iterations = 3;
  try {
    auto r = solve_hull_subproblem(p);
    CHECK(r.stalled);  // only a stall may end a 3-iteration budget at eps 0
  } catch (const AccuracyError& e) {
    CHECK(e.best_certificate > 0.0);
    CHECK(std::isfinite(e.best_certificate));
  }
}
