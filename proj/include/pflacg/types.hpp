#ifndef PFLACG_TYPES_HPP_
#define PFLACG_TYPES_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pflacg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// First-order and linear-minimization oracle call counters. Oracles
/// themselves are immutable; each algorithm run owns one of these and
/// increments it at call sites, so concurrent runs never share counters.
struct FirstOrderCounters {
  std::int64_t foo_calls = 0;
  std::int64_t lmo_calls = 0;

  FirstOrderCounters& operator+=(const FirstOrderCounters& other) {
    foo_calls += other.foo_calls;
    lmo_calls += other.lmo_calls;
    return *this;
  }
};

/// Thrown on dimension mismatches and malformed configuration.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative subproblem solver hits its iteration cap before
/// reaching the requested certificate. Carries the best certificate seen.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_certificate)
      : std::runtime_error(what), best_certificate(best_certificate) {}
  double best_certificate;
};

/// Thrown when a smoothness estimate exceeds its divergence ceiling.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void check_dim(Index got, Index want, const char* where) {
  if (got != want) {
    throw InputError(std::string(where) + ": dimension mismatch, got " +
                     std::to_string(got) + ", expected " + std::to_string(want));
  }
}

}  // namespace pflacg

#endif  // PFLACG_TYPES_HPP_
