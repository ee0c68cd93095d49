#include "cex/gram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cex/error.hpp"

namespace cex {

std::string_view to_string(Backend backend) {
  return backend == Backend::dense ? "dense" : "gram";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::forward ? "forward" : "backward";
}

Backend parse_backend(std::string_view name) {
  if (name == "dense") return Backend::dense;
  if (name == "gram") return Backend::gram;
  fail(ErrorCode::backend_unsupported, "unknown backend '" + std::string(name) + "'");
}

Direction parse_direction(std::string_view name) {
  if (name == "forward") return Direction::forward;
  if (name == "backward") return Direction::backward;
  fail(ErrorCode::invalid_argument, "unknown direction '" + std::string(name) + "'");
}

namespace {

void check_domain(std::uint64_t n, double a, bool allow_one) {
  if (n < 1) fail(ErrorCode::domain_error, "N must be at least 1");
  if (!(a >= 0.0) || a > 1.0 || (!allow_one && a >= 1.0))
    fail(ErrorCode::domain_error, "a = " + std::to_string(a) + " outside the admissible range");
}

}  // namespace

GramResource::GramResource(std::uint64_t n, double a) : n_(n), a_(a) { check_domain(n, a, true); }

double GramResource::term_overlap(std::uint64_t j, std::uint64_t k) const {
  const auto d = j > k ? j - k : k - j;
  if (d == 0) return 1.0;
  return std::pow(a_, static_cast<double>(d));
}

double GramResource::interval_sum(std::uint64_t j0, std::uint64_t j1, std::uint64_t k0, std::uint64_t k1) const {
  if (j1 < j0 || k1 < k0) return 0.0;
  // Multiplicity of the offset delta = j - k.
  auto count = [&](long double delta) -> long double {
    const long double lo = std::max<long double>(j0, k0 + delta);
    const long double hi = std::min<long double>(j1, k1 + delta);
    return hi >= lo ? hi - lo + 1 : 0;
  };
  const long double dmin = static_cast<long double>(j0) - static_cast<long double>(k1);
  const long double dmax = static_cast<long double>(j1) - static_cast<long double>(k0);
  long double total = 0;
  long double power = 1;
  const auto span = static_cast<std::uint64_t>(std::max(std::abs(dmin), std::abs(dmax)));
  for (std::uint64_t d = 0; d <= span; ++d) {
    if (d > 0) {
      power *= a_;
      if (power == 0) break;
    }
    const long double dd = static_cast<long double>(d);
    if (dd >= dmin && dd <= dmax) total += count(dd) * power;
    if (d > 0 && -dd >= dmin && -dd <= dmax) total += count(-dd) * power;
  }
  return static_cast<double>(total);
}

double GramResource::normalization() const { return interval_sum(1, n_, 1, n_); }

double GramResource::residual_overlap(Direction direction) const {
  const double n1 = normalization();
  if (direction == Direction::forward) return interval_sum(2, n_ + 1, 1, n_) / n1;
  return interval_sum(0, n_ - 1, 1, n_) / n1;
}

Eigen::MatrixXd GramResource::gram_matrix() const {
  if (n_ > 4096) fail(ErrorCode::too_large, "Gram matrix export is limited to N <= 4096");
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      g(j, k) = term_overlap(static_cast<std::uint64_t>(j + 1), static_cast<std::uint64_t>(k + 1));
  return g;
}

namespace {

// 1 - a^N without cancellation for a close to 1.
double one_minus_power(std::uint64_t n, double a) {
  if (a == 0.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log(a));
}

}  // namespace

double normalization_N1(std::uint64_t n, double a) {
  check_domain(n, a, false);
  if (n == 1) return 1.0;
  const double nn = static_cast<double>(n);
  const double e = 1.0 - a;
  // N1 = N + 2a/(1-a) (N - (1-a^N)/(1-a)); the bracket vanishes exactly at
  // N = 1 and is a sum of nonnegative terms otherwise.
  if (e >= 0.1) return nn + 2.0 * a / e * (nn - (1.0 - std::pow(a, nn)) / e);

  // Near a = 1 both terms grow like 1/(1-a)^2 and cancel. With
  // s = -(e + log(1-e)) and b = -N log a the closed form equals
  // N + 2a/e^2 (b + expm1(-b) - N s), and both brackets have series
  // starting at second order.
  double s = 0.0;
  double ek = e;
  for (int k = 2; k < 200; ++k) {
    ek *= e;
    const double term = ek / k;
    s += term;
    if (term < 1e-18 * s) break;
  }
  const double b = nn * (e + s);
  double q;
  if (b < 0.5) {
    q = 0.0;
    double bk = -b;
    for (int k = 2; k < 60; ++k) {
      bk *= -b / k;
      q += bk;
      if (std::abs(bk) < 1e-18 * std::abs(q)) break;
    }
  } else {
    q = b + std::expm1(-b);
  }
  return nn + 2.0 * a / (e * e) * (q - nn * s);
}

double overlap_formula(std::uint64_t n, double a) {
  check_domain(n, a, false);
  return 1.0 - one_minus_power(n, a) / normalization_N1(n, a);
}

}  // namespace cex
