#include "cex/embezzle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "cex/error.hpp"
#include "cex/random.hpp"

namespace cex {

namespace {

struct Enumerator {
  std::size_t n;
  long long bound;  // on the sum of squares of doubled coordinates
  std::size_t limit;
  std::vector<std::vector<int>>* out;
  std::vector<int> y;

  void run(int parity, int sum_mod4) {
    y.assign(n, 0);
    recurse(0, 0, 0, parity, sum_mod4);
  }

  void recurse(std::size_t i, long long norm, long long sum, int parity, int sum_mod4) {
    if (i == n) {
      if (norm == 0) return;
      if (((sum % 4) + 4) % 4 != sum_mod4) return;
      if (out->size() >= limit)
        fail(ErrorCode::net_too_large, "lattice enumeration exceeds " + std::to_string(limit) + " points");
      out->push_back(y);
      return;
    }
    // Remaining coordinates each contribute at least parity^2.
    const long long rest_min = static_cast<long long>(n - i - 1) * parity;
    const long long room = bound - norm - rest_min;
    if (room < parity) return;
    const int top = static_cast<int>(std::floor(std::sqrt(static_cast<double>(room))));
    for (int v = -top; v <= top; ++v) {
      if (((v % 2) + 2) % 2 != parity) continue;
      const long long sq = static_cast<long long>(v) * v;
      if (sq > room) continue;
      y[i] = v;
      recurse(i + 1, norm + sq, sum + v, parity, sum_mod4);
    }
    y[i] = 0;
  }
};

double best_overlap(const Matrix& net_adjoint, const Vector& t) {
  return (net_adjoint * t).cwiseAbs().maxCoeff();
}

PureState zero_state(const SubsystemLayout& layout) {
  std::vector<std::size_t> digits(layout.size(), 0);
  return PureState::basis(layout, digits);
}

}  // namespace

std::vector<std::vector<int>> lattice_points(std::size_t n, double r2, std::size_t limit) {
  if (n == 0 || n % 2 != 0) fail(ErrorCode::domain_error, "D_n^+ needs an even positive dimension");
  std::vector<std::vector<int>> out;
  Enumerator e{n, static_cast<long long>(std::floor(4.0 * r2 + 1e-9)), limit, &out, {}};
  e.run(0, 0);
  e.run(1, static_cast<int>(n % 4));
  return out;
}

std::vector<Vector> net_from_lattice(const std::vector<std::vector<int>>& points) {
  std::map<std::vector<long long>, Vector> unique;
  for (const auto& y : points) {
    const auto dim = static_cast<Eigen::Index>(y.size() / 2);
    Vector z(dim);
    for (Eigen::Index j = 0; j < dim; ++j) z(j) = Complex(y[2 * j], y[2 * j + 1]);
    z.normalize();
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double mag = std::abs(z(j));
      if (mag > 1e-12) {
        z *= std::conj(z(j)) / mag;
        z(j) = mag;
        break;
      }
    }
    std::vector<long long> key;
    key.reserve(y.size());
    for (Eigen::Index j = 0; j < dim; ++j) {
      key.push_back(std::llround(z(j).real() * 1e9));
      key.push_back(std::llround(z(j).imag() * 1e9));
    }
    unique.emplace(std::move(key), std::move(z));
  }
  std::vector<Vector> net;
  net.reserve(unique.size());
  for (auto& [key, v] : unique) net.push_back(std::move(v));
  return net;
}

double estimate_covering_radius(const std::vector<Vector>& net, std::size_t dim, const NetOptions& options) {
  if (net.empty()) return std::sqrt(2.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix adjoint(static_cast<Eigen::Index>(net.size()), d);
  for (std::size_t i = 0; i < net.size(); ++i) adjoint.row(static_cast<Eigen::Index>(i)) = net[i].adjoint();

  Rng rng(options.seed);
  double worst = 1.0;
  for (std::size_t s = 0; s < options.covering_samples; ++s) {
    Vector t = gaussian_matrix(d, 1, rng).col(0).normalized();
    double f = best_overlap(adjoint, t);
    double step = 0.3;
    for (std::size_t k = 0; k < options.ascent_steps; ++k) {
      Vector trial = (t + step * gaussian_matrix(d, 1, rng).col(0)).normalized();
      const double g = best_overlap(adjoint, trial);
      if (g < f) {
        t = std::move(trial);
        f = g;
      } else {
        step *= 0.7;
      }
    }
    worst = std::min(worst, f);
  }
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * worst));
}

EmbezzlingFamily universal_family(std::size_t m, const std::vector<std::size_t>& per_party_dims, std::uint64_t n,
                                  double epsilon, const NetOptions& options) {
  if (m == 0 || per_party_dims.size() != m) fail(ErrorCode::domain_error, "need one dimension per party");
  if (n == 0) fail(ErrorCode::domain_error, "N must be at least 1");
  if (!(epsilon > 0.0)) fail(ErrorCode::domain_error, "epsilon must be positive");

  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < m; ++i) {
    if (per_party_dims[i] == 0) fail(ErrorCode::domain_error, "party dimensions must be positive");
    subs.push_back({"P" + std::to_string(i + 1), per_party_dims[i]});
  }
  SubsystemLayout layout(std::move(subs));
  const std::size_t dim = layout.total_dim();
  const std::size_t real_dim = 2 * dim;

  std::vector<Vector> net;
  double r2 = 0.0;
  double covering = std::sqrt(2.0);
  std::size_t last_size = 0;
  // Doubled coordinates make every squared norm a multiple of 1/4.
  while (covering > epsilon) {
    r2 += 0.25;
    const auto points = lattice_points(real_dim, r2, 8 * kMaxNetPoints);
    if (points.size() == last_size) continue;
    last_size = points.size();
    net = net_from_lattice(points);
    if (net.size() > kMaxNetPoints)
      fail(ErrorCode::net_too_large, "epsilon-net exceeds " + std::to_string(kMaxNetPoints) + " points");
    covering = estimate_covering_radius(net, dim, options);
  }

  EmbezzlingFamily family{
      .layout = layout, .n = n, .epsilon = epsilon, .radius_squared = r2, .covering_estimate = covering, .members = {}};
  const PureState phi = zero_state(layout);
  family.members.reserve(net.size());
  for (auto& v : net) {
    PureState point(layout, std::move(v));
    std::optional<ExchangeResource> resource;
    if (std::abs(inner(phi, point)) < 1.0 - kIdenticalTolerance)
      resource = build_resource(phi, point, n, Backend::gram);
    family.members.push_back({std::move(point), std::move(resource)});
  }
  return family;
}

EmbezzleOutcome embezzle(const EmbezzlingFamily& family, const PureState& target, Backend backend) {
  if (family.members.empty()) fail(ErrorCode::empty_net, "embezzling family has no net points");
  if (!(target.layout() == family.layout)) fail(ErrorCode::layout_mismatch, "target layout differs from the family");

  std::size_t best = 0;
  double best_ov = -1.0;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const double ov = std::abs(inner(target, family.members[i].point));
    if (ov > best_ov) {
      best_ov = ov;
      best = i;
    }
  }
  const auto& member = family.members[best];
  const PureState phi = zero_state(family.layout);

  EmbezzleOutcome out{.net_index = best,
                      .target_overlap = best_ov,
                      .exchange = {.output_state = member.point,
                                   .residual_state = std::nullopt,
                                   .residual_overlap = 1.0,
                                   .output_fidelity = 1.0},
                      .fidelity = 0.0,
                      .guarantee_met = false};
  if (member.resource) {
    if (backend == Backend::dense)
      out.exchange = exchange(phi, build_resource(phi, member.point, family.n, Backend::dense));
    else
      out.exchange = exchange(phi, *member.resource);
  }
  out.fidelity = best_ov * out.exchange.residual_overlap;
  const double n = static_cast<double>(family.n);
  const double guarantee = (1.0 - 1.0 / n) * (1.0 - family.epsilon * family.epsilon / 2.0);
  out.guarantee_met = out.fidelity >= guarantee - 1e-12;
  return out;
}

}  // namespace cex
