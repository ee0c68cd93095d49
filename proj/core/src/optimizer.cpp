#include "cex/optimizer.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "cex/error.hpp"
#include "cex/random.hpp"

namespace cex {

std::string_view to_string(Player player) {
  switch (player) {
    case Player::alice: return "alice";
    case Player::bob: return "bob";
    case Player::shared: return "shared";
  }
  return "unknown";
}

namespace {

// Nonzero entries of the referee branches X_0 = |00>, X_1 = phi: branch r,
// row s, column t, weight w.
struct Term {
  int r;
  Eigen::Index s;
  Eigen::Index t;
  double w;
};
const Term kTerms[] = {{0, 0, 0, 1.0},
                       {1, 1, 1, 1.0 / std::numbers::sqrt2},
                       {1, 2, 2, 1.0 / std::numbers::sqrt2}};

// Plain matrices of a strategy: isometries (2y x 3d) and Psi (d x d).
struct Raw {
  Matrix a;
  Matrix b;
  Matrix psi;
  Eigen::Index d;
  Eigen::Index ya;
  Eigen::Index yb;

  // A_r restricted to input S = s: a (ya x d) block.
  auto a_block(const Term& k) const { return a.block(k.r * ya, k.s * d, ya, d); }
  auto b_block(const Term& k) const { return b.block(k.r * yb, k.t * d, yb, d); }
};

Raw to_raw(const Strategy& s) {
  return Raw{s.alice().matrix(),
             s.bob().matrix(),
             s.shared_matrix(),
             static_cast<Eigen::Index>(s.d()),
             static_cast<Eigen::Index>(s.y_alice()),
             static_cast<Eigen::Index>(s.y_bob())};
}

Strategy from_raw(const Raw& raw) {
  const auto d = static_cast<std::size_t>(raw.d);
  const Matrix psi_t = raw.psi.transpose();
  Vector amps = Eigen::Map<const Vector>(psi_t.data(), psi_t.size());
  PureState shared(SubsystemLayout{{reg::XA, d}, {reg::XB, d}}, amps.normalized());
  LocalIsometry alice({{reg::S, 3}, {reg::XA, d}}, {{reg::A, 2}, {reg::YA, static_cast<std::size_t>(raw.ya)}}, raw.a);
  LocalIsometry bob({{reg::T, 3}, {reg::XB, d}}, {{reg::B, 2}, {reg::YB, static_cast<std::size_t>(raw.yb)}}, raw.b);
  return Strategy(std::move(shared), std::move(alice), std::move(bob));
}

// Omega = (1/2) sum_r A_r (X_r (x) Psi) B_r^T, expanded over the nonzero
// entries of X_r.
Matrix omega_of(const Raw& raw, const Matrix& psi) {
  Matrix om = Matrix::Zero(raw.ya, raw.yb);
  for (const auto& k : kTerms) om.noalias() += (0.5 * k.w) * raw.a_block(k) * psi * raw.b_block(k).transpose();
  return om;
}

double value_of(const Raw& raw) { return omega_of(raw, raw.psi).squaredNorm(); }

Matrix unit_direction(const Matrix& om) {
  const double n = om.norm();
  if (n > 0.0) return om / n;
  Matrix w = Matrix::Ones(om.rows(), om.cols());
  return w / w.norm();
}

// argmax over isometries X of Re tr(X M): X = V U^* from M = U S V^*.
Matrix procrustes(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

void step_alice(Raw& raw) {
  const Matrix w = unit_direction(omega_of(raw, raw.psi));
  Matrix m = Matrix::Zero(3 * raw.d, 2 * raw.ya);
  for (const auto& k : kTerms)
    m.block(k.s * raw.d, k.r * raw.ya, raw.d, raw.ya).noalias() +=
        (0.5 * k.w) * raw.psi * raw.b_block(k).transpose() * w.adjoint();
  raw.a = procrustes(m);
}

void step_bob(Raw& raw) {
  const Matrix w = unit_direction(omega_of(raw, raw.psi));
  Matrix m = Matrix::Zero(3 * raw.d, 2 * raw.yb);
  for (const auto& k : kTerms)
    m.block(k.t * raw.d, k.r * raw.yb, raw.d, raw.yb).noalias() +=
        (0.5 * k.w) * raw.psi.transpose() * raw.a_block(k).transpose() * w.conjugate();
  raw.b = procrustes(m);
}

// Adjoint of Psi -> Omega.
Matrix omega_adjoint(const Raw& raw, const Matrix& w) {
  Matrix out = Matrix::Zero(raw.d, raw.d);
  for (const auto& k : kTerms) out.noalias() += (0.5 * k.w) * raw.a_block(k).adjoint() * w * raw.b_block(k).conjugate();
  return out;
}

constexpr Eigen::Index kDenseShared = 1024;

void step_shared(Raw& raw) {
  const Eigen::Index d = raw.d;
  if (d == 1) return;
  const Eigen::Index d2 = d * d;
  if (d2 <= kDenseShared) {
    // G = L^* L with vec index i * d + j; G = (1/4) sum w w' GA (x) GB.
    Matrix g = Matrix::Zero(d2, d2);
    for (const auto& k : kTerms)
      for (const auto& l : kTerms) {
        const Matrix ga = raw.a_block(k).adjoint() * raw.a_block(l);
        const Matrix gb = raw.b_block(k).adjoint() * raw.b_block(l);
        const double c = 0.25 * k.w * l.w;
        for (Eigen::Index i = 0; i < d; ++i)
          for (Eigen::Index kk = 0; kk < d; ++kk) g.block(i * d, kk * d, d, d) += (c * ga(i, kk)) * gb;
      }
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const Vector v = es.eigenvectors().col(d2 - 1);
    Matrix psi(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) psi(i, j) = v(i * d + j);
    // Only switch when it helps; rounding can otherwise cost 1e-16.
    if (omega_of(raw, psi).squaredNorm() >= value_of(raw)) raw.psi = psi;
    return;
  }
  // Power iteration from the current state: the Rayleigh quotient of a PSD
  // operator never decreases along the iteration.
  Matrix psi = raw.psi / raw.psi.norm();
  double rq = omega_of(raw, psi).squaredNorm();
  for (int it = 0; it < 500; ++it) {
    Matrix next = omega_adjoint(raw, omega_of(raw, psi));
    const double n = next.norm();
    if (n == 0.0) break;
    next /= n;
    const double q = omega_of(raw, next).squaredNorm();
    if (q < rq) break;
    const bool done = q - rq < 1e-15;
    psi = std::move(next);
    rq = q;
    if (done) break;
  }
  raw.psi = psi;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct RestartResult {
  Raw raw;
  std::vector<double> trajectory;
};

RestartResult run_restart(Raw raw, const SeesawConfig& config) {
  RestartResult out{std::move(raw), {}};
  double v = value_of(out.raw);
  out.trajectory.push_back(v);
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    step_alice(out.raw);
    step_bob(out.raw);
    step_shared(out.raw);
    const double next = value_of(out.raw);
    out.trajectory.push_back(next);
    if (next - v < config.tol) break;
    v = next;
  }
  return out;
}

}  // namespace

Strategy random_strategy(std::size_t d, std::size_t y_dim, std::uint64_t seed) {
  if (d == 0 || y_dim == 0) fail(ErrorCode::domain_error, "dimensions must be positive");
  if (2 * y_dim < 3 * d) fail(ErrorCode::domain_error, "need 2 * y_dim >= 3d for an isometry");
  Rng rng(seed);
  PureState shared = random_state(SubsystemLayout{{reg::XA, d}, {reg::XB, d}}, rng);
  const auto rows = static_cast<Eigen::Index>(2 * y_dim);
  const auto cols = static_cast<Eigen::Index>(3 * d);
  LocalIsometry alice({{reg::S, 3}, {reg::XA, d}}, {{reg::A, 2}, {reg::YA, y_dim}}, random_isometry_matrix(rows, cols, rng));
  LocalIsometry bob({{reg::T, 3}, {reg::XB, d}}, {{reg::B, 2}, {reg::YB, y_dim}}, random_isometry_matrix(rows, cols, rng));
  return Strategy(std::move(shared), std::move(alice), std::move(bob));
}

Strategy improve_player(const Strategy& strategy, Player which) {
  Raw raw = to_raw(strategy);
  switch (which) {
    case Player::alice: step_alice(raw); break;
    case Player::bob: step_bob(raw); break;
    case Player::shared: step_shared(raw); break;
  }
  return from_raw(raw);
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(restart)));
}

SeesawReport seesaw(const SeesawConfig& config) {
  if (config.d == 0) fail(ErrorCode::domain_error, "d must be at least 1");
  if (config.restarts == 0 || config.max_iters == 0) fail(ErrorCode::domain_error, "restarts and max_iters must be positive");
  if (!(config.tol > 0.0)) fail(ErrorCode::domain_error, "tol must be positive");
  const std::size_t y = config.y_dim == 0 ? 3 * config.d : config.y_dim;
  if (2 * y < 3 * config.d) fail(ErrorCode::domain_error, "need 2 * y_dim >= 3d for an isometry");
  if (2 * (2 * y) * (2 * y) > kDenseBudget || 18 * config.d * config.d > kDenseBudget)
    fail(ErrorCode::too_large, "see-saw dimensions exceed the dense budget");
  if (config.warm_start && config.warm_start->d() != config.d)
    fail(ErrorCode::dimension_mismatch, "warm start has a different d");

  std::vector<RestartResult> results(config.restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < config.restarts;) {
      Raw start = (r == 0 && config.warm_start) ? to_raw(*config.warm_start)
                                                : to_raw(random_strategy(config.d, y, restart_seed(config.seed, r)));
      results[r] = run_restart(std::move(start), config);
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, config.restarts));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  SeesawReport rep;
  rep.d = config.d;
  rep.seed = config.seed;
  rep.upper_bound = fannes_upper_bound(config.d);
  rep.best_value = -1.0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    const double v = results[r].trajectory.back();
    if (v > rep.best_value) {
      rep.best_value = v;
      rep.best_restart = r;
    }
    rep.trajectories.push_back(std::move(results[r].trajectory));
  }
  rep.best_strategy = from_raw(results[rep.best_restart].raw);
  return rep;
}

}  // namespace cex
