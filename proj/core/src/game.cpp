#include "cex/game.hpp"

#include <cmath>
#include <numbers>

#include "cex/error.hpp"
#include "cex/exchange.hpp"
#include "cex/gram.hpp"

namespace cex {

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// 3^e when it stays within `limit`, otherwise 0.
std::size_t power_of_three(std::uint64_t e, std::size_t limit) {
  std::size_t v = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (v > limit / 3) return 0;
    v *= 3;
  }
  return v;
}

// Referee branch matrices X_0 = |00> and X_1 = phi, as 3 x 3 (S, T) matrices.
Matrix referee_branch(int r) {
  Matrix x = Matrix::Zero(3, 3);
  if (r == 0) {
    x(0, 0) = 1.0;
  } else {
    x(1, 1) = kInvSqrt2;
    x(2, 2) = kInvSqrt2;
  }
  return x;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Mark the answer on s != 0 and, when marked, forward-shift the n + 2 qutrit
// slots (S, X_1, ..., X_{n+1}).
Matrix prescribed_isometry(std::uint64_t n, std::size_t d) {
  const std::size_t in_dim = 3 * d;
  const std::size_t slots = n + 2;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(2 * in_dim), static_cast<Eigen::Index>(in_dim));
  std::vector<std::size_t> digits(slots), moved(slots);
  for (std::size_t in = 0; in < in_dim; ++in) {
    std::size_t row = in;
    if (in >= d) {
      std::size_t rem = in;
      for (std::size_t s = slots; s-- > 0;) {
        digits[s] = rem % 3;
        rem /= 3;
      }
      for (std::size_t s = 0; s < slots; ++s) moved[(s + 1) % slots] = digits[s];
      std::size_t out = 0;
      for (std::size_t s = 0; s < slots; ++s) out = out * 3 + moved[s];
      row = in_dim + out;
    }
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(in)) = 1.0;
  }
  return m;
}

void expect(const std::vector<Subsystem>& got, const std::vector<Subsystem>& want, const char* what) {
  if (got.size() != want.size()) fail(ErrorCode::dimension_mismatch, std::string(what) + ": wrong register count");
  for (std::size_t i = 0; i < got.size(); ++i)
    if (got[i].label != want[i].label || (want[i].dim != 0 && got[i].dim != want[i].dim))
      fail(ErrorCode::dimension_mismatch, std::string(what) + ": expected register '" + want[i].label + "' of dim " +
                                              std::to_string(want[i].dim));
}

}  // namespace

GameSpec GameSpec::standard() {
  SubsystemLayout st{{reg::S, 3}, {reg::T, 3}};
  Vector phi = Vector::Zero(9);
  phi(4) = kInvSqrt2;
  phi(8) = kInvSqrt2;

  SubsystemLayout rst{{reg::R, 2}, {reg::S, 3}, {reg::T, 3}};
  Vector init = Vector::Zero(18);
  init(0) = kInvSqrt2;
  init.segment(9, 9) = kInvSqrt2 * phi;

  SubsystemLayout rab{{reg::R, 2}, {reg::A, 2}, {reg::B, 2}};
  Vector gamma = Vector::Zero(8);
  gamma(0) = kInvSqrt2;
  gamma(7) = kInvSqrt2;

  return GameSpec{rst, PureState(st, phi), PureState(rst, init), PureState(rab, gamma)};
}

Strategy::Strategy(PureState shared_state, LocalIsometry alice, LocalIsometry bob) {
  const auto& layout = shared_state.layout();
  if (layout.size() != 2 || layout[0].label != reg::XA || layout[1].label != reg::XB)
    fail(ErrorCode::dimension_mismatch, "shared state must live on (XA, XB)");
  if (layout[0].dim != layout[1].dim) fail(ErrorCode::dimension_mismatch, "XA and XB must have equal dimension");
  const std::size_t d = layout[0].dim;
  expect(alice.inputs(), {{reg::S, 3}, {reg::XA, d}}, "alice inputs");
  expect(alice.outputs(), {{reg::A, 2}, {reg::YA, 0}}, "alice outputs");
  expect(bob.inputs(), {{reg::T, 3}, {reg::XB, d}}, "bob inputs");
  expect(bob.outputs(), {{reg::B, 2}, {reg::YB, 0}}, "bob outputs");
  d_ = d;
  log2_d_ = std::log2(static_cast<double>(d));
  shared_ = std::move(shared_state);
  alice_ = std::move(alice);
  bob_ = std::move(bob);
}

Strategy Strategy::prescribed(std::uint64_t n) {
  if (n < 1) fail(ErrorCode::domain_error, "N must be at least 1");
  Strategy s;
  s.prescribed_n_ = n;
  s.log2_d_ = static_cast<double>(n + 1) * std::log2(3.0);
  const std::size_t d = power_of_three(n + 1, kDenseBudget);
  if (d == 0 || 2 * (6 * d) * (6 * d) > kDenseBudget) return s;

  const GameSpec spec = GameSpec::standard();
  const SubsystemLayout st = spec.phi.layout();
  const PureState zero = PureState::basis(st, {0, 0});
  const ExchangeResource res = build_resource(spec.phi, zero, n, Backend::dense);
  std::vector<std::string> a_regs, b_regs;
  for (std::uint64_t slot = 1; slot <= n + 1; ++slot) {
    a_regs.push_back(resource_label(reg::S, slot));
    b_regs.push_back(resource_label(reg::T, slot));
  }
  PureState shared = fuse(fuse(*res.state, a_regs, reg::XA), b_regs, reg::XB);

  Matrix iso = prescribed_isometry(n, d);
  LocalIsometry alice({{reg::S, 3}, {reg::XA, d}}, {{reg::A, 2}, {reg::YA, 3 * d}}, iso);
  LocalIsometry bob({{reg::T, 3}, {reg::XB, d}}, {{reg::B, 2}, {reg::YB, 3 * d}}, std::move(iso));
  Strategy out(std::move(shared), std::move(alice), std::move(bob));
  out.prescribed_n_ = n;
  return out;
}

std::size_t Strategy::y_alice() const { return alice().outputs()[1].dim; }
std::size_t Strategy::y_bob() const { return bob().outputs()[1].dim; }

const PureState& Strategy::shared_state() const {
  if (!shared_) fail(ErrorCode::too_large, "strategy is too large to materialize densely");
  return *shared_;
}
const LocalIsometry& Strategy::alice() const {
  if (!alice_) fail(ErrorCode::too_large, "strategy is too large to materialize densely");
  return *alice_;
}
const LocalIsometry& Strategy::bob() const {
  if (!bob_) fail(ErrorCode::too_large, "strategy is too large to materialize densely");
  return *bob_;
}

Matrix Strategy::shared_matrix() const {
  const auto d = static_cast<Eigen::Index>(d_);
  // Row-major amplitudes (XA slowest) read as a column-major d x d matrix
  // give the transpose.
  return Eigen::Map<const Matrix>(shared_state().amplitudes().data(), d, d).transpose();
}

Matrix Strategy::alice_branch(int r) const {
  const auto y = static_cast<Eigen::Index>(y_alice());
  return alice().matrix().middleRows(r * y, y);
}

Matrix Strategy::bob_branch(int r) const {
  const auto y = static_cast<Eigen::Index>(y_bob());
  return bob().matrix().middleRows(r * y, y);
}

double referee_outcome_probability(const PureState& returned) {
  for (const auto& l : {reg::R, reg::A, reg::B})
    if (!returned.layout().contains(l)) fail(ErrorCode::missing_registers, "returned state lacks register '" + l + "'");
  const GameSpec spec = GameSpec::standard();
  const std::vector<std::string> labels{reg::R, reg::A, reg::B};
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (returned.layout()[returned.layout().index_of(labels[i])].dim != 2)
      fail(ErrorCode::dimension_mismatch, "register '" + labels[i] + "' must be a qubit");
  return std::min(1.0, projection_probability(returned, labels, spec.accept_vector.amplitudes()));
}

LocalIsometry marking_unitary(const std::string& input, const std::string& answer) {
  Matrix u = Matrix::Zero(6, 6);
  for (int s = 0; s < 3; ++s)
    for (int b = 0; b < 2; ++b) u(2 * s + (b ^ (s != 0 ? 1 : 0)), 2 * s + b) = 1.0;
  std::vector<Subsystem> io{{input, 3}, {answer, 2}};
  return LocalIsometry(io, io, std::move(u));
}

Strategy prescribed_strategy(std::uint64_t n) { return Strategy::prescribed(n); }

PureState final_state(const Strategy& strategy) {
  if (!strategy.is_materialized())
    fail(ErrorCode::too_large, "strategy exceeds the dense budget of " + std::to_string(kDenseBudget) + " amplitudes");
  const std::size_t d = strategy.d();
  const std::size_t before = 18 * d * d;
  const std::size_t after = 2 * (2 * strategy.y_alice()) * (2 * strategy.y_bob());
  if (before > kDenseBudget || after > kDenseBudget)
    fail(ErrorCode::too_large, "final state exceeds the dense budget of " + std::to_string(kDenseBudget) + " amplitudes");
  const GameSpec spec = GameSpec::standard();
  PureState s = tensor(spec.initial_state, strategy.shared_state());
  s = apply_local(strategy.alice(), s);
  return apply_local(strategy.bob(), s);
}

double play(const Strategy& strategy, Backend backend) {
  if (backend == Backend::gram) {
    const auto n = strategy.prescribed_n();
    if (!n) fail(ErrorCode::unsupported_strategy, "gram evaluation covers prescribed strategies only");
    return prescribed_value(*n);
  }
  return referee_outcome_probability(final_state(strategy));
}

double win_probability_from_branches(const Strategy& strategy) {
  const Matrix psi = strategy.shared_matrix();
  Matrix omega = Matrix::Zero(static_cast<Eigen::Index>(strategy.y_alice()),
                              static_cast<Eigen::Index>(strategy.y_bob()));
  for (int r = 0; r < 2; ++r)
    omega += strategy.alice_branch(r) * kron(referee_branch(r), psi) * strategy.bob_branch(r).transpose();
  return 0.25 * omega.squaredNorm();
}

double prescribed_value(std::uint64_t n) {
  return 0.5 + 0.5 * GramResource(n, 0.0).residual_overlap(Direction::forward);
}

double fannes_upper_bound_from_log2(double log2_d) {
  const double l = std::log2(3.0) + log2_d;
  return 1.0 - 1.0 / (32.0 * l * l);
}

double fannes_upper_bound(std::size_t d) {
  if (d == 0) fail(ErrorCode::domain_error, "d must be at least 1");
  return fannes_upper_bound_from_log2(std::log2(static_cast<double>(d)));
}

BoundChainReport bound_chain_check(const Strategy& strategy, const LocalIsometry& u_a, const LocalIsometry& u_b,
                                   double tolerance) {
  for (const auto* u : {&u_a, &u_b})
    if (!u->is_square() || u->inputs() != u->outputs())
      fail(ErrorCode::not_unitary, "bound chain needs unitaries acting in place");
  const std::size_t d = strategy.d();
  expect(u_a.inputs(), {{reg::S, 3}, {reg::XA, d}}, "U_A");
  expect(u_b.inputs(), {{reg::T, 3}, {reg::XB, d}}, "U_B");

  const GameSpec spec = GameSpec::standard();
  const PureState x = tensor(spec.phi, strategy.shared_state());
  const PureState zz = tensor(PureState::basis(spec.phi.layout(), {0, 0}), strategy.shared_state());
  const PureState y = apply_local(u_b, apply_local(u_a, zz));

  const DensityOperator rho = reduce(x, {reg::S, reg::XA});
  const DensityOperator xi = reduce(y, {reg::S, reg::XA});

  BoundChainReport rep;
  rep.overlap = std::abs(inner(x, y));
  rep.fidelity = fidelity(rho, xi);
  rep.trace_norm = trace_distance(rho, xi);
  rep.cap = std::sqrt(std::max(0.0, 1.0 - 0.25 * rep.trace_norm * rep.trace_norm));
  rep.entropy_rho = entropy(rho);
  rep.entropy_xi = entropy(xi);
  rep.entropy_deficit = rep.entropy_rho - rep.entropy_xi;
  rep.overlap_le_fidelity = rep.overlap <= rep.fidelity + tolerance;
  rep.fidelity_le_cap = rep.fidelity <= rep.cap + tolerance;
  return rep;
}

}  // namespace cex
