#include "cex/completeness.hpp"

#include <cmath>

#include "cex/error.hpp"
#include "cex/exchange.hpp"
#include "cex/gram.hpp"

namespace cex {

namespace {

std::string prover_label(std::size_t i) { return "P" + std::to_string(i + 1); }

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCode::domain_error, std::string(name) + " must lie in [0, 1]");
}

LocalIsometry cnot(const std::string& control, const std::string& target) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(3, 2) = 1.0;
  m(2, 3) = 1.0;
  std::vector<Subsystem> io{{control, 2}, {target, 2}};
  return LocalIsometry(io, io, std::move(m));
}

std::vector<std::string> copy_labels(const std::string& source, std::size_t m) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= m; ++i) out.push_back(source + std::to_string(i));
  return out;
}

}  // namespace

ProofSystemModel::ProofSystemModel(double p_, double c_, double s_, std::size_t m_, PureState phi0_, PureState phi1_)
    : p(p_), c(c_), s(s_), m(m_), phi0(std::move(phi0_)), phi1(std::move(phi1_)) {
  check_unit(p, "p");
  check_unit(c, "c");
  check_unit(s, "s");
  if (!(s < c)) fail(ErrorCode::domain_error, "soundness must be below completeness");
  if (m == 0) fail(ErrorCode::domain_error, "need at least one prover");
  if (!(phi0.layout() == phi1.layout())) fail(ErrorCode::layout_mismatch, "phi0 and phi1 must share a layout");
  if (phi0.layout().size() != m) fail(ErrorCode::domain_error, "residuals need one register per prover");
  for (std::size_t i = 0; i < m; ++i)
    if (phi0.layout()[i].label != prover_label(i))
      fail(ErrorCode::domain_error, "residual registers must be labelled P1..Pm");
  if (std::abs(inner(phi0, phi1)) > 1e-12) fail(ErrorCode::domain_error, "phi0 and phi1 must be orthogonal");
}

ProofSystemModel ProofSystemModel::canonical(double p, double c, double s, std::size_t m, ResidualSplit split) {
  if (m == 0) fail(ErrorCode::domain_error, "need at least one prover");
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < m; ++i)
    subs.push_back({prover_label(i), (i == 0 || split == ResidualSplit::every_prover) ? std::size_t{2} : 1});
  SubsystemLayout layout(std::move(subs));
  std::vector<std::size_t> zeros(m, 0), ones(m, 0);
  for (std::size_t i = 0; i < m; ++i) ones[i] = layout[i].dim == 2 ? 1 : 0;
  return ProofSystemModel(p, c, s, m, PureState::basis(layout, zeros), PureState::basis(layout, ones));
}

PureState ProofSystemModel::final_state() const {
  const SubsystemLayout layout = SubsystemLayout{{"A", 2}}.concat(phi0.layout());
  const auto half = static_cast<Eigen::Index>(phi0.dim());
  Vector v(2 * half);
  v.head(half) = std::sqrt(1.0 - p) * phi0.amplitudes();
  v.tail(half) = std::sqrt(p) * phi1.amplitudes();
  return PureState(layout, std::move(v));
}

LocalIsometry verifier_rotation(double c, const std::string& label) {
  check_unit(c, "c");
  const double a = std::sqrt(1.0 - c);
  const double b = std::sqrt(c);
  Matrix r(2, 2);
  r << a, b, -b, a;
  std::vector<Subsystem> io{{label, 2}};
  return LocalIsometry(io, io, std::move(r));
}

PureState pseudo_copy(const PureState& state, const std::string& source_label, std::size_t m) {
  const auto src = state.layout().index_of(source_label);
  if (state.layout()[src].dim != 2) fail(ErrorCode::not_a_qubit, "pseudo-copy source '" + source_label + "' is not a qubit");
  if (m == 0) return state;
  const auto copies = copy_labels(source_label, m);
  std::vector<Subsystem> subs;
  for (const auto& l : copies) subs.push_back({l, 2});
  SubsystemLayout fresh(std::move(subs));
  std::vector<std::size_t> zeros(m, 0);
  PureState joint = tensor(state, PureState::basis(fresh, zeros));

  std::vector<std::string> order;
  for (const auto& l : state.layout().labels()) {
    order.push_back(l);
    if (l == source_label) order.insert(order.end(), copies.begin(), copies.end());
  }
  joint = reorder(joint, order);
  for (const auto& l : copies) joint = apply_local(cnot(source_label, l), joint);
  return joint;
}

RoundOutcome run_final_round(const ProofSystemModel& model, std::uint64_t n, Backend backend) {
  if (n == 0) fail(ErrorCode::domain_error, "N must be at least 1");
  RoundOutcome out{.acceptance_probability = 0.0, .n = n, .m = model.m, .backend = backend};

  if (backend == Backend::gram) {
    const double overlap = GramResource(n, 0.0).residual_overlap(Direction::backward);
    const double p = model.p;
    const double c = model.c;
    out.acceptance_probability =
        (1.0 - p) * (1.0 - c) + p * c + 2.0 * std::sqrt(p * (1.0 - p) * c * (1.0 - c)) * overlap;
    return out;
  }
  if (backend != Backend::dense) fail(ErrorCode::backend_unsupported, "unknown backend");

  // Budget: the joint state carries A, its m copies, the residuals and N + 1
  // copies of the residual space.
  const std::size_t budget = kDenseBudget;
  std::size_t total = std::size_t{1} << std::min<std::size_t>(model.m + 1, 62);
  for (std::uint64_t k = 0; k < n + 2; ++k) {
    if (total > budget / model.phi0.dim()) fail(ErrorCode::too_large, "final round exceeds the dense budget");
    total *= model.phi0.dim();
  }
  if (total > budget) fail(ErrorCode::too_large, "final round exceeds the dense budget");

  PureState state = pseudo_copy(model.final_state(), "A", model.m);
  const ExchangeResource resource = build_resource(model.phi0, model.phi1, n, Backend::dense);
  const auto controls = copy_labels("A", model.m);
  state = controlled_exchange(state, resource, controls, Direction::backward);

  for (const auto& l : controls) state = apply_local(cnot("A", l), state);
  state = apply_local(verifier_rotation(model.c, "A"), state);
  std::vector<std::string> measured{"A"};
  measured.insert(measured.end(), controls.begin(), controls.end());
  Vector zero = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << (model.m + 1)));
  zero(0) = 1.0;
  out.acceptance_probability = std::min(1.0, projection_probability(state, measured, zero));
  return out;
}

double yes_acceptance_formula(double c, std::uint64_t n) {
  check_unit(c, "c");
  if (n == 0) fail(ErrorCode::domain_error, "N must be at least 1");
  return 1.0 - 2.0 * c * (1.0 - c) / static_cast<double>(n);
}

std::pair<double, double> no_case_ceiling(double c, double s) {
  check_unit(c, "c");
  check_unit(s, "s");
  if (s > c) fail(ErrorCode::domain_error, "need s <= c");
  const double root = std::sqrt(s * c) + std::sqrt((1.0 - s) * (1.0 - c));
  const double ceiling = root * root;
  const double cap = 1.0 - (c - s) * (c - s);
  if (ceiling > cap + 1e-12) fail(ErrorCode::domain_error, "ceiling exceeds 1 - (c - s)^2");
  return {ceiling, cap};
}

}  // namespace cex
