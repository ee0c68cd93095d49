#include "cex/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cex/error.hpp"
#include "cex/gram.hpp"
#include "detail/tensor_ops.hpp"

namespace cex {

std::string_view to_string(ExchangeMethod method) {
  switch (method) {
    case ExchangeMethod::orthogonal: return "orthogonal";
    case ExchangeMethod::direct_nonorthogonal: return "direct_nonorthogonal";
    case ExchangeMethod::via_intermediate: return "via_intermediate";
  }
  return "unknown";
}

std::string resource_label(const std::string& base, std::uint64_t slot, const std::string& tag) {
  if (slot == 0) return base;
  return base + "." + tag + std::to_string(slot);
}

std::vector<std::string> ExchangeResource::player_registers(std::size_t player) const {
  if (player >= players()) fail(ErrorCode::invalid_argument, "player index out of range");
  const auto& base = phi.layout()[player].label;
  std::vector<std::string> regs{base};
  if (method == ExchangeMethod::via_intermediate) {
    for (const auto& stage : stages) {
      auto more = stage.player_registers(player);
      regs.insert(regs.end(), more.begin() + 1, more.end());
    }
    return regs;
  }
  for (std::uint64_t slot = 1; slot <= n + 1; ++slot) regs.push_back(resource_label(base, slot, tag));
  return regs;
}

namespace {

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

std::size_t checked_power(std::size_t base, std::uint64_t exponent, std::size_t limit) {
  std::size_t v = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && v > limit / base) return limit + 1;
    v *= base;
  }
  return v;
}

// Sum_{k=first}^{last} phi^{(x)k} psi~^{(x)(slots-k)} over `slots` slot-major
// copies of the player space, then regrouped per player.
PureState structured_sum(const ExchangeResource& r, std::uint64_t first, std::uint64_t last, std::uint64_t slots) {
  const auto& phi = r.phi.amplitudes();
  const auto& psi = r.psi_tilde.amplitudes();
  // Horner form: G_j = psi~^{(x)j} + phi (x) G_{j-1} restricted to the
  // admissible phi-counts.
  std::vector<Vector> psi_pow(slots + 1);
  psi_pow[0] = Vector::Ones(1);
  for (std::uint64_t j = 1; j <= slots; ++j) psi_pow[j] = kron(psi, psi_pow[j - 1]);
  std::vector<Vector> phi_pow(slots + 1);
  phi_pow[0] = Vector::Ones(1);
  for (std::uint64_t j = 1; j <= slots; ++j) phi_pow[j] = kron(phi, phi_pow[j - 1]);

  Vector sum;
  for (std::uint64_t k = first; k <= last; ++k) {
    Vector term = kron(phi_pow[k], psi_pow[slots - k]);
    if (sum.size() == 0)
      sum = std::move(term);
    else
      sum += term;
  }

  std::vector<Subsystem> slot_major;
  std::vector<std::string> player_major;
  const auto& players = r.phi.layout();
  for (std::uint64_t slot = 1; slot <= slots; ++slot)
    for (const auto& p : players.subsystems()) slot_major.push_back({resource_label(p.label, slot, r.tag), p.dim});
  for (const auto& p : players.subsystems())
    for (std::uint64_t slot = 1; slot <= slots; ++slot) player_major.push_back(resource_label(p.label, slot, r.tag));

  const double norm = sum.norm();
  if (norm == 0.0) fail(ErrorCode::domain_error, "resource superposition vanishes");
  sum /= norm;
  return reorder(PureState(SubsystemLayout(std::move(slot_major)), std::move(sum)), player_major);
}

void require_dense_budget(const SubsystemLayout& players, std::uint64_t slots) {
  if (checked_power(players.total_dim(), slots, kDenseBudget) > kDenseBudget)
    fail(ErrorCode::too_large, "dense resource with " + std::to_string(slots) + " slots exceeds the dense budget");
}

void require_joint_budget(std::size_t outer, const PureState& resource) {
  if (outer > kDenseBudget / resource.dim())
    fail(ErrorCode::too_large, "state with the resource attached exceeds the dense budget");
}

// Applies `fn` to the block of `state` where `control` reads 1.
template <typename Fn>
PureState on_control_one(const PureState& state, const std::string& control, Fn&& fn) {
  const auto& layout = state.layout();
  const auto c = layout.index_of(control);
  std::vector<std::size_t> order{c};
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (i != c) order.push_back(i);
  Vector moved = detail::permute_axes(state.amplitudes(), layout.dims(), order);
  const Eigen::Index half = moved.size() / 2;
  std::vector<std::size_t> rest_dims;
  for (std::size_t k = 1; k < order.size(); ++k) rest_dims.push_back(layout[order[k]].dim);
  Vector block = moved.segment(half, half);
  moved.segment(half, half) = fn(block, rest_dims, order);
  std::vector<std::size_t> inverse(order.size());
  std::vector<std::size_t> moved_dims;
  for (auto i : order) moved_dims.push_back(layout[i].dim);
  for (std::size_t k = 0; k < order.size(); ++k) inverse[order[k]] = k;
  return PureState(layout, detail::permute_axes(moved, moved_dims, inverse));
}

// Axis order realizing a register-content cycle on `positions` of a tensor
// with `n` axes.
std::vector<std::size_t> cycle_order(std::size_t n, const std::vector<std::size_t>& positions, bool forward) {
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  const auto m = positions.size();
  for (std::size_t i = 0; i < m; ++i)
    sigma[positions[i]] = forward ? positions[(i + 1) % m] : positions[(i + m - 1) % m];
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[sigma[i]] = i;
  return order;
}

PureState controlled_cycle(const PureState& state, const std::string& control,
                           const std::vector<std::string>& registers, bool forward) {
  return on_control_one(state, control,
                        [&](const Vector& block, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& order) -> Vector {
                          std::vector<std::size_t> pos;
                          for (const auto& r : registers) {
                            const auto p = state.layout().index_of(r);
                            const auto it = std::find(order.begin() + 1, order.end(), p);
                            pos.push_back(static_cast<std::size_t>(it - order.begin()) - 1);
                          }
                          return detail::permute_axes(block, dims, cycle_order(dims.size(), pos, forward));
                        });
}

PureState controlled_phase(const PureState& state, const std::string& control, Complex phase) {
  return on_control_one(state, control,
                        [&](const Vector& block, const std::vector<std::size_t>&,
                            const std::vector<std::size_t>&) -> Vector { return phase * block; });
}

PureState global_phase(const PureState& state, Complex phase) {
  return PureState(state.layout(), phase * state.amplitudes());
}

void check_dims(const PureState& state, const ExchangeResource& r) {
  for (const auto& p : r.phi.layout().subsystems()) {
    const auto i = state.layout().index_of(p.label);
    if (state.layout()[i].dim != p.dim)
      fail(ErrorCode::dimension_mismatch, "register '" + p.label + "' has the wrong dimension");
  }
}

// One orthogonal or direct stage, in place on a state already holding the
// resource registers. `controls` empty means unconditional.
PureState run_stage(PureState state, const ExchangeResource& r, const std::vector<std::string>& controls,
                    Direction direction) {
  const bool forward = direction == Direction::forward;
  const Complex phase = std::polar(1.0, forward ? r.theta : -r.theta);
  const bool has_phase = r.theta != 0.0;
  auto apply_phase = [&](PureState s) {
    if (!has_phase) return s;
    return controls.empty() ? global_phase(s, phase) : controlled_phase(s, controls.front(), phase);
  };
  if (!forward) state = apply_phase(std::move(state));
  for (std::size_t i = 0; i < r.players(); ++i) {
    const auto regs = r.player_registers(i);
    if (controls.empty())
      state = cycle_registers(state, regs, forward);
    else
      state = controlled_cycle(state, controls[i], regs, forward);
  }
  if (forward) state = apply_phase(std::move(state));
  return state;
}

PureState run_exchange(PureState state, const ExchangeResource& r, const std::vector<std::string>& controls,
                       Direction direction) {
  if (r.method != ExchangeMethod::via_intermediate) return run_stage(std::move(state), r, controls, direction);
  if (direction == Direction::forward) {
    for (const auto& stage : r.stages) state = run_stage(std::move(state), stage, controls, direction);
  } else {
    for (auto it = r.stages.rbegin(); it != r.stages.rend(); ++it)
      state = run_stage(std::move(state), *it, controls, direction);
  }
  return state;
}

}  // namespace

ExchangeResource build_resource(const PureState& phi, const PureState& psi, std::uint64_t n, Backend backend,
                                std::string tag) {
  if (!(phi.layout() == psi.layout())) fail(ErrorCode::layout_mismatch, "phi and psi must share a layout");
  if (n < 1) fail(ErrorCode::domain_error, "N must be at least 1");
  const Complex ov = inner(phi, psi);
  const double a = std::min(1.0, std::abs(ov));
  if (a >= 1.0 - kIdenticalTolerance)
    fail(ErrorCode::identical_states, "phi and psi coincide up to phase; the exchange is a phase");
  const double theta = a > 0.0 ? std::arg(ov) : 0.0;
  PureState psi_tilde(psi.layout(), std::polar(1.0, -theta) * psi.amplitudes());

  ExchangeResource r{
      .phi = phi,
      .psi = psi,
      .n = n,
      .a = a,
      .theta = theta,
      .psi_tilde = std::move(psi_tilde),
      .n1 = GramResource(n, a).normalization(),
      .method = a == 0.0 ? ExchangeMethod::orthogonal : ExchangeMethod::direct_nonorthogonal,
      .tag = std::move(tag),
      .state = std::nullopt,
      .stages = {},
  };
  if (backend == Backend::dense) {
    require_dense_budget(phi.layout(), n + 1);
    r.state = structured_sum(r, 1, n, n + 1);
  }
  return r;
}

PureState forward_residual(const ExchangeResource& resource) {
  if (resource.method == ExchangeMethod::via_intermediate)
    return tensor(forward_residual(resource.stages[0]), forward_residual(resource.stages[1]));
  require_dense_budget(resource.phi.layout(), resource.n + 1);
  return structured_sum(resource, 2, resource.n + 1, resource.n + 1);
}

LocalIsometry shift_isometry(const ExchangeResource& resource, std::size_t player, Direction direction) {
  if (resource.method == ExchangeMethod::via_intermediate)
    fail(ErrorCode::invalid_argument, "shift_isometry acts on a single-stage resource");
  const auto regs = resource.player_registers(player);
  const auto dim = resource.phi.layout()[player].dim;
  const auto total = checked_power(dim, regs.size(), 4096);
  if (total > 4096) fail(ErrorCode::too_large, "shift permutation matrix too large to materialize");

  std::vector<Subsystem> subs;
  for (const auto& l : regs) subs.push_back({l, dim});
  const std::size_t slots = regs.size();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  std::vector<std::size_t> digits(slots), moved(slots);
  for (std::size_t in = 0; in < total; ++in) {
    std::size_t rem = in;
    for (std::size_t s = slots; s-- > 0;) {
      digits[s] = rem % dim;
      rem /= dim;
    }
    for (std::size_t s = 0; s < slots; ++s) {
      if (direction == Direction::forward)
        moved[(s + 1) % slots] = digits[s];
      else
        moved[(s + slots - 1) % slots] = digits[s];
    }
    std::size_t out = 0;
    for (std::size_t s = 0; s < slots; ++s) out = out * dim + moved[s];
    m(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)) = 1.0;
  }
  auto outs = subs;
  return LocalIsometry(std::move(subs), std::move(outs), std::move(m));
}

ExchangeOutcome exchange(const PureState& input, const ExchangeResource& resource, Direction direction) {
  const bool forward = direction == Direction::forward;
  const PureState& source = forward ? resource.phi : resource.psi;
  const PureState& target = forward ? resource.psi : resource.phi;
  if (!(input.layout() == source.layout())) fail(ErrorCode::layout_mismatch, "input layout differs from phi/psi");
  const double in_fid = std::norm(inner(source, input));
  if (in_fid < 1.0 - kInputFidelityTolerance)
    fail(ErrorCode::wrong_input, "input is not the declared " + std::string(forward ? "phi" : "psi") +
                                     " (fidelity " + std::to_string(in_fid) + ")");

  if (!resource.is_dense()) {
    // Gram path: the shifted registers hold the target exactly; only the
    // catalyst overlap needs computing.
    double overlap = 1.0;
    if (resource.method == ExchangeMethod::via_intermediate) {
      for (const auto& stage : resource.stages) overlap *= GramResource(stage.n, stage.a).residual_overlap(direction);
    } else {
      overlap = GramResource(resource.n, resource.a).residual_overlap(direction);
    }
    return {.output_state = target, .residual_state = std::nullopt, .residual_overlap = overlap,
            .output_fidelity = 1.0};
  }

  require_joint_budget(input.dim(), *resource.state);
  const PureState joint = run_exchange(tensor(input, *resource.state), resource, {}, direction);

  const auto out_labels = resource.phi.layout().labels();
  const DensityOperator rho = reduce(joint, out_labels);
  const Vector& t = target.amplitudes();
  const double out_fid = std::real(t.dot(rho.matrix() * t));

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  Vector u = es.eigenvectors().col(es.eigenvectors().cols() - 1);
  const Complex c = t.dot(u);
  if (std::abs(c) > 0.0) u *= std::conj(c) / std::abs(c);

  auto rest = contract(joint, out_labels, u);
  const double rest_norm = rest.amplitudes.norm();
  PureState residual(std::move(rest.layout), rest.amplitudes / rest_norm);
  const double overlap = std::real(inner(residual, *resource.state));
  return {.output_state = PureState(target.layout(), u),
          .residual_state = std::move(residual),
          .residual_overlap = overlap,
          .output_fidelity = out_fid};
}

PureState controlled_exchange(const PureState& joint, const ExchangeResource& resource,
                              const std::vector<std::string>& control_labels, Direction direction) {
  if (control_labels.size() != resource.players())
    fail(ErrorCode::control_dim_mismatch, "need exactly one control qubit per player");
  for (const auto& c : control_labels) {
    const auto i = joint.layout().index_of(c);
    if (joint.layout()[i].dim != 2) fail(ErrorCode::control_dim_mismatch, "control '" + c + "' is not a qubit");
  }
  check_dims(joint, resource);
  if (!resource.is_dense())
    fail(ErrorCode::backend_unsupported, "controlled exchange needs a dense resource state");
  require_joint_budget(joint.dim(), *resource.state);
  return run_exchange(tensor(joint, *resource.state), resource, control_labels, direction);
}

PureState orthogonal_intermediate(const PureState& phi, const PureState& psi) {
  if (!(phi.layout() == psi.layout())) fail(ErrorCode::layout_mismatch, "phi and psi must share a layout");
  const auto dim = static_cast<Eigen::Index>(phi.layout().total_dim());
  if (dim < 3) fail(ErrorCode::dimension_too_small, "an intermediate state needs dimension >= 3");
  std::vector<Vector> basis{phi.amplitudes()};
  Vector v = psi.amplitudes() - phi.amplitudes().dot(psi.amplitudes()) * phi.amplitudes();
  if (v.norm() > 1e-12) basis.push_back(v.normalized());
  for (Eigen::Index e = 0; e < dim; ++e) {
    Vector cand = Vector::Zero(dim);
    cand(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) cand -= b.dot(cand) * b;
    if (cand.norm() > 1e-6) return PureState(phi.layout(), cand.normalized());
  }
  fail(ErrorCode::dimension_too_small, "no state orthogonal to both phi and psi");
}

ExchangeResource build_intermediate_resource(const PureState& phi, const PureState& psi, std::uint64_t n,
                                             Backend backend) {
  const PureState eta = orthogonal_intermediate(phi, psi);
  ExchangeResource first = build_resource(phi, eta, n, backend, "e");
  ExchangeResource second = build_resource(eta, psi, n, backend, "f");
  const Complex ov = inner(phi, psi);
  const double a = std::min(1.0, std::abs(ov));
  const double theta = a > 0.0 ? std::arg(ov) : 0.0;
  std::optional<PureState> joined;
  if (backend == Backend::dense) {
    if (first.state->dim() > kDenseBudget / second.state->dim())
      fail(ErrorCode::too_large, "joined intermediate resource exceeds the dense budget");
    joined = tensor(*first.state, *second.state);
  }
  return ExchangeResource{
      .phi = phi,
      .psi = psi,
      .n = n,
      .a = a,
      .theta = theta,
      .psi_tilde = PureState(psi.layout(), std::polar(1.0, -theta) * psi.amplitudes()),
      .n1 = static_cast<double>(n),
      .method = ExchangeMethod::via_intermediate,
      .tag = {},
      .state = std::move(joined),
      .stages = {std::move(first), std::move(second)},
  };
}

}  // namespace cex
