#include "cex/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "cex/error.hpp"
#include "detail/tensor_ops.hpp"

namespace cex {

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<Subsystem> subsystems)
    : subsystems_(std::move(subsystems)) {
  std::unordered_set<std::string> seen;
  total_dim_ = 1;
  for (const auto& s : subsystems_) {
    if (s.dim < 1) fail(ErrorCode::dimension_mismatch, "subsystem '" + s.label + "' has dimension 0");
    if (!seen.insert(s.label).second) fail(ErrorCode::label_clash, "duplicate label '" + s.label + "'");
    if (total_dim_ > std::numeric_limits<std::size_t>::max() / s.dim)
      fail(ErrorCode::too_large, "layout dimension overflows");
    total_dim_ *= s.dim;
  }
}

SubsystemLayout::SubsystemLayout(std::initializer_list<Subsystem> subsystems)
    : SubsystemLayout(std::vector<Subsystem>(subsystems)) {}

std::vector<std::size_t> SubsystemLayout::dims() const {
  std::vector<std::size_t> out;
  out.reserve(subsystems_.size());
  for (const auto& s : subsystems_) out.push_back(s.dim);
  return out;
}

std::vector<std::string> SubsystemLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(subsystems_.size());
  for (const auto& s : subsystems_) out.push_back(s.label);
  return out;
}

std::optional<std::size_t> SubsystemLayout::find(std::string_view label) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i)
    if (subsystems_[i].label == label) return i;
  return std::nullopt;
}

std::size_t SubsystemLayout::index_of(std::string_view label) const {
  auto i = find(label);
  if (!i) fail(ErrorCode::unknown_label, "no subsystem labelled '" + std::string(label) + "'");
  return *i;
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other) const {
  std::vector<Subsystem> joined = subsystems_;
  joined.insert(joined.end(), other.subsystems_.begin(), other.subsystems_.end());
  return SubsystemLayout(std::move(joined));
}

std::size_t product_dim(std::span<const Subsystem> subsystems) {
  std::size_t d = 1;
  for (const auto& s : subsystems) {
    if (s.dim < 1) fail(ErrorCode::dimension_mismatch, "subsystem '" + s.label + "' has dimension 0");
    if (d > std::numeric_limits<std::size_t>::max() / s.dim) fail(ErrorCode::too_large, "dimension overflows");
    d *= s.dim;
  }
  return d;
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(SubsystemLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim())
    fail(ErrorCode::length_mismatch, "expected " + std::to_string(layout_.total_dim()) + " amplitudes, got " +
                                         std::to_string(amplitudes_.size()));
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance))
    fail(ErrorCode::not_normalized, "state norm is " + std::to_string(norm));
  amplitudes_ /= norm;
}

PureState PureState::basis(SubsystemLayout layout, std::span<const std::size_t> digits) {
  if (digits.size() != layout.size())
    fail(ErrorCode::length_mismatch, "basis state needs one digit per subsystem");
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= layout[i].dim) fail(ErrorCode::dimension_mismatch, "basis digit out of range");
    index = index * layout[i].dim + digits[i];
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(layout), std::move(v));
}

PureState PureState::basis(SubsystemLayout layout, std::initializer_list<std::size_t> digits) {
  return basis(std::move(layout), std::span<const std::size_t>(digits.begin(), digits.size()));
}

Complex PureState::amplitude(std::span<const std::size_t> digits) const {
  if (digits.size() != layout_.size()) fail(ErrorCode::length_mismatch, "one digit per subsystem expected");
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= layout_[i].dim) fail(ErrorCode::dimension_mismatch, "basis digit out of range");
    index = index * layout_[i].dim + digits[i];
  }
  return amplitudes_(static_cast<Eigen::Index>(index));
}

PureState make_state(SubsystemLayout layout, Vector amplitudes) {
  return PureState(std::move(layout), std::move(amplitudes));
}

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(Trusted, SubsystemLayout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {}

DensityOperator::DensityOperator(SubsystemLayout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(layout_.total_dim());
  if (matrix_.rows() != n || matrix_.cols() != n)
    fail(ErrorCode::length_mismatch, "density matrix size does not match layout");
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kDensityTolerance)
    fail(ErrorCode::invalid_density, "matrix is not Hermitian");
  if (std::abs(matrix_.trace() - Complex(1.0)) > kDensityTolerance)
    fail(ErrorCode::invalid_density, "trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kDensityTolerance)
    fail(ErrorCode::invalid_density, "matrix has a negative eigenvalue");
}

Eigen::VectorXd DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0);
}

// ---------------------------------------------------------------------------
// LocalIsometry

LocalIsometry::LocalIsometry(std::vector<Subsystem> inputs, std::vector<Subsystem> outputs, Matrix matrix)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), matrix_(std::move(matrix)) {
  // Label uniqueness on each side.
  (void)SubsystemLayout(inputs_);
  (void)SubsystemLayout(outputs_);
  const auto in_dim = product_dim(inputs_);
  const auto out_dim = product_dim(outputs_);
  if (static_cast<std::size_t>(matrix_.cols()) != in_dim || static_cast<std::size_t>(matrix_.rows()) != out_dim)
    fail(ErrorCode::dimension_mismatch, "isometry matrix is " + std::to_string(matrix_.rows()) + "x" +
                                            std::to_string(matrix_.cols()) + ", expected " +
                                            std::to_string(out_dim) + "x" + std::to_string(in_dim));
  if (out_dim < in_dim) fail(ErrorCode::not_an_isometry, "output dimension smaller than input dimension");
  const Matrix gram = matrix_.adjoint() * matrix_;
  const double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (!(err <= kIsometryTolerance))
    fail(ErrorCode::not_an_isometry, "V^dagger V deviates from identity by " + std::to_string(err));
}

LocalIsometry LocalIsometry::identity(std::vector<Subsystem> subsystems) {
  const auto d = static_cast<Eigen::Index>(product_dim(subsystems));
  auto outputs = subsystems;
  return LocalIsometry(std::move(subsystems), std::move(outputs), Matrix::Identity(d, d));
}

// ---------------------------------------------------------------------------
// Operations

PureState tensor(const PureState& a, const PureState& b) {
  SubsystemLayout layout = a.layout().concat(b.layout());
  const auto& va = a.amplitudes();
  const auto& vb = b.amplitudes();
  Vector out(va.size() * vb.size());
  for (Eigen::Index i = 0; i < va.size(); ++i) out.segment(i * vb.size(), vb.size()) = va(i) * vb;
  return PureState(std::move(layout), std::move(out));
}

Complex inner(const PureState& a, const PureState& b) {
  if (!(a.layout() == b.layout())) fail(ErrorCode::layout_mismatch, "inner product needs identical layouts");
  return a.amplitudes().dot(b.amplitudes());
}

namespace {

std::vector<std::size_t> positions_of(const SubsystemLayout& layout, std::span<const std::string> labels) {
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) {
    const auto p = layout.index_of(l);
    if (std::find(pos.begin(), pos.end(), p) != pos.end())
      fail(ErrorCode::label_clash, "label '" + l + "' listed twice");
    pos.push_back(p);
  }
  return pos;
}

// Axis order that brings `front` first and keeps the others in layout order.
std::vector<std::size_t> front_order(std::size_t n, const std::vector<std::size_t>& front) {
  std::vector<std::size_t> order = front;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(front.begin(), front.end(), i) == front.end()) order.push_back(i);
  return order;
}

std::vector<Subsystem> pick(const SubsystemLayout& layout, const std::vector<std::size_t>& order) {
  std::vector<Subsystem> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(layout[i]);
  return out;
}

}  // namespace

PureState apply_local(const LocalIsometry& op, const PureState& state) {
  const auto& layout = state.layout();
  std::vector<std::size_t> in_pos;
  for (const auto& s : op.inputs()) {
    const auto p = layout.index_of(s.label);
    if (layout[p].dim != s.dim)
      fail(ErrorCode::dimension_mismatch, "subsystem '" + s.label + "' has dimension " +
                                              std::to_string(layout[p].dim) + ", isometry expects " +
                                              std::to_string(s.dim));
    in_pos.push_back(p);
  }
  const auto order = front_order(layout.size(), in_pos);
  const Vector moved = detail::permute_axes(state.amplitudes(), layout.dims(), order);

  const auto in_dim = static_cast<Eigen::Index>(op.input_dim());
  const Eigen::Index rest = moved.size() / in_dim;
  Eigen::Map<const Matrix> x(moved.data(), rest, in_dim);
  Matrix y = x * op.matrix().transpose();

  // Intermediate layout: outputs first, then untouched subsystems.
  std::vector<Subsystem> mid = op.outputs();
  for (std::size_t k = in_pos.size(); k < order.size(); ++k) mid.push_back(layout[order[k]]);
  SubsystemLayout mid_layout(mid);

  // Target layout.
  std::vector<std::string> in_labels, out_labels;
  for (const auto& s : op.inputs()) in_labels.push_back(s.label);
  for (const auto& s : op.outputs()) out_labels.push_back(s.label);
  auto sorted_in = op.inputs();
  auto sorted_out = op.outputs();
  auto by_label = [](const Subsystem& a, const Subsystem& b) { return a.label < b.label; };
  std::sort(sorted_in.begin(), sorted_in.end(), by_label);
  std::sort(sorted_out.begin(), sorted_out.end(), by_label);

  std::vector<std::string> target;
  if (sorted_in == sorted_out) {
    target = layout.labels();
  } else {
    const auto first = *std::min_element(in_pos.begin(), in_pos.end());
    for (std::size_t i = 0; i < layout.size(); ++i) {
      if (i == first) target.insert(target.end(), out_labels.begin(), out_labels.end());
      if (std::find(in_pos.begin(), in_pos.end(), i) == in_pos.end()) target.push_back(layout[i].label);
    }
  }
  Vector flat = Eigen::Map<const Vector>(y.data(), y.size());
  PureState intermediate(std::move(mid_layout), std::move(flat));
  return reorder(intermediate, target);
}

PureState permute_subsystems(const PureState& state, std::span<const std::size_t> sigma) {
  const auto& layout = state.layout();
  const std::size_t n = layout.size();
  if (sigma.size() != n) fail(ErrorCode::length_mismatch, "permutation size does not match layout");
  std::vector<std::size_t> order(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma[i] >= n || order[sigma[i]] != n) fail(ErrorCode::invalid_argument, "not a permutation");
    if (layout[i].dim != layout[sigma[i]].dim)
      fail(ErrorCode::dimension_mismatch, "cannot move '" + layout[i].label + "' into '" +
                                              layout[sigma[i]].label + "' of different dimension");
    order[sigma[i]] = i;
  }
  return PureState(layout, detail::permute_axes(state.amplitudes(), layout.dims(), order));
}

PureState cycle_registers(const PureState& state, std::span<const std::string> labels, bool forward) {
  const auto pos = positions_of(state.layout(), labels);
  std::vector<std::size_t> sigma(state.layout().size());
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  const std::size_t n = pos.size();
  for (std::size_t i = 0; i < n; ++i) sigma[pos[i]] = forward ? pos[(i + 1) % n] : pos[(i + n - 1) % n];
  return permute_subsystems(state, sigma);
}

PureState reorder(const PureState& state, std::span<const std::string> order) {
  const auto& layout = state.layout();
  if (order.size() != layout.size()) fail(ErrorCode::layout_mismatch, "reorder needs every label exactly once");
  const auto pos = positions_of(layout, order);
  bool identity = true;
  for (std::size_t i = 0; i < pos.size(); ++i) identity = identity && pos[i] == i;
  if (identity) return state;
  return PureState(SubsystemLayout(pick(layout, pos)),
                   detail::permute_axes(state.amplitudes(), layout.dims(), pos));
}

PureState relabel(const PureState& state, std::string_view from, std::string to) {
  auto subs = state.layout().subsystems();
  subs[state.layout().index_of(from)].label = std::move(to);
  return PureState(SubsystemLayout(std::move(subs)), state.amplitudes());
}

PureState fuse(const PureState& state, std::span<const std::string> labels, std::string fused) {
  const auto& layout = state.layout();
  if (labels.empty()) fail(ErrorCode::invalid_argument, "nothing to fuse");
  const auto pos = positions_of(layout, labels);
  for (std::size_t i = 1; i < pos.size(); ++i)
    if (pos[i] != pos[0] + i) fail(ErrorCode::invalid_argument, "fused subsystems must be adjacent and in order");
  std::vector<Subsystem> subs;
  std::size_t d = 1;
  for (auto p : pos) d *= layout[p].dim;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i == pos[0]) subs.push_back({std::move(fused), d});
    if (i < pos[0] || i > pos.back()) subs.push_back(layout[i]);
  }
  return PureState(SubsystemLayout(std::move(subs)), state.amplitudes());
}

PureState split(const PureState& state, std::string_view label, std::vector<Subsystem> parts) {
  const auto& layout = state.layout();
  const auto p = layout.index_of(label);
  if (product_dim(parts) != layout[p].dim) fail(ErrorCode::dimension_mismatch, "split parts do not multiply out");
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i == p)
      subs.insert(subs.end(), parts.begin(), parts.end());
    else
      subs.push_back(layout[i]);
  }
  return PureState(SubsystemLayout(std::move(subs)), state.amplitudes());
}

Contraction contract(const PureState& state, std::span<const std::string> labels, const Vector& v) {
  const auto& layout = state.layout();
  std::vector<std::size_t> pos;
  std::size_t k = 1;
  for (const auto& l : labels) {
    auto p = layout.find(l);
    if (!p) fail(ErrorCode::missing_registers, "register '" + l + "' is not part of the state");
    if (std::find(pos.begin(), pos.end(), *p) != pos.end())
      fail(ErrorCode::label_clash, "label '" + l + "' listed twice");
    pos.push_back(*p);
    k *= layout[*p].dim;
  }
  if (static_cast<std::size_t>(v.size()) != k) fail(ErrorCode::length_mismatch, "projection vector has wrong size");
  const auto order = front_order(layout.size(), pos);
  const Vector moved = detail::permute_axes(state.amplitudes(), layout.dims(), order);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::Map<const Matrix> x(moved.data(), moved.size() / kk, kk);
  std::vector<Subsystem> rest;
  for (std::size_t i = pos.size(); i < order.size(); ++i) rest.push_back(layout[order[i]]);
  return {SubsystemLayout(std::move(rest)), x * v.conjugate()};
}

double projection_probability(const PureState& state, std::span<const std::string> labels, const Vector& v) {
  return contract(state, labels, v).amplitudes.squaredNorm();
}

DensityOperator reduce(const PureState& state, std::span<const std::string> keep) {
  const auto& layout = state.layout();
  if (keep.empty()) fail(ErrorCode::invalid_argument, "reduce needs at least one subsystem to keep");
  const auto pos = positions_of(layout, keep);
  const auto order = front_order(layout.size(), pos);
  const Vector moved = detail::permute_axes(state.amplitudes(), layout.dims(), order);
  SubsystemLayout kept(pick(layout, pos));
  const auto k = static_cast<Eigen::Index>(kept.total_dim());
  Eigen::Map<const Matrix> x(moved.data(), moved.size() / k, k);
  Matrix rho = x.transpose() * x.conjugate();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(DensityOperator::Trusted{}, std::move(kept), std::move(rho));
}

DensityOperator reduce(const PureState& state, std::initializer_list<std::string> keep) {
  return reduce(state, std::span<const std::string>(keep.begin(), keep.size()));
}

DensityOperator pure_density(const PureState& state) {
  const auto labels = state.layout().labels();
  return reduce(state, labels);
}

double entropy(const DensityOperator& rho) {
  double s = 0.0;
  const auto ev = rho.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double l = ev(i);
    if (l > kEntropyCutoff) s -= l * std::log2(l);
  }
  return s;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.layout() == sigma.layout())) fail(ErrorCode::layout_mismatch, "fidelity needs identical layouts");
  const double f = trace_norm(psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix()));
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.layout() == sigma.layout())) fail(ErrorCode::layout_mismatch, "trace distance needs identical layouts");
  return trace_norm(rho.matrix() - sigma.matrix());
}

}  // namespace cex
