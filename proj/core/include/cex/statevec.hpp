#pragma once

// Dense multipartite pure states and density operators.
//
// Index convention: the leftmost subsystem of a layout is the slowest-varying
// index of the amplitude vector. Logarithms are base 2 throughout, so a
// maximally entangled qubit pair carries one bit of entanglement entropy.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cex {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kIsometryTolerance = 1e-12;
inline constexpr double kDensityTolerance = 1e-12;
inline constexpr double kEntropyCutoff = 1e-14;

struct Subsystem {
  std::string label;
  std::size_t dim = 1;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  explicit SubsystemLayout(std::vector<Subsystem> subsystems);
  SubsystemLayout(std::initializer_list<Subsystem> subsystems);

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }
  bool empty() const { return subsystems_.empty(); }
  std::size_t total_dim() const { return total_dim_; }
  const Subsystem& operator[](std::size_t i) const { return subsystems_[i]; }

  std::vector<std::size_t> dims() const;
  std::vector<std::string> labels() const;
  std::optional<std::size_t> find(std::string_view label) const;
  /// Throws UnknownLabel.
  std::size_t index_of(std::string_view label) const;
  bool contains(std::string_view label) const { return find(label).has_value(); }

  /// Concatenation; LabelClash when a label appears on both sides.
  SubsystemLayout concat(const SubsystemLayout& other) const;

  friend bool operator==(const SubsystemLayout&, const SubsystemLayout&) = default;

 private:
  std::vector<Subsystem> subsystems_;
  std::size_t total_dim_ = 1;
};

class PureState {
 public:
  /// Validates length and norm (within kNormTolerance) and renormalizes.
  PureState(SubsystemLayout layout, Vector amplitudes);

  static PureState basis(SubsystemLayout layout, std::span<const std::size_t> digits);
  static PureState basis(SubsystemLayout layout, std::initializer_list<std::size_t> digits);

  const SubsystemLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  Complex amplitude(std::span<const std::size_t> digits) const;

 private:
  SubsystemLayout layout_;
  Vector amplitudes_;
};

class DensityOperator {
 public:
  /// Validates Hermiticity, unit trace and eigenvalues >= -kDensityTolerance.
  DensityOperator(SubsystemLayout layout, Matrix matrix);

  const SubsystemLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }

  /// Eigenvalues in ascending order, clipped at zero.
  Eigen::VectorXd eigenvalues() const;

 private:
  struct Trusted {};
  DensityOperator(Trusted, SubsystemLayout layout, Matrix matrix);
  friend DensityOperator reduce(const PureState&, std::span<const std::string>);

  SubsystemLayout layout_;
  Matrix matrix_;
};

/// A linear isometry from the product space of `inputs` into the product
/// space of `outputs`. Rows index outputs, columns index inputs, each with
/// the first listed subsystem slowest.
class LocalIsometry {
 public:
  LocalIsometry(std::vector<Subsystem> inputs, std::vector<Subsystem> outputs, Matrix matrix);

  static LocalIsometry identity(std::vector<Subsystem> subsystems);

  const std::vector<Subsystem>& inputs() const { return inputs_; }
  const std::vector<Subsystem>& outputs() const { return outputs_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t input_dim() const { return static_cast<std::size_t>(matrix_.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  bool is_square() const { return matrix_.rows() == matrix_.cols(); }

 private:
  std::vector<Subsystem> inputs_;
  std::vector<Subsystem> outputs_;
  Matrix matrix_;
};

std::size_t product_dim(std::span<const Subsystem> subsystems);

PureState make_state(SubsystemLayout layout, Vector amplitudes);

PureState tensor(const PureState& a, const PureState& b);

/// <a|b>, conjugate-linear in `a`. LayoutMismatch unless layouts are equal.
Complex inner(const PureState& a, const PureState& b);

/// Applies `op` to its input subsystems and leaves every other subsystem
/// untouched. When the outputs are the inputs (same labels and dims) the
/// layout is unchanged; otherwise the outputs are inserted, in order, where
/// the first input subsystem stood and the other inputs are removed.
PureState apply_local(const LocalIsometry& op, const PureState& state);

/// Moves register contents: the content of position i ends up at position
/// `sigma[i]`, so basis state |x_0 ... x_{n-1}> becomes
/// |x_{sigma^-1(0)} ... x_{sigma^-1(n-1)}>. Labels stay in place, hence every
/// position must have the same dimension as its destination.
PureState permute_subsystems(const PureState& state, std::span<const std::size_t> sigma);

/// Same register-content move restricted to the listed registers: the content
/// of labels[i] moves to labels[(i + 1) % n] for a forward cycle.
PureState cycle_registers(const PureState& state, std::span<const std::string> labels, bool forward);

/// Reorders the layout so that subsystems appear in `order` (a permutation of
/// the current labels). The abstract vector is unchanged.
PureState reorder(const PureState& state, std::span<const std::string> order);

/// Renames one subsystem.
PureState relabel(const PureState& state, std::string_view from, std::string to);

/// Fuses adjacent subsystems into a single subsystem of the product dimension.
PureState fuse(const PureState& state, std::span<const std::string> labels, std::string fused);

/// Inverse of `fuse`: splits one subsystem into consecutive parts.
PureState split(const PureState& state, std::string_view label, std::vector<Subsystem> parts);

/// (<v| (x) I)|state> with v a vector over `labels` (in that order): the
/// unnormalized remainder over the other subsystems, in layout order.
struct Contraction {
  SubsystemLayout layout;
  Vector amplitudes;
};
Contraction contract(const PureState& state, std::span<const std::string> labels, const Vector& v);

/// Squared norm of (<v| (x) I)|state>, with v a vector over `labels` (in that
/// order). MissingRegisters when a label is absent.
double projection_probability(const PureState& state, std::span<const std::string> labels,
                              const Vector& v);

/// Partial trace keeping `keep` (in the given order).
DensityOperator reduce(const PureState& state, std::span<const std::string> keep);
DensityOperator reduce(const PureState& state, std::initializer_list<std::string> keep);

DensityOperator pure_density(const PureState& state);

/// Von Neumann entropy in bits.
double entropy(const DensityOperator& rho);

/// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

/// Unnormalized trace norm || rho - sigma ||_1, in [0, 2].
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// Positive semidefinite square root via eigendecomposition.
Matrix psd_sqrt(const Matrix& m);

/// Sum of singular values.
double trace_norm(const Matrix& m);

}  // namespace cex
