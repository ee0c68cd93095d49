#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cex/error.hpp"
#include "cex/random.hpp"
#include "cex/statevec.hpp"
#include "oracles.hpp"

using namespace cex;

namespace {

const double h = 1.0 / std::numbers::sqrt2;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no cex::Error raised";
  return ErrorCode::invalid_argument;
}

PureState qutrit_phi() {
  Vector v = Vector::Zero(9);
  v(4) = h;
  v(8) = h;
  return PureState(SubsystemLayout{{"S", 3}, {"T", 3}}, v);
}

}  // namespace

TEST(MakeState, BasisVector) {
  Vector v(2);
  v << 1.0, 0.0;
  const auto s = make_state(SubsystemLayout{{"q", 2}}, v);
  EXPECT_EQ(s.amplitudes()(0), Complex(1.0));
}

TEST(MakeState, RefereeInitialState) {
  Vector v = Vector::Zero(18);
  v(0) = h;
  v.segment(9, 9) = h * qutrit_phi().amplitudes();
  EXPECT_NO_THROW(make_state(SubsystemLayout{{"R", 2}, {"S", 3}, {"T", 3}}, v));
}

TEST(MakeState, RejectsBadNormAndLength) {
  Vector v(2);
  v << 1.0, 1.0;
  EXPECT_EQ(code_of([&] { make_state(SubsystemLayout{{"q", 2}}, v); }), ErrorCode::not_normalized);
  EXPECT_EQ(code_of([&] { make_state(SubsystemLayout{{"q", 3}}, v); }), ErrorCode::length_mismatch);
}

TEST(MakeState, RenormalizesWithinTolerance) {
  Vector v(2);
  v << 1.0 + 1e-10, 0.0;
  const auto s = make_state(SubsystemLayout{{"q", 2}}, v);
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
}

TEST(Layout, RejectsDuplicateLabels) {
  EXPECT_EQ(code_of([] { SubsystemLayout{{"a", 2}, {"a", 2}}; }), ErrorCode::label_clash);
}

TEST(Tensor, ProductOfBasisStates) {
  const auto a = PureState::basis(SubsystemLayout{{"a", 2}}, {0});
  const auto b = PureState::basis(SubsystemLayout{{"b", 2}}, {1});
  const auto ab = tensor(a, b);
  EXPECT_EQ(ab.amplitudes()(1), Complex(1.0));
  EXPECT_EQ(ab.layout().labels(), (std::vector<std::string>{"a", "b"}));
}

TEST(Tensor, SharedLabelClashes) {
  const auto a = PureState::basis(SubsystemLayout{{"a", 2}}, {0});
  EXPECT_EQ(code_of([&] { tensor(a, a); }), ErrorCode::label_clash);
}

TEST(Inner, OrthogonalBasis) {
  const auto z = PureState::basis(SubsystemLayout{{"a", 2}}, {0});
  const auto o = PureState::basis(SubsystemLayout{{"a", 2}}, {1});
  EXPECT_EQ(inner(z, o), Complex(0.0));
  EXPECT_EQ(code_of([&] { inner(z, PureState::basis(SubsystemLayout{{"b", 2}}, {0})); }), ErrorCode::layout_mismatch);
}

TEST(Inner, ConjugateSymmetric) {
  Rng rng(11);
  const SubsystemLayout l{{"a", 3}, {"b", 2}};
  const auto x = random_state(l, rng);
  const auto y = random_state(l, rng);
  EXPECT_NEAR(std::abs(inner(x, y) - std::conj(inner(y, x))), 0.0, 1e-15);
}

TEST(ApplyLocal, MarkingUnitary) {
  Matrix u = Matrix::Zero(6, 6);
  for (int s = 0; s < 3; ++s)
    for (int b = 0; b < 2; ++b) u(2 * s + (b ^ (s != 0)), 2 * s + b) = 1.0;
  const std::vector<Subsystem> io{{"S", 3}, {"A", 2}};
  const LocalIsometry mark(io, io, u);
  const SubsystemLayout l{{"S", 3}, {"A", 2}};
  EXPECT_NEAR(std::abs(apply_local(mark, PureState::basis(l, {1, 0})).amplitude(std::vector<std::size_t>{1, 1})), 1.0, 0);
  EXPECT_NEAR(std::abs(apply_local(mark, PureState::basis(l, {2, 0})).amplitude(std::vector<std::size_t>{2, 1})), 1.0, 0);
  EXPECT_NEAR(std::abs(apply_local(mark, PureState::basis(l, {0, 0})).amplitude(std::vector<std::size_t>{0, 0})), 1.0, 0);
}

TEST(ApplyLocal, IdentityLeavesStateAlone) {
  Rng rng(3);
  const auto s = random_state(SubsystemLayout{{"a", 2}, {"b", 3}, {"c", 2}}, rng);
  const auto t = apply_local(LocalIsometry::identity({{"b", 3}}), s);
  EXPECT_LT((t.amplitudes() - s.amplitudes()).norm(), 1e-15);
}

TEST(ApplyLocal, ActsOnNonAdjacentSubsystemsInListedOrder) {
  // X on "c" conditioned on "a": a CNOT across a spectator.
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1.0;
  const std::vector<Subsystem> io{{"a", 2}, {"c", 2}};
  const SubsystemLayout l{{"a", 2}, {"b", 3}, {"c", 2}};
  const auto out = apply_local(LocalIsometry(io, io, cnot), PureState::basis(l, {1, 2, 0}));
  EXPECT_EQ(out.layout(), l);
  EXPECT_NEAR(std::abs(out.amplitude(std::vector<std::size_t>{1, 2, 1})), 1.0, 0);
}

TEST(ApplyLocal, IsometryReplacesRegisters) {
  // Appends a fresh qubit: (x) -> (x, y) with y = |0>.
  Matrix v = Matrix::Zero(4, 2);
  v(0, 0) = v(2, 1) = 1.0;
  const LocalIsometry append({{"b", 2}}, {{"b", 2}, {"y", 2}}, v);
  const auto s = PureState::basis(SubsystemLayout{{"a", 2}, {"b", 2}}, {0, 1});
  const auto out = apply_local(append, s);
  EXPECT_EQ(out.layout().labels(), (std::vector<std::string>{"a", "b", "y"}));
  EXPECT_NEAR(std::abs(out.amplitude(std::vector<std::size_t>{0, 1, 0})), 1.0, 0);
}

TEST(ApplyLocal, Errors) {
  const auto s = PureState::basis(SubsystemLayout{{"a", 2}}, {0});
  EXPECT_EQ(code_of([&] { apply_local(LocalIsometry::identity({{"z", 2}}), s); }), ErrorCode::unknown_label);
  EXPECT_EQ(code_of([&] { apply_local(LocalIsometry::identity({{"a", 3}}), s); }), ErrorCode::dimension_mismatch);
}

TEST(LocalIsometryCheck, RejectsNonIsometry) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = 2.0;
  EXPECT_EQ(code_of([&] { LocalIsometry({{"a", 2}}, {{"a", 2}}, m); }), ErrorCode::not_an_isometry);
}

TEST(Permute, ForwardCycleOfThree) {
  const SubsystemLayout l{{"x0", 3}, {"x1", 3}, {"x2", 3}};
  const auto s = PureState::basis(l, {0, 1, 2});
  const std::vector<std::string> regs{"x0", "x1", "x2"};
  const auto f = cycle_registers(s, regs, true);
  EXPECT_NEAR(std::abs(f.amplitude(std::vector<std::size_t>{2, 0, 1})), 1.0, 0);
  const auto back = cycle_registers(f, regs, false);
  EXPECT_LT((back.amplitudes() - s.amplitudes()).norm(), 1e-15);
}

TEST(Permute, IdentityAndDimensionCheck) {
  Rng rng(5);
  const auto s = random_state(SubsystemLayout{{"a", 2}, {"b", 2}, {"c", 3}}, rng);
  const std::vector<std::size_t> id{0, 1, 2};
  EXPECT_LT((permute_subsystems(s, id).amplitudes() - s.amplitudes()).norm(), 1e-15);
  const std::vector<std::size_t> bad{2, 1, 0};
  EXPECT_EQ(code_of([&] { permute_subsystems(s, bad); }), ErrorCode::dimension_mismatch);
}

TEST(Reduce, ProductAndEntangled) {
  const auto p = PureState::basis(SubsystemLayout{{"a", 2}, {"b", 2}}, {0, 0});
  const auto r = reduce(p, {"a"});
  EXPECT_NEAR(std::abs(r.matrix()(0, 0) - 1.0), 0.0, 1e-15);

  const auto rho = reduce(qutrit_phi(), {"S"}).matrix();
  Matrix expected = Matrix::Zero(3, 3);
  expected(1, 1) = expected(2, 2) = 0.5;
  EXPECT_LT((rho - expected).norm(), 1e-15);
}

TEST(Reduce, GhzQubitIsMaximallyMixed) {
  Vector g = Vector::Zero(8);
  g(0) = g(7) = h;
  const auto rho = reduce(PureState(SubsystemLayout{{"R", 2}, {"A", 2}, {"B", 2}}, g), {"R"});
  EXPECT_LT((rho.matrix() - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_NEAR(entropy(rho), 1.0, 1e-14);
}

TEST(Reduce, MatchesNaivePartialTraceInRequestedOrder) {
  Rng rng(17);
  const SubsystemLayout l{{"a", 2}, {"b", 3}, {"c", 2}};
  const auto s = random_state(l, rng);
  const auto naive = oracle::partial_trace(s.amplitudes(), {2, 3, 2}, {0, 2});
  EXPECT_LT((reduce(s, {"a", "c"}).matrix() - naive).norm(), 1e-14);
  // Swapping the keep order swaps the tensor factors.
  const auto swapped = reduce(s, {"c", "a"}).matrix();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l2 = 0; l2 < 2; ++l2)
          EXPECT_NEAR(std::abs(swapped(i * 2 + j, k * 2 + l2) - naive(j * 2 + i, l2 * 2 + k)), 0.0, 1e-14);
}

TEST(Entropy, PureMixedAndEntangled) {
  EXPECT_NEAR(entropy(pure_density(qutrit_phi())), 0.0, 1e-12);
  EXPECT_NEAR(entropy(reduce(qutrit_phi(), {"T"})), 1.0, 1e-14);
}

TEST(FidelityTraceDistance, EndPoints) {
  Rng rng(23);
  const auto x = random_state(SubsystemLayout{{"a", 3}}, rng);
  const auto rx = pure_density(x);
  EXPECT_NEAR(fidelity(rx, rx), 1.0, 1e-9);
  EXPECT_NEAR(trace_distance(rx, rx), 0.0, 1e-12);
  const auto z = pure_density(PureState::basis(SubsystemLayout{{"a", 3}}, {0}));
  const auto o = pure_density(PureState::basis(SubsystemLayout{{"a", 3}}, {1}));
  EXPECT_NEAR(fidelity(z, o), 0.0, 1e-12);
  EXPECT_NEAR(trace_distance(z, o), 2.0, 1e-12);
}

TEST(FidelityTraceDistance, PureStatesMatchClosedForms) {
  // F = |<x|y>| and ||xx* - yy*||_1 = 2 sqrt(1 - |<x|y>|^2) for pure states.
  Rng rng(29);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_state(SubsystemLayout{{"a", 3}}, rng);
    const auto y = random_state(SubsystemLayout{{"a", 3}}, rng);
    const double ov = std::abs(inner(x, y));
    EXPECT_NEAR(fidelity(pure_density(x), pure_density(y)), ov, 1e-7);
    EXPECT_NEAR(trace_distance(pure_density(x), pure_density(y)), 2.0 * std::sqrt(1.0 - ov * ov), 1e-12);
  }
}

TEST(DensityOperatorCheck, RejectsInvalid) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_EQ(code_of([&] { DensityOperator(SubsystemLayout{{"a", 2}}, m); }), ErrorCode::invalid_density);
  Matrix n = Matrix::Zero(2, 2);
  n(0, 0) = 1.5;
  n(1, 1) = -0.5;
  EXPECT_EQ(code_of([&] { DensityOperator(SubsystemLayout{{"a", 2}}, n); }), ErrorCode::invalid_density);
}

TEST(Contract, ProjectsOntoListedRegisters) {
  Vector g = Vector::Zero(8);
  g(0) = g(7) = h;
  const auto s = PureState(SubsystemLayout{{"R", 2}, {"A", 2}, {"B", 2}}, g);
  Vector one(2);
  one << 0.0, 1.0;
  const std::vector<std::string> labels{"A"};
  const auto c = contract(s, labels, one);
  EXPECT_EQ(c.layout.labels(), (std::vector<std::string>{"R", "B"}));
  EXPECT_NEAR(std::abs(c.amplitudes(3) - h), 0.0, 1e-15);
  EXPECT_NEAR(projection_probability(s, labels, one), 0.5, 1e-15);
  const std::vector<std::string> missing{"Q"};
  EXPECT_EQ(code_of([&] { contract(s, missing, one); }), ErrorCode::missing_registers);
}

TEST(FuseSplit, RoundTrip) {
  Rng rng(31);
  const auto s = random_state(SubsystemLayout{{"a", 2}, {"b", 3}, {"c", 2}}, rng);
  const std::vector<std::string> bc{"b", "c"};
  const auto f = fuse(s, bc, "bc");
  EXPECT_EQ(f.layout()[1].dim, 6u);
  const auto back = split(f, "bc", {{"b", 3}, {"c", 2}});
  EXPECT_EQ(back.layout(), s.layout());
  EXPECT_LT((back.amplitudes() - s.amplitudes()).norm(), 1e-15);
}
