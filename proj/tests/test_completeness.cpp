#include <gtest/gtest.h>

#include <cmath>

#include "cex/completeness.hpp"
#include "cex/error.hpp"
#include "cex/gram.hpp"
#include "oracles.hpp"

using namespace cex;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no cex::Error raised";
  return ErrorCode::invalid_argument;
}

// Acceptance built from the definitions: the verifier's rotation maps the
// honest (A, E) state to sqrt((1-p)(1-c)) <E| + sqrt(pc) <E'| on the
// accepting projector, so the probability is the squared norm of that
// combination with <E|E'> from the explicit double sum.
double acceptance_oracle(double p, double c, std::uint64_t n) {
  double ov = 0.0;
  for (std::uint64_t j = 1; j <= n; ++j)
    for (std::uint64_t k = 0; k + 1 <= n; ++k) ov += (j == k) ? 1.0 : 0.0;
  ov /= double(n);
  const double x = std::sqrt((1 - p) * (1 - c)), y = std::sqrt(p * c);
  return x * x + y * y + 2 * x * y * ov;
}

}  // namespace

TEST(Rotation, MapsAsDocumented) {
  const auto r = verifier_rotation(0.36);
  EXPECT_NEAR(r.matrix()(0, 0).real(), 0.8, 1e-15);
  EXPECT_NEAR(r.matrix()(1, 0).real(), -0.6, 1e-15);
  EXPECT_NEAR(r.matrix()(0, 1).real(), 0.6, 1e-15);
  EXPECT_NEAR(r.matrix()(1, 1).real(), 0.8, 1e-15);
}

TEST(PseudoCopy, FansOutTheQubit) {
  const SubsystemLayout l{{"A", 2}, {"P1", 2}};
  Vector v(4);
  v << 0.6, 0.0, 0.8, 0.0;
  const auto out = pseudo_copy(PureState(l, v), "A", 2);
  EXPECT_EQ(out.layout().labels(), (std::vector<std::string>{"A", "A1", "A2", "P1"}));
  EXPECT_NEAR(std::abs(out.amplitude(std::vector<std::size_t>{0, 0, 0, 0})), 0.6, 1e-15);
  EXPECT_NEAR(std::abs(out.amplitude(std::vector<std::size_t>{1, 1, 1, 0})), 0.8, 1e-15);
  const auto q = PureState::basis(SubsystemLayout{{"A", 3}}, {0});
  EXPECT_EQ(code_of([&] { pseudo_copy(q, "A", 2); }), ErrorCode::not_a_qubit);
}

TEST(Model, Validation) {
  EXPECT_EQ(code_of([] { ProofSystemModel::canonical(0.5, 0.5, 0.5, 2); }), ErrorCode::domain_error);
  EXPECT_EQ(code_of([] { ProofSystemModel::canonical(1.2, 0.5, 0.1, 2); }), ErrorCode::domain_error);
  const auto m = ProofSystemModel::canonical(0.5, 0.5, 0.1, 3, ResidualSplit::every_prover);
  EXPECT_EQ(m.final_state().layout().labels(), (std::vector<std::string>{"A", "P1", "P2", "P3"}));
}

TEST(YesFormula, Examples) {
  EXPECT_NEAR(yes_acceptance_formula(0.5, 1), 0.5, 1e-15);
  EXPECT_NEAR(yes_acceptance_formula(0.5, 10), 0.95, 1e-15);
  for (double c : {0.1, 0.5, 0.9})
    for (std::uint64_t n = 1; n < 50; ++n) {
      EXPECT_GT(yes_acceptance_formula(c, n + 1), yes_acceptance_formula(c, n));
      EXPECT_GE(yes_acceptance_formula(c, n), 1.0 - 1.0 / (2.0 * n) - 1e-15);
    }
}

TEST(NoCase, Examples) {
  auto [ceiling, cap] = no_case_ceiling(0.9, 0.5);
  EXPECT_NEAR(ceiling, 0.8, 1e-12);
  EXPECT_NEAR(cap, 0.84, 1e-12);
  std::tie(ceiling, cap) = no_case_ceiling(1.0, 0.0);
  EXPECT_NEAR(ceiling, 0.0, 1e-15);
  EXPECT_NEAR(cap, 0.0, 1e-15);
}

TEST(FinalRound, DenseGramFormulaAgree) {
  for (double c : {0.25, 0.5, 0.9})
    for (std::uint64_t n = 1; n <= 4; ++n) {
      double first = -1.0;
      for (std::size_t m : {2u, 3u}) {
        const auto model = ProofSystemModel::canonical(c, c, 0.0, m);
        const double dense = run_final_round(model, n).acceptance_probability;
        const double gram = run_final_round(model, n, Backend::gram).acceptance_probability;
        EXPECT_NEAR(dense, yes_acceptance_formula(c, n), 1e-10);
        EXPECT_NEAR(gram, dense, 1e-10);
        EXPECT_NEAR(dense, acceptance_oracle(c, c, n), 1e-10);
        if (first < 0) first = dense;
        EXPECT_NEAR(dense, first, 1e-12);
      }
    }
}

TEST(FinalRound, EveryProverSplitAgrees) {
  const auto model = ProofSystemModel::canonical(0.5, 0.5, 0.0, 2, ResidualSplit::every_prover);
  EXPECT_NEAR(run_final_round(model, 2).acceptance_probability, 0.75, 1e-10);
}

TEST(FinalRound, NoCaseStaysUnderCeiling) {
  for (double c : {0.6, 0.9})
    for (double s : {0.1, 0.4})
      for (int i = 0; i <= 8; ++i) {
        const double p = s * i / 8.0;
        const auto model = ProofSystemModel::canonical(p, c, s, 2);
        const auto [ceiling, cap] = no_case_ceiling(c, s);
        for (std::uint64_t n : {1u, 3u}) {
          const double acc = run_final_round(model, n).acceptance_probability;
          EXPECT_LE(acc, ceiling + 1e-10) << c << " " << s << " " << p;
          EXPECT_NEAR(acc, acceptance_oracle(p, c, n), 1e-10);
        }
        EXPECT_LE(ceiling, cap + 1e-15);
      }
}

TEST(FinalRound, Errors) {
  const auto model = ProofSystemModel::canonical(0.5, 0.5, 0.0, 2);
  EXPECT_EQ(code_of([&] { run_final_round(model, 0); }), ErrorCode::domain_error);
}
