// Seeded randomized properties. Every case draws from its own
// splitmix-derived stream, so a failure names the seed that reproduces it.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cex/completeness.hpp"
#include "cex/exchange.hpp"
#include "cex/game.hpp"
#include "cex/gram.hpp"
#include "cex/optimizer.hpp"
#include "cex/random.hpp"
#include "oracles.hpp"

using namespace cex;

namespace {

constexpr int kCases = 100;

struct Gen {
  std::uint64_t state;

  explicit Gen(std::uint64_t seed) : state(seed * 0x9e3779b97f4a7c15ull + 0x1234567ull) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  Rng rng() { return Rng(next()); }

  SubsystemLayout layout(std::size_t max_parts, std::size_t max_dim) {
    const std::size_t parts = 1 + below(max_parts);
    std::vector<Subsystem> s;
    for (std::size_t i = 0; i < parts; ++i) s.push_back({"r" + std::to_string(i), 1 + below(max_dim)});
    return SubsystemLayout(std::move(s));
  }
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[below(i)]);
    return p;
  }
};

}  // namespace

TEST(Property, ApplyLocalPreservesNorm) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(c);
    const auto l = g.layout(4, 3);
    auto rng = g.rng();
    const auto s = random_state(l, rng);
    std::vector<Subsystem> acted{l[g.below(l.size())]};
    const auto out = apply_local(random_unitary(acted, rng), s);
    EXPECT_NEAR(out.amplitudes().norm(), 1.0, 1e-12) << "case " << c;
  }
}

TEST(Property, EntropyInvariantUnderLocalUnitaries) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(1000 + c);
    const auto l = g.layout(4, 3);
    if (l.size() < 2) continue;
    auto rng = g.rng();
    const auto s = random_state(l, rng);
    const std::size_t cut = 1 + g.below(l.size() - 1);
    std::vector<std::string> keep;
    std::vector<Subsystem> inside, outside;
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (i < cut) {
        keep.push_back(l[i].label);
        inside.push_back(l[i]);
      } else {
        outside.push_back(l[i]);
      }
    }
    const double before = entropy(reduce(s, keep));
    EXPECT_NEAR(entropy(reduce(apply_local(random_unitary(inside, rng), s), keep)), before, 1e-10) << "case " << c;
    EXPECT_NEAR(entropy(reduce(apply_local(random_unitary(outside, rng), s), keep)), before, 1e-10) << "case " << c;
  }
}

TEST(Property, ReduceMatchesOracle) {
  for (int c = 0; c < 30; ++c) {
    Gen g(2000 + c);
    const auto l = g.layout(4, 3);
    auto rng = g.rng();
    const auto s = random_state(l, rng);
    std::vector<std::size_t> keep;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < l.size(); ++i)
      if (g.below(2) == 0) {
        keep.push_back(i);
        labels.push_back(l[i].label);
      }
    if (keep.empty()) continue;
    EXPECT_LT((reduce(s, labels).matrix() - oracle::partial_trace(s.amplitudes(), l.dims(), keep)).norm(), 1e-13)
        << "case " << c;
  }
}

TEST(Property, FidelityChainOnRandomPairs) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(3000 + c);
    auto rng = g.rng();
    const SubsystemLayout l{{"x", 3}};
    const auto x = random_state(l, rng);
    const auto y = random_state(l, rng);
    const auto rx = pure_density(x), ry = pure_density(y);
    const double ov = std::abs(inner(x, y));
    const double f = fidelity(rx, ry);
    const double td = trace_distance(rx, ry);
    EXPECT_LE(ov, f + 1e-9) << "case " << c;
    EXPECT_LE(f, std::sqrt(std::max(0.0, 1.0 - 0.25 * td * td)) + 1e-9) << "case " << c;
  }
}

TEST(Property, FidelityChainOnMixedReductions) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(3500 + c);
    auto rng = g.rng();
    const SubsystemLayout l{{"x", 3}, {"e", 2}};
    const auto x = random_state(l, rng);
    const auto y = random_state(l, rng);
    const double ov = std::abs(inner(x, y));
    const double f = fidelity(reduce(x, {"x"}), reduce(y, {"x"}));
    const double td = trace_distance(reduce(x, {"x"}), reduce(y, {"x"}));
    EXPECT_LE(ov, f + 1e-9) << "case " << c;
    EXPECT_LE(f, std::sqrt(std::max(0.0, 1.0 - 0.25 * td * td)) + 1e-9) << "case " << c;
  }
}

TEST(Property, InnerSymmetricAndPermutationInvariant) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(4000 + c);
    const auto l = g.layout(4, 3);
    auto rng = g.rng();
    const auto a = random_state(l, rng);
    const auto b = random_state(l, rng);
    EXPECT_NEAR(std::abs(inner(a, b) - std::conj(inner(b, a))), 0.0, 1e-14);
    const auto order = g.permutation(l.size());
    std::vector<std::string> labels;
    for (auto i : order) labels.push_back(l[i].label);
    EXPECT_NEAR(std::abs(inner(reorder(a, labels), reorder(b, labels))), std::abs(inner(a, b)), 1e-14)
        << "case " << c;
  }
}

TEST(Property, OverlapNoWorseThanOrthogonal) {
  for (std::uint64_t n = 1; n <= 200; ++n)
    for (int i = 0; i < 50; ++i) {
      const double a = i / 50.0;
      EXPECT_GE(overlap_formula(n, a), 1.0 - 1.0 / double(n) - 1e-15) << n << " " << a;
      const double n1 = normalization_N1(n, a);
      EXPECT_GE(n1, double(n) - 1e-9);
      EXPECT_LE(n1, double(n) * double(n) + 1e-9);
    }
}

TEST(Property, RandomPairExchangeMatchesFormula) {
  // Random qubit-pair phi, psi: dense residual overlap equals the closed form
  // and the output is the target.
  for (int c = 0; c < 20; ++c) {
    Gen g(5000 + c);
    auto rng = g.rng();
    const SubsystemLayout l{{"A", 2}, {"B", 2}};
    const auto phi = random_state(l, rng);
    const auto psi = random_state(l, rng);
    const std::uint64_t n = 1 + g.below(4);
    const auto r = build_resource(phi, psi, n);
    const auto out = exchange(phi, r);
    EXPECT_NEAR(out.residual_overlap, overlap_formula(n, r.a), 1e-12) << "case " << c;
    EXPECT_NEAR(out.output_fidelity, 1.0, 1e-12) << "case " << c;
    EXPECT_NEAR(std::abs(inner(out.output_state, psi)), 1.0, 1e-12) << "case " << c;
    const auto back = exchange(psi, r, Direction::backward);
    EXPECT_NEAR(back.residual_overlap, overlap_formula(n, r.a), 1e-12) << "case " << c;
  }
}

TEST(Property, DenseGameValuesRespectTheBound) {
  for (int c = 0; c < 40; ++c) {
    Gen g(6000 + c);
    const std::size_t d = 1 + g.below(3);
    const auto s = random_strategy(d, 3 * d, g.next());
    const double v = play(s);
    EXPECT_LE(v, fannes_upper_bound(d) + 1e-9) << "case " << c;
    EXPECT_NEAR(v, oracle::game_value(s.alice().matrix(), s.bob().matrix(), s.shared_matrix()), 1e-12);
  }
}

TEST(Property, EntropyDeficitIsOneBit) {
  for (int c = 0; c < 30; ++c) {
    Gen g(7000 + c);
    const std::size_t d = 1 + g.below(4);
    auto rng = g.rng();
    const auto s = random_strategy(d, 3 * d, g.next());
    const auto ua = random_unitary({{reg::S, 3}, {reg::XA, d}}, rng);
    const auto ub = random_unitary({{reg::T, 3}, {reg::XB, d}}, rng);
    const auto rep = bound_chain_check(s, ua, ub);
    EXPECT_NEAR(rep.entropy_deficit, 1.0, 1e-10) << "case " << c;
    EXPECT_TRUE(rep.overlap_le_fidelity && rep.fidelity_le_cap) << "case " << c;
  }
}

TEST(Property, SeesawTrajectoriesMonotone) {
  for (int c = 0; c < 5; ++c) {
    Gen g(8000 + c);
    SeesawConfig cfg;
    cfg.d = 1 + g.below(2);
    cfg.restarts = 3;
    cfg.max_iters = 50;
    cfg.seed = g.next();
    const auto rep = seesaw(cfg);
    for (const auto& t : rep.trajectories)
      for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i], t[i - 1] - 1e-12) << "case " << c;
    EXPECT_LE(rep.best_value, fannes_upper_bound(cfg.d) + 1e-9);
  }
}

TEST(Property, CompletenessNoCaseUnderCeiling) {
  for (int c = 0; c < 60; ++c) {
    Gen g(9000 + c);
    const double cc = 0.05 + 0.9 * g.unit();
    const double s = cc * g.unit();
    const double p = s * g.unit();
    const std::uint64_t n = 1 + g.below(3);
    const auto model = ProofSystemModel::canonical(p, cc, s, 2);
    const auto [ceiling, cap] = no_case_ceiling(cc, s);
    EXPECT_LE(run_final_round(model, n).acceptance_probability, ceiling + 1e-10) << "case " << c;
    EXPECT_LE(ceiling, cap + 1e-12) << "case " << c;
  }
}
