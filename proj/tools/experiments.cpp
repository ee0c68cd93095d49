#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "cex/completeness.hpp"
#include "cex/embezzle.hpp"
#include "cex/error.hpp"
#include "cex/exchange.hpp"
#include "cex/game.hpp"
#include "cex/gram.hpp"
#include "cex/optimizer.hpp"
#include "cex/random.hpp"

namespace cex::tools {

namespace {

// ---------------------------------------------------------------------------
// Parameter access

const Json* find(const Json& p, const char* key) {
  if (!p.is_object()) throw ParamError("parameters must be a JSON object");
  auto it = p.find(key);
  return it == p.end() || it->is_null() ? nullptr : &*it;
}

double real_param(const Json& p, const char* key, std::optional<double> def = {}) {
  const Json* v = find(p, key);
  if (!v) {
    if (def) return *def;
    throw ParamError(std::string("missing parameter '") + key + "'");
  }
  if (!v->is_number()) throw ParamError(std::string("parameter '") + key + "' must be a number");
  return v->get<double>();
}

std::uint64_t uint_param(const Json& p, const char* key, std::optional<std::uint64_t> def = {}) {
  const Json* v = find(p, key);
  if (!v) {
    if (def) return *def;
    throw ParamError(std::string("missing parameter '") + key + "'");
  }
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v->get<std::int64_t>());
  throw ParamError(std::string("parameter '") + key + "' must be a non-negative integer");
}

std::string string_param(const Json& p, const char* key, std::optional<std::string> def = {}) {
  const Json* v = find(p, key);
  if (!v) {
    if (def) return *def;
    throw ParamError(std::string("missing parameter '") + key + "'");
  }
  if (v->is_string()) return v->get<std::string>();
  if (v->is_number_unsigned() || v->is_number_integer()) return v->dump();
  if (v->is_number_float()) return format_double(v->get<double>());
  throw ParamError(std::string("parameter '") + key + "' must be a string");
}

std::uint64_t positive(std::uint64_t v, const char* key) {
  if (v == 0) throw ParamError(std::string("parameter '") + key + "' must be positive");
  return v;
}

Backend backend_param(const Json& p, const char* def) {
  const auto name = string_param(p, "backend", std::string(def));
  if (name != "dense" && name != "gram") throw ParamError("backend must be 'dense' or 'gram'");
  return parse_backend(name);
}

std::vector<std::size_t> dims_param(const Json& p, std::size_t m) {
  const Json* v = find(p, "dims");
  std::vector<std::size_t> dims;
  if (!v) {
    dims.assign(m, 2);
  } else if (v->is_array()) {
    for (const auto& e : *v) {
      if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() > 0))
        throw ParamError("dims must be positive integers");
      dims.push_back(e.get<std::size_t>());
    }
  } else if (v->is_string()) {
    for (auto x : parse_int_range(v->get<std::string>())) dims.push_back(static_cast<std::size_t>(x));
  } else {
    throw ParamError("dims must be an array or a comma list");
  }
  if (dims.size() != m) throw ParamError("dims must list one dimension per party");
  return dims;
}

void check(Record& rec, bool ok, const std::string& what) {
  if (!ok) rec.failures.push_back(what);
}

Json uint_or_null(double log2_value) {
  if (log2_value < 53.0) return static_cast<std::uint64_t>(std::llround(std::exp2(log2_value)));
  return nullptr;
}

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------
// Experiments

// phi = (|11> + |22>)/sqrt(2) on a qutrit pair and psi with <phi|psi> = a.
std::pair<PureState, PureState> qutrit_pair(double a) {
  const GameSpec spec = GameSpec::standard();
  const PureState zero = PureState::basis(spec.phi.layout(), {0, 0});
  Vector psi = a * spec.phi.amplitudes() + std::sqrt(std::max(0.0, 1.0 - a * a)) * zero.amplitudes();
  return {spec.phi, PureState(spec.phi.layout(), psi)};
}

Record exchange_experiment(const Json& p, const RunOptions& opt) {
  const auto n = positive(uint_param(p, "N"), "N");
  const double a = real_param(p, "a", 0.0);
  if (!(a >= 0.0 && a <= 1.0)) throw ParamError("a must lie in [0, 1]");
  const Backend backend = backend_param(p, "dense");
  const auto dir_name = string_param(p, "direction", std::string("forward"));
  if (dir_name != "forward" && dir_name != "backward") throw ParamError("direction must be forward or backward");
  const Direction direction = parse_direction(dir_name);
  const auto method = string_param(p, "method", std::string("direct"));
  if (method != "direct" && method != "intermediate") throw ParamError("method must be direct or intermediate");

  Record rec;
  rec.json = {{"kind", "exchange"}, {"N", n},           {"a", a},
              {"backend", to_string(backend)}, {"direction", dir_name}, {"method", method}};
  const auto [phi, psi] = qutrit_pair(a);
  const PureState& input = direction == Direction::forward ? phi : psi;

  if (a >= 1.0 - kIdenticalTolerance) {
    rec.json["method"] = "phase_only";
    rec.json["residual_overlap"] = 1.0;
    rec.json["output_fidelity"] = 1.0;
    return rec;
  }

  if (method == "intermediate") {
    const ExchangeResource res = build_intermediate_resource(phi, psi, n, backend);
    const ExchangeOutcome out = exchange(input, res, direction);
    const double floor = (1.0 - 1.0 / static_cast<double>(n)) * (1.0 - 1.0 / static_cast<double>(n));
    const double composed = overlap_formula(n, res.stages[0].a) * overlap_formula(n, res.stages[1].a);
    rec.json["residual_overlap"] = out.residual_overlap;
    rec.json["composed_formula"] = composed;
    rec.json["abs_diff"] = std::abs(out.residual_overlap - composed);
    rec.json["overlap_floor"] = floor;
    rec.json["output_fidelity"] = out.output_fidelity;
    check(rec, std::abs(out.residual_overlap - composed) <= 1e-12, "composed overlap differs from the product formula");
    check(rec, out.residual_overlap >= floor - 1e-12, "composed overlap below (1 - 1/N)^2");
    check(rec, out.output_fidelity >= 1.0 - 1e-12, "output differs from the target");
    if (opt.dump_state) rec.json["output_state"] = state_to_json(out.output_state);
    return rec;
  }

  const ExchangeResource res = build_resource(phi, psi, n, backend);
  const ExchangeOutcome out = exchange(input, res, direction);
  const double formula = overlap_formula(n, res.a);
  rec.json["n1"] = res.n1;
  rec.json["residual_overlap"] = out.residual_overlap;
  rec.json["overlap_formula"] = formula;
  rec.json["abs_diff"] = std::abs(out.residual_overlap - formula);
  rec.json["output_fidelity"] = out.output_fidelity;
  check(rec, std::abs(out.residual_overlap - formula) <= 1e-12, "residual overlap differs from the closed form");
  check(rec, formula >= 1.0 - 1.0 / static_cast<double>(n) - 1e-12, "overlap below 1 - 1/N");
  check(rec, out.output_fidelity >= 1.0 - 1e-12, "output differs from the target");
  if (opt.dump_state) {
    rec.json["output_state"] = state_to_json(out.output_state);
    if (out.residual_state) rec.json["residual_state"] = state_to_json(*out.residual_state);
    if (backend == Backend::gram && n <= 4096) rec.json["gram_matrix"] = matrix_to_json(GramResource(n, res.a).gram_matrix());
  }
  return rec;
}

Record game_play_experiment(const Json& p, const RunOptions& opt) {
  const auto n = positive(uint_param(p, "N"), "N");
  const Backend backend = backend_param(p, "gram");
  const Strategy s = prescribed_strategy(n);
  const double win = play(s, backend);
  const double closed = 1.0 - 1.0 / (2.0 * static_cast<double>(n));
  const double bound = fannes_upper_bound_from_log2(s.log2_d());
  const double tol = backend == Backend::dense ? 1e-10 : 1e-12;

  Record rec;
  rec.json = {{"kind", "game-play"}, {"N", n}, {"backend", to_string(backend)}, {"win_probability", win},
              {"closed_form", closed},  {"abs_diff", std::abs(win - closed)},   {"d", uint_or_null(s.log2_d())},
              {"log2_d", s.log2_d()},   {"upper_bound", bound}};
  if (s.is_materialized() && s.d() <= 243) {
    const std::vector<Subsystem> ua{{reg::S, 3}, {reg::XA, s.d()}};
    const std::vector<Subsystem> ub{{reg::T, 3}, {reg::XB, s.d()}};
    const auto rep = bound_chain_check(s, LocalIsometry::identity(ua), LocalIsometry::identity(ub));
    rec.json["entropy_deficit"] = rep.entropy_deficit;
    check(rec, std::abs(rep.entropy_deficit - 1.0) <= 1e-10, "entropy deficit differs from 1");
  } else {
    rec.json["entropy_deficit"] = nullptr;
  }
  check(rec, std::abs(win - closed) <= tol, "win probability differs from 1 - 1/(2N)");
  check(rec, win <= bound + 1e-9, "win probability exceeds the dimension bound");
  if (opt.dump_state && s.is_materialized()) rec.json["shared_state"] = state_to_json(s.shared_state());
  return rec;
}

Record game_bound_experiment(const Json& p) {
  Record rec;
  if (find(p, "log2_d")) {
    const double l = real_param(p, "log2_d");
    if (!(l >= 0.0)) throw ParamError("log2_d must be non-negative");
    rec.json = {{"kind", "game-bound"}, {"log2_d", l}, {"upper_bound", fannes_upper_bound_from_log2(l)}};
    return rec;
  }
  const auto d = positive(uint_param(p, "d"), "d");
  rec.json = {{"kind", "game-bound"}, {"d", d}, {"upper_bound", fannes_upper_bound(d)}};
  return rec;
}

SeesawConfig seesaw_config(const Json& p, const RunOptions& opt) {
  SeesawConfig c;
  c.d = positive(uint_param(p, "d"), "d");
  c.restarts = positive(uint_param(p, "restarts", 20), "restarts");
  c.max_iters = positive(uint_param(p, "max_iters", 500), "max_iters");
  c.tol = real_param(p, "tol", 1e-9);
  if (!(c.tol > 0.0)) throw ParamError("tol must be positive");
  c.y_dim = uint_param(p, "y_dim", 0);
  c.seed = opt.seed;
  c.jobs = opt.jobs;
  if (find(p, "warm_start_N")) {
    const auto wn = positive(uint_param(p, "warm_start_N"), "warm_start_N");
    Strategy w = prescribed_strategy(wn);
    if (!w.is_materialized() || w.d() != c.d) throw ParamError("warm_start_N must satisfy d = 3^(N+1)");
    if (c.y_dim == 0) c.y_dim = w.y_alice();
    c.warm_start = std::move(w);
  }
  return c;
}

Json strategy_json(const Strategy& s) {
  return {{"shared_state", state_to_json(s.shared_state())},
          {"alice", matrix_to_json(s.alice().matrix())},
          {"bob", matrix_to_json(s.bob().matrix())}};
}

Record game_optimize_experiment(const Json& p, const RunOptions& opt) {
  const SeesawConfig config = seesaw_config(p, opt);
  const SeesawReport rep = seesaw(config);
  Record rec;
  Json iters = Json::array();
  bool monotone = true;
  for (const auto& t : rep.trajectories) {
    iters.push_back(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i)
      if (t[i] < t[i - 1] - 1e-12) monotone = false;
  }
  rec.json = {{"kind", "game-optimize"},
              {"d", rep.d},
              {"best_value", rep.best_value},
              {"value_kind", "best_found"},
              {"upper_bound", rep.upper_bound},
              {"restarts", config.restarts},
              {"best_restart", rep.best_restart},
              {"iterations_per_restart", std::move(iters)},
              {"seed", rep.seed}};
  check(rec, rep.best_value <= rep.upper_bound + 1e-9, "see-saw value exceeds the dimension bound");
  check(rec, rep.best_value < 1.0, "see-saw value reached 1");
  check(rec, monotone, "see-saw trajectory decreased");
  if (opt.dump_state) rec.json["best_strategy"] = strategy_json(*rep.best_strategy);
  return rec;
}

Record chain_check_experiment(const Json& p, const RunOptions& opt) {
  const auto draws = positive(uint_param(p, "draws", 100), "draws");
  const auto d_max = positive(uint_param(p, "d_max", 4), "d_max");
  double worst_overlap = -2.0, worst_cap = -2.0, worst_deficit = 0.0;
  bool all = true;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const std::size_t d = 1 + static_cast<std::size_t>(i % d_max);
    const std::uint64_t seed = restart_seed(opt.seed, static_cast<std::size_t>(i));
    const Strategy s = random_strategy(d, 3 * d, seed);
    Rng rng(seed ^ 0xa5a5a5a5ULL);
    const LocalIsometry ua = random_unitary({{reg::S, 3}, {reg::XA, d}}, rng);
    const LocalIsometry ub = random_unitary({{reg::T, 3}, {reg::XB, d}}, rng);
    const auto rep = bound_chain_check(s, ua, ub);
    worst_overlap = std::max(worst_overlap, rep.overlap - rep.fidelity);
    worst_cap = std::max(worst_cap, rep.fidelity - rep.cap);
    worst_deficit = std::max(worst_deficit, std::abs(rep.entropy_deficit - 1.0));
    all = all && rep.overlap_le_fidelity && rep.fidelity_le_cap;
  }
  Record rec;
  rec.json = {{"kind", "game-chain-check"},
              {"draws", draws},
              {"d_max", d_max},
              {"seed", opt.seed},
              {"max_overlap_minus_fidelity", worst_overlap},
              {"max_fidelity_minus_cap", worst_cap},
              {"max_entropy_deficit_error", worst_deficit},
              {"all_pass", all && worst_deficit <= 1e-10}};
  check(rec, all, "a Fuchs-van de Graaf chain inequality failed");
  check(rec, worst_deficit <= 1e-10, "entropy deficit differs from 1");
  return rec;
}

Record completeness_experiment(const Json& p) {
  const double c = real_param(p, "c");
  const double s = real_param(p, "s", 0.0);
  const double pr = real_param(p, "p", c);
  const auto n = positive(uint_param(p, "N"), "N");
  const auto m = positive(uint_param(p, "m", 2), "m");
  const Backend backend = backend_param(p, "dense");
  const auto split_name = string_param(p, "split", std::string("first"));
  if (split_name != "first" && split_name != "every") throw ParamError("split must be 'first' or 'every'");
  const auto split = split_name == "first" ? ResidualSplit::first_prover : ResidualSplit::every_prover;

  const ProofSystemModel model = ProofSystemModel::canonical(pr, c, s, m, split);
  const RoundOutcome out = run_final_round(model, n, backend);
  const double yes = yes_acceptance_formula(c, n);
  const auto [ceiling, cap] = no_case_ceiling(c, s);
  const double floor = 1.0 - 1.0 / (2.0 * static_cast<double>(n));

  Record rec;
  rec.json = {{"kind", "completeness"}, {"c", c}, {"s", s}, {"p", pr}, {"N", n}, {"m", m},
              {"backend", to_string(backend)}, {"split", split_name}, {"acceptance", out.acceptance_probability},
              {"yes_formula", yes}};
  if (pr == c) {
    rec.json["abs_diff"] = std::abs(out.acceptance_probability - yes);
    check(rec, std::abs(out.acceptance_probability - yes) <= 1e-10, "acceptance differs from 1 - 2c(1-c)/N");
    check(rec, out.acceptance_probability >= floor - 1e-12, "acceptance below 1 - 1/(2N)");
  }
  rec.json["yes_floor"] = floor;
  rec.json["no_ceiling"] = ceiling;
  rec.json["cap"] = cap;
  if (pr <= s) check(rec, out.acceptance_probability <= ceiling + 1e-10, "no-case acceptance exceeds the ceiling");
  check(rec, ceiling <= cap + 1e-12, "ceiling exceeds 1 - (c - s)^2");
  return rec;
}

Record embezzle_experiment(const Json& p, const RunOptions& opt) {
  const auto m = positive(uint_param(p, "m", 2), "m");
  const auto dims = dims_param(p, m);
  const auto n = positive(uint_param(p, "N", 100), "N");
  const double eps = real_param(p, "epsilon", 0.25);
  if (!(eps > 0.0)) throw ParamError("epsilon must be positive");
  const auto targets = positive(uint_param(p, "targets", 25), "targets");
  const auto kind = string_param(p, "target_kind", std::string("random"));
  if (kind != "random" && kind != "net") throw ParamError("target_kind must be 'random' or 'net'");
  const Backend backend = backend_param(p, "gram");

  const EmbezzlingFamily family = universal_family(m, dims, n, eps);
  const double nn = static_cast<double>(n);
  const double guarantee = (1.0 - 1.0 / nn) * (1.0 - eps * eps / 2.0);
  Rng rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);

  Json fids = Json::array(), idx = Json::array();
  double worst = 1.0;
  bool all_guaranteed = true;
  for (std::uint64_t i = 0; i < targets; ++i) {
    const PureState target = kind == "random" ? random_state(family.layout, rng) : family.members[pick(rng)].point;
    const EmbezzleOutcome out = embezzle(family, target, backend);
    fids.push_back(out.fidelity);
    idx.push_back(out.net_index);
    worst = std::min(worst, out.fidelity);
    all_guaranteed = all_guaranteed && out.guarantee_met;
  }
  Json dims_json = Json::array();
  for (auto d : dims) dims_json.push_back(d);
  Record rec;
  rec.json = {{"kind", "embezzle"},
              {"m", m},
              {"dims", std::move(dims_json)},
              {"N", n},
              {"epsilon", eps},
              {"seed", opt.seed},
              {"net_size", family.size()},
              {"radius_squared", family.radius_squared},
              {"covering_estimate", family.covering_estimate},
              {"target_kind", kind},
              {"guarantee", guarantee},
              {"min_fidelity", worst},
              {"fidelities", std::move(fids)},
              {"net_indices", std::move(idx)},
              {"all_guarantee_met", all_guaranteed}};
  check(rec, all_guaranteed, "an embezzled fidelity fell below (1 - 1/N)(1 - eps^2/2)");
  if (kind == "net") check(rec, worst >= 1.0 - 1.0 / nn - 1e-9, "net-point fidelity below 1 - 1/N");
  return rec;
}

// ---------------------------------------------------------------------------
// Tables

std::optional<std::size_t> log_steps_param(const Json& p) {
  if (!find(p, "log_steps")) return std::nullopt;
  return static_cast<std::size_t>(positive(uint_param(p, "log_steps"), "log_steps"));
}

Record table_experiment(const Json& p, const RunOptions& opt) {
  const auto table = string_param(p, "table");
  Record rec;
  rec.json = {{"kind", "table"}, {"table", table}};

  if (table == "exchange") {
    const auto ns = parse_int_range(string_param(p, "N"), log_steps_param(p));
    const double a = real_param(p, "a", 0.0);
    if (!(a >= 0.0 && a < 1.0)) throw ParamError("a must lie in [0, 1)");
    const Backend backend = backend_param(p, "gram");
    CsvTable t({"N", "a", "residual_overlap", "overlap_formula", "abs_diff"});
    const auto [phi, psi] = qutrit_pair(a);
    for (auto n : ns) {
      if (n == 0) throw ParamError("N must be positive");
      const double ov = exchange(phi, build_resource(phi, psi, n, backend)).residual_overlap;
      const double f = overlap_formula(n, a);
      t.add_row({std::to_string(n), fmt(a), fmt(ov), fmt(f), fmt(std::abs(ov - f))});
      check(rec, std::abs(ov - f) <= 1e-12, "N=" + std::to_string(n) + ": overlap differs from the closed form");
    }
    rec.table = std::move(t);
  } else if (table == "game") {
    const auto ns = parse_int_range(string_param(p, "N"), log_steps_param(p));
    const Backend backend = backend_param(p, "gram");
    CsvTable t({"N", "win_prob", "closed_form", "abs_diff", "log2_d", "upper_bound_d"});
    for (auto n : ns) {
      if (n == 0) throw ParamError("N must be positive");
      const Strategy s = prescribed_strategy(n);
      const double w = play(s, backend);
      const double closed = 1.0 - 1.0 / (2.0 * static_cast<double>(n));
      const double ub = fannes_upper_bound_from_log2(s.log2_d());
      t.add_row({std::to_string(n), fmt(w), fmt(closed), fmt(std::abs(w - closed)), fmt(s.log2_d()), fmt(ub)});
      check(rec, std::abs(w - closed) <= (backend == Backend::dense ? 1e-10 : 1e-12),
            "N=" + std::to_string(n) + ": win probability differs from 1 - 1/(2N)");
      check(rec, w <= ub + 1e-9, "N=" + std::to_string(n) + ": win probability exceeds the bound");
    }
    rec.table = std::move(t);
  } else if (table == "bound") {
    const auto ds = parse_int_range(string_param(p, "d"), log_steps_param(p));
    CsvTable t({"d", "upper_bound"});
    for (auto d : ds) {
      if (d == 0) throw ParamError("d must be positive");
      t.add_row({std::to_string(d), fmt(fannes_upper_bound(d))});
    }
    rec.table = std::move(t);
  } else if (table == "optimizer") {
    const auto ds = parse_int_range(string_param(p, "d"), log_steps_param(p));
    CsvTable t({"d", "seesaw_value", "upper_bound", "gap"});
    for (auto d : ds) {
      Json q = p;
      q["d"] = d;
      q.erase("table");
      const SeesawReport r = seesaw(seesaw_config(q, opt));
      t.add_row({std::to_string(d), fmt(r.best_value), fmt(r.upper_bound), fmt(r.upper_bound - r.best_value)});
      check(rec, r.best_value <= r.upper_bound + 1e-9, "d=" + std::to_string(d) + ": see-saw value exceeds the bound");
    }
    rec.table = std::move(t);
  } else if (table == "completeness") {
    const auto cs = parse_real_list(string_param(p, "c"));
    const auto ns = parse_int_range(string_param(p, "N"), log_steps_param(p));
    const auto m = positive(uint_param(p, "m", 2), "m");
    const Backend backend = backend_param(p, "dense");
    CsvTable t({"c", "N", "m", "acceptance", "yes_formula", "abs_diff"});
    for (double c : cs)
      for (auto n : ns) {
        if (n == 0) throw ParamError("N must be positive");
        const auto model = ProofSystemModel::canonical(c, c, 0.0, m);
        const double acc = run_final_round(model, n, backend).acceptance_probability;
        const double yes = yes_acceptance_formula(c, n);
        t.add_row({fmt(c), std::to_string(n), std::to_string(m), fmt(acc), fmt(yes), fmt(std::abs(acc - yes))});
        check(rec, std::abs(acc - yes) <= 1e-10, "c=" + fmt(c) + " N=" + std::to_string(n) + ": acceptance mismatch");
      }
    rec.table = std::move(t);
  } else {
    throw ParamError("unknown table '" + table + "' (exchange, game, bound, optimizer, completeness)");
  }
  rec.json["rows"] = rec.table->rows();
  rec.json["csv"] = rec.table->str();
  return rec;
}

bool is_parameter_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain_error:
    case ErrorCode::too_large:
    case ErrorCode::net_too_large:
    case ErrorCode::identical_states:
    case ErrorCode::dimension_too_small:
    case ErrorCode::backend_unsupported:
    case ErrorCode::unsupported_strategy:
    case ErrorCode::invalid_argument:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::layout_mismatch:
      return true;
    default:
      return false;
  }
}

}  // namespace

Record run_experiment(const std::string& kind, const Json& params, const RunOptions& options) {
  try {
    if (kind == "exchange") return exchange_experiment(params, options);
    if (kind == "game-play") return game_play_experiment(params, options);
    if (kind == "game-bound") return game_bound_experiment(params);
    if (kind == "game-optimize") return game_optimize_experiment(params, options);
    if (kind == "game-chain-check") return chain_check_experiment(params, options);
    if (kind == "completeness") return completeness_experiment(params);
    if (kind == "embezzle") return embezzle_experiment(params, options);
    if (kind == "table") return table_experiment(params, options);
  } catch (const Error& e) {
    if (is_parameter_error(e.code())) throw ParamError(e.what());
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParamError(e.what());
  }
  throw ParamError("unknown experiment kind '" + kind + "'");
}

std::vector<std::uint64_t> parse_int_range(const std::string& spec, std::optional<std::size_t> log_steps) {
  auto parse_one = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw ParamError("malformed integer '" + s + "' in range '" + spec + "'");
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ParamError("integer out of range in '" + spec + "'");
    }
  };
  std::vector<std::uint64_t> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_one(spec.substr(0, dots));
    const auto hi = parse_one(spec.substr(dots + 2));
    if (lo > hi) throw ParamError("range '" + spec + "' is empty");
    if (log_steps) {
      if (lo == 0) throw ParamError("log-spaced ranges must start above 0");
      const std::size_t k = *log_steps;
      for (std::size_t i = 0; i < k; ++i) {
        const double t = k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(k - 1);
        const double v = std::exp(std::log(static_cast<double>(lo)) * (1.0 - t) + std::log(static_cast<double>(hi)) * t);
        const auto r = static_cast<std::uint64_t>(std::llround(v));
        if (out.empty() || out.back() != r) out.push_back(r);
      }
      out.back() = hi;
      return out;
    }
    if (hi - lo > 1'000'000) throw ParamError("range '" + spec + "' is too long; use log_steps");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  if (log_steps) throw ParamError("log_steps needs an a..b range");
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_one(item));
  if (out.empty()) throw ParamError("empty range");
  return out;
}

std::vector<double> parse_real_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParamError("malformed number '" + item + "'");
    }
    if (used != item.size()) throw ParamError("malformed number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ParamError("empty list");
  return out;
}

std::string render(const Record& record, Format format) {
  if (format == Format::json) return dump_json(record.json) + "\n";
  if (record.table) return record.table->str();
  std::vector<std::string> header, row;
  for (auto it = record.json.begin(); it != record.json.end(); ++it) {
    const auto& v = it.value();
    if (v.is_structured()) continue;
    header.push_back(it.key());
    if (v.is_string())
      row.push_back(v.get<std::string>());
    else if (v.is_number_float())
      row.push_back(format_double(v.get<double>()));
    else
      row.push_back(v.dump());
  }
  CsvTable t(std::move(header));
  t.add_row(std::move(row));
  return t.str();
}

std::vector<ManifestEntry> parse_manifest(const Json& manifest) {
  if (!manifest.is_object() || !manifest.contains("experiments") || !manifest["experiments"].is_array())
    throw ParamError("manifest must be an object with an 'experiments' array");
  std::vector<ManifestEntry> out;
  for (const auto& e : manifest["experiments"]) {
    if (!e.is_object()) throw ParamError("manifest entries must be objects");
    ManifestEntry entry;
    entry.kind = string_param(e, "kind");
    entry.parameters = e.contains("parameters") ? e["parameters"] : Json::object();
    if (!entry.parameters.is_object()) throw ParamError("'parameters' must be an object");
    if (!e.contains("seed")) throw ParamError("manifest entry '" + entry.kind + "' needs an explicit seed");
    entry.seed = uint_param(e, "seed");
    entry.output = string_param(e, "output");
    out.push_back(std::move(entry));
  }
  return out;
}

ManifestOutcome run_manifest(const std::vector<ManifestEntry>& entries, std::size_t jobs, bool dump_state) {
  ManifestOutcome out;
  out.records.resize(entries.size());
  out.invalid.assign(entries.size(), false);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < entries.size();) {
      const auto& e = entries[i];
      // Parallelism goes to the manifest level; each experiment runs serially.
      const RunOptions opt{.seed = e.seed, .dump_state = dump_state, .jobs = 1};
      try {
        out.records[i] = run_experiment(e.kind, e.parameters, opt);
      } catch (const ParamError& err) {
        out.records[i].json = {{"kind", e.kind}, {"error", err.what()}};
        out.invalid[i] = true;
      } catch (const std::exception& err) {
        out.records[i].json = {{"kind", e.kind}, {"error", err.what()}};
        out.records[i].failures.push_back(err.what());
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(jobs, entries.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < n; ++j) pool.emplace_back(worker);
  }
  return out;
}

Format format_for_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? Format::csv : Format::json;
}

}  // namespace cex::tools
