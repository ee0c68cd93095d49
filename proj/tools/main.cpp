// cex: command-line front end for the exchange, game, completeness and
// embezzlement experiments. Exit codes: 0 success, 2 invalid parameters,
// 3 an internal check failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "experiments.hpp"

namespace {

using cex::Json;
using namespace cex::tools;

constexpr int kExitInvalid = 2;
constexpr int kExitAssertion = 3;

template <typename T>
void put(Json& params, const char* key, const std::optional<T>& value) {
  if (value) params[key] = *value;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ParamError("cannot open '" + path + "' for writing");
  out << text;
}

Format parse_format(const std::optional<std::string>& name, Format fallback) {
  if (!name) return fallback;
  if (*name == "json") return Format::json;
  if (*name == "csv") return Format::csv;
  throw ParamError("--format must be json or csv");
}

int report_failures(const std::string& label, const Record& rec) {
  for (const auto& f : rec.failures) std::cerr << "cex: check failed [" << label << "]: " << f << "\n";
  return rec.passed() ? 0 : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent state exchange laboratory"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::optional<std::string> format;
  std::string out_path;
  bool dump_state = false;
  std::size_t jobs = 1;
  app.add_option("--seed", seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--format", format, "Output format: json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "Output path (default: standard output)");
  app.add_flag("--dump-state", dump_state, "Include states and matrices in JSON records");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  std::string kind;
  Json params = Json::object();

  // exchange
  auto* ex = app.add_subcommand("exchange", "Exchange phi=(|11>+|22>)/sqrt2 for a state at overlap a");
  std::optional<std::uint64_t> ex_n;
  std::optional<double> ex_a;
  std::optional<std::string> ex_backend, ex_direction, ex_method;
  ex->add_option("--N", ex_n, "Accuracy parameter")->required();
  ex->add_option("--a", ex_a, "|<phi|psi>| in [0, 1]");
  ex->add_option("--backend", ex_backend, "dense or gram");
  ex->add_option("--direction", ex_direction, "forward or backward");
  ex->add_option("--method", ex_method, "direct or intermediate");
  ex->callback([&] {
    kind = "exchange";
    put(params, "N", ex_n);
    put(params, "a", ex_a);
    put(params, "backend", ex_backend);
    put(params, "direction", ex_direction);
    put(params, "method", ex_method);
  });

  // game
  auto* game = app.add_subcommand("game", "Cooperative game experiments");
  game->require_subcommand(1);

  auto* play = game->add_subcommand("play", "Win probability of the prescribed strategy");
  std::optional<std::uint64_t> play_n;
  std::optional<std::string> play_backend;
  play->add_option("--N", play_n, "Strategy index")->required();
  play->add_option("--backend", play_backend, "dense or gram");
  play->callback([&] {
    kind = "game-play";
    put(params, "N", play_n);
    put(params, "backend", play_backend);
  });

  auto* bound = game->add_subcommand("bound", "Dimension-dependent upper bound");
  std::optional<std::uint64_t> bound_d;
  std::optional<double> bound_log2;
  auto* bound_d_opt = bound->add_option("--d", bound_d, "Per-party dimension of the shared state");
  bound->add_option("--log2-d", bound_log2, "log2 of the per-party dimension")->excludes(bound_d_opt);
  bound->callback([&] {
    kind = "game-bound";
    put(params, "d", bound_d);
    put(params, "log2_d", bound_log2);
  });

  auto* opt = game->add_subcommand("optimize", "See-saw lower bound for fixed d");
  std::optional<std::uint64_t> opt_d, opt_restarts, opt_iters, opt_y, opt_warm;
  std::optional<double> opt_tol;
  opt->add_option("--d", opt_d, "Per-party dimension")->required();
  opt->add_option("--restarts", opt_restarts, "Random restarts");
  opt->add_option("--max-iters", opt_iters, "Iteration cap per restart");
  opt->add_option("--tol", opt_tol, "Stop when one sweep gains less");
  opt->add_option("--y-dim", opt_y, "Residue dimension per party (default 3d)");
  opt->add_option("--warm-start-N", opt_warm, "Start restart 0 at the prescribed strategy with this N");
  opt->add_flag("--dump-strategy", dump_state, "Include the best strategy's matrices");
  opt->callback([&] {
    kind = "game-optimize";
    put(params, "d", opt_d);
    put(params, "restarts", opt_restarts);
    put(params, "max_iters", opt_iters);
    put(params, "tol", opt_tol);
    put(params, "y_dim", opt_y);
    put(params, "warm_start_N", opt_warm);
  });

  auto* chain = game->add_subcommand("chain-check", "Fidelity chain and entropy deficit on random draws");
  std::optional<std::uint64_t> chain_draws, chain_dmax;
  chain->add_option("--draws", chain_draws, "Number of seeded draws");
  chain->add_option("--d-max", chain_dmax, "Draw d cycles through 1..d-max");
  chain->callback([&] {
    kind = "game-chain-check";
    put(params, "draws", chain_draws);
    put(params, "d_max", chain_dmax);
  });

  // completeness
  auto* comp = app.add_subcommand("completeness", "Extra-round completeness transformation");
  std::optional<double> comp_c, comp_s, comp_p;
  std::optional<std::uint64_t> comp_n, comp_m;
  std::optional<std::string> comp_backend, comp_split;
  comp->add_option("--c", comp_c, "Completeness")->required();
  comp->add_option("--s", comp_s, "Soundness (below c)");
  comp->add_option("--p", comp_p, "Acceptance probability of the original system (default c)");
  comp->add_option("--N", comp_n, "Accuracy parameter")->required();
  comp->add_option("--m", comp_m, "Number of provers");
  comp->add_option("--backend", comp_backend, "dense or gram");
  comp->add_option("--split", comp_split, "Residual placement: first or every");
  comp->callback([&] {
    kind = "completeness";
    put(params, "c", comp_c);
    put(params, "s", comp_s);
    put(params, "p", comp_p);
    put(params, "N", comp_n);
    put(params, "m", comp_m);
    put(params, "backend", comp_backend);
    put(params, "split", comp_split);
  });

  // embezzle
  auto* emb = app.add_subcommand("embezzle", "Universal embezzling family over a lattice net");
  std::optional<std::uint64_t> emb_m, emb_n, emb_targets;
  std::optional<double> emb_eps;
  std::optional<std::string> emb_dims, emb_kind, emb_backend;
  emb->add_option("--m", emb_m, "Number of parties");
  emb->add_option("--dims", emb_dims, "Comma list of per-party dimensions");
  emb->add_option("--N", emb_n, "Accuracy parameter");
  emb->add_option("--epsilon", emb_eps, "Net covering radius");
  emb->add_option("--targets", emb_targets, "Number of targets");
  emb->add_option("--target-kind", emb_kind, "random or net");
  emb->add_option("--backend", emb_backend, "gram or dense");
  emb->callback([&] {
    kind = "embezzle";
    put(params, "m", emb_m);
    put(params, "dims", emb_dims);
    put(params, "N", emb_n);
    put(params, "epsilon", emb_eps);
    put(params, "targets", emb_targets);
    put(params, "target_kind", emb_kind);
    put(params, "backend", emb_backend);
  });

  // table
  auto* table = app.add_subcommand("table", "CSV sweep: exchange, game, bound, optimizer or completeness");
  std::string table_kind;
  std::optional<std::string> tab_n, tab_d, tab_c, tab_backend;
  std::optional<std::uint64_t> tab_steps, tab_m, tab_restarts, tab_iters;
  std::optional<double> tab_a;
  table->add_option("kind", table_kind, "Table kind")->required();
  table->add_option("--N", tab_n, "Range a..b, list a,b,c or a single value");
  table->add_option("--d", tab_d, "Dimension range");
  table->add_option("--c", tab_c, "Comma list of completeness values");
  table->add_option("--a", tab_a, "Overlap a for the exchange table");
  table->add_option("--m", tab_m, "Number of provers");
  table->add_option("--log-steps", tab_steps, "Log-spaced points over an a..b range");
  table->add_option("--backend", tab_backend, "dense or gram");
  table->add_option("--restarts", tab_restarts, "See-saw restarts");
  table->add_option("--max-iters", tab_iters, "See-saw iteration cap");
  table->callback([&] {
    kind = "table";
    params["table"] = table_kind;
    put(params, "N", tab_n);
    put(params, "d", tab_d);
    put(params, "c", tab_c);
    put(params, "a", tab_a);
    put(params, "m", tab_m);
    put(params, "log_steps", tab_steps);
    put(params, "backend", tab_backend);
    put(params, "restarts", tab_restarts);
    put(params, "max_iters", tab_iters);
  });

  // manifest
  auto* run = app.add_subcommand("run", "Run every experiment of a JSON manifest");
  std::string manifest_path;
  run->add_option("manifest", manifest_path, "Manifest file")->required()->check(CLI::ExistingFile);
  run->callback([&] { kind = "run"; });

  for (auto* sub : {ex, game, play, bound, opt, chain, comp, emb, table, run}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (kind == "run") {
      std::ifstream in(manifest_path);
      Json manifest;
      try {
        manifest = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ParamError(std::string("manifest is not valid JSON: ") + e.what());
      }
      const auto entries = parse_manifest(manifest);
      const auto outcome = run_manifest(entries, jobs, dump_state);
      int code = 0;
      Json summary = Json::array();
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& rec = outcome.records[i];
        const auto& e = entries[i];
        write_text(e.output, render(rec, format_for_path(e.output)));
        std::string status = "pass";
        if (outcome.invalid[i]) {
          status = "invalid";
          std::cerr << "cex: invalid parameters [" << e.output << "]: " << rec.json.value("error", "") << "\n";
          code = kExitInvalid;
        } else if (!rec.passed()) {
          status = "fail";
          report_failures(e.output, rec);
          if (code == 0) code = kExitAssertion;
        }
        summary.push_back({{"kind", e.kind}, {"output", e.output}, {"status", status}});
      }
      write_text(out_path, cex::dump_json(summary) + "\n");
      return code;
    }

    const RunOptions options{.seed = seed, .dump_state = dump_state, .jobs = jobs};
    const Record rec = run_experiment(kind, params, options);
    const Format fallback = kind == "table" ? Format::csv : Format::json;
    write_text(out_path, render(rec, parse_format(format, fallback)));
    return report_failures(kind, rec);
  } catch (const ParamError& e) {
    std::cerr << "cex: invalid parameters: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "cex: " << e.what() << "\n";
    return kExitAssertion;
  }
}
