#pragma once

// Experiment records shared by the command line and the manifest runner. Each
// experiment takes a JSON parameter object and yields one JSON record plus
// the list of internal checks that failed.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cex/serialize.hpp"

namespace cex::tools {

/// Malformed or missing parameters (exit code 2).
class ParamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::uint64_t seed = 0;
  bool dump_state = false;
  std::size_t jobs = 1;
};

struct Record {
  Json json;
  std::vector<std::string> failures;
  std::optional<CsvTable> table;

  bool passed() const { return failures.empty(); }
};

/// Kinds: exchange, game-play, game-bound, game-optimize, game-chain-check,
/// completeness, embezzle, table.
Record run_experiment(const std::string& kind, const Json& params, const RunOptions& options);

/// "a..b" (every integer, or `log_steps` log-spaced integers), "a,b,c" or a
/// single integer. ParamError when malformed.
std::vector<std::uint64_t> parse_int_range(const std::string& spec, std::optional<std::size_t> log_steps = {});
std::vector<double> parse_real_list(const std::string& spec);

enum class Format { json, csv };

/// JSON records print in full; CSV uses the record's table, or one header
/// row and one value row built from its scalar fields.
std::string render(const Record& record, Format format);

struct ManifestEntry {
  std::string kind;
  Json parameters;
  std::uint64_t seed = 0;
  std::string output;
};

/// {"experiments": [{"kind", "parameters", "seed", "output"}...]}.
std::vector<ManifestEntry> parse_manifest(const Json& manifest);

/// Runs every entry (up to `jobs` at a time) and returns records in manifest
/// order. An entry whose parameters are rejected yields a record with
/// "error" set and `invalid` flagged.
struct ManifestOutcome {
  std::vector<Record> records;
  std::vector<bool> invalid;
};
ManifestOutcome run_manifest(const std::vector<ManifestEntry>& entries, std::size_t jobs, bool dump_state);

/// Format implied by an output path (".csv" or JSON otherwise).
Format format_for_path(const std::string& path);

}  // namespace cex::tools
