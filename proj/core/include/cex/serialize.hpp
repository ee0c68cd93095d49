#pragma once

// JSON and CSV output. Floating-point values are printed with 17 significant
// digits so that every number round-trips exactly and identical runs give
// identical bytes.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cex/statevec.hpp"

namespace cex {

using Json = nlohmann::ordered_json;

/// "%.17g", with non-finite values rendered as null in JSON contexts.
std::string format_double(double x);

/// Serializes with object keys in insertion order; `indent` < 0 gives a
/// single line.
std::string dump_json(const Json& value, int indent = 2);

/// {"layout": [{"label", "dim"}...], "amplitudes": [[re, im]...]}
Json state_to_json(const PureState& state);
/// LengthMismatch/NotNormalized as for make_state; InvalidArgument on shape.
PureState state_from_json(const Json& json);

/// Matrix as rows of [re, im] pairs.
Json matrix_to_json(const Matrix& m);
Json matrix_to_json(const Eigen::MatrixXd& m);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace cex
