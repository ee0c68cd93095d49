#include "cex/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cex/error.hpp"

namespace cex {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return std::signbit(x) ? "-0" : "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void emit(std::ostringstream& os, const Json& v, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int level) {
    if (!pretty) return;
    os << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ',';
        first = false;
        newline(depth + 1);
        os << Json(it.key()).dump() << (pretty ? ": " : ":");
        emit(os, it.value(), indent, depth + 1);
      }
      newline(depth);
      os << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : v)
        if (e.is_structured()) flat = false;
      os << '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) os << (flat && pretty ? ", " : ",");
        first = false;
        if (!flat) newline(depth + 1);
        emit(os, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      os << ']';
      return;
    }
    case Json::value_t::number_float:
      os << format_double(v.get<double>());
      return;
    default:
      os << v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::ostringstream os;
  emit(os, value, indent, 0);
  return os.str();
}

Json state_to_json(const PureState& state) {
  Json layout = Json::array();
  for (const auto& s : state.layout().subsystems()) layout.push_back({{"label", s.label}, {"dim", s.dim}});
  Json amps = Json::array();
  for (const auto& a : state.amplitudes()) amps.push_back(Json::array({a.real(), a.imag()}));
  return {{"layout", std::move(layout)}, {"amplitudes", std::move(amps)}};
}

PureState state_from_json(const Json& json) {
  if (!json.is_object() || !json.contains("layout") || !json.contains("amplitudes"))
    fail(ErrorCode::invalid_argument, "state JSON needs 'layout' and 'amplitudes'");
  std::vector<Subsystem> subs;
  for (const auto& s : json.at("layout")) subs.push_back({s.at("label").get<std::string>(), s.at("dim").get<std::size_t>()});
  const auto& amps = json.at("amplitudes");
  Vector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto& pair = amps[i];
    if (!pair.is_array() || pair.size() != 2) fail(ErrorCode::invalid_argument, "amplitudes must be [re, im] pairs");
    v(static_cast<Eigen::Index>(i)) = Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  return make_state(SubsystemLayout(std::move(subs)), std::move(v));
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) fail(ErrorCode::invalid_argument, "CSV row width differs from the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

}  // namespace cex
