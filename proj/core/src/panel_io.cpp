#include "carefree/panel_io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace carefree {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  for (;;) {
    const auto comma = line.find(',', begin);
    fields.push_back(line.substr(begin, comma - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

[[noreturn]] void fail(const char* file, std::size_t line_no, const std::string& what) {
  throw std::runtime_error(fmt::format("{} line {}: {}", file, line_no, what));
}

std::size_t parse_index(const std::string& field, const char* file, std::size_t line_no) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    fail(file, line_no, "expected a nonnegative integer, got '" + field + "'");
  }
  return value;
}

double parse_value(const std::string& field, const char* file, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    fail(file, line_no, "expected a number, got '" + field + "'");
  }
}

}  // namespace

void write_panel_csv(const EProcessPanel& panel, std::ostream& out) {
  out << "hypothesis,time,value\n";
  for (std::size_t k = 0; k < panel.hypotheses(); ++k) {
    for (std::size_t t = 0; t <= panel.horizon(); ++t) {
      out << fmt::format("{},{},{}\n", k, t, panel.at(k, t));
    }
  }
}

void write_truth_csv(const TruthLabels& truth, std::ostream& out) {
  out << "hypothesis,is_null\n";
  for (std::size_t k = 0; k < truth.size(); ++k) {
    out << k << ',' << (truth.is_null(k) ? 1 : 0) << '\n';
  }
}

EProcessPanel read_panel_csv(std::istream& values, std::istream& truth) {
  std::string line;
  std::size_t line_no = 0;

  std::map<std::size_t, bool> labels;
  if (!std::getline(truth, line) || strip(line) != "hypothesis,is_null") {
    fail("truth", 1, "expected header 'hypothesis,is_null'");
  }
  line_no = 1;
  while (std::getline(truth, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 2) fail("truth", line_no, "expected 2 fields");
    const std::size_t k = parse_index(fields[0], "truth", line_no);
    bool is_null = false;
    if (fields[1] == "1" || fields[1] == "true") {
      is_null = true;
    } else if (fields[1] != "0" && fields[1] != "false") {
      fail("truth", line_no, "is_null must be 0, 1, true or false");
    }
    if (!labels.emplace(k, is_null).second) fail("truth", line_no, "duplicate hypothesis");
  }

  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  std::size_t max_k = 0;
  std::size_t max_t = 0;
  if (!std::getline(values, line) || strip(line) != "hypothesis,time,value") {
    fail("panel", 1, "expected header 'hypothesis,time,value'");
  }
  line_no = 1;
  while (std::getline(values, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 3) fail("panel", line_no, "expected 3 fields");
    const std::size_t k = parse_index(fields[0], "panel", line_no);
    const std::size_t t = parse_index(fields[1], "panel", line_no);
    const double v = parse_value(fields[2], "panel", line_no);
    if (!cells.emplace(std::pair{k, t}, v).second) fail("panel", line_no, "duplicate cell");
    max_k = std::max(max_k, k);
    max_t = std::max(max_t, t);
  }
  if (cells.empty()) throw std::runtime_error("panel: no data rows");
  if (cells.size() != (max_k + 1) * (max_t + 1)) {
    throw std::runtime_error("panel: cells do not form a dense hypothesis x time grid");
  }
  if (labels.size() != max_k + 1 || labels.rbegin()->first != max_k) {
    throw std::runtime_error("truth: labels do not cover hypotheses 0.." + std::to_string(max_k));
  }

  ValueGrid grid(max_k + 1, max_t + 1);
  for (const auto& [key, v] : cells) grid.at(key.first, key.second) = v;
  std::vector<bool> flags;
  flags.reserve(labels.size());
  for (const auto& [k, is_null] : labels) flags.push_back(is_null);
  return EProcessPanel(std::move(grid), TruthLabels(std::move(flags)));
}

}  // namespace carefree
