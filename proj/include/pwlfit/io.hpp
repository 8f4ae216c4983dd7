#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pwlfit/errors.hpp"
#include "pwlfit/signal.hpp"

namespace pwlfit {
namespace io {

namespace detail {

inline bool parse_number(std::string_view tok, double& out) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',') {
      out.push_back(line.substr(start, k - start));
      start = k + 1;
    }
  }
  return out;
}

}  // namespace detail

// Parses CSV signal data: one value per line for a discrete signal, or
// "t,g" rows for a continuous one. An initial non-numeric row is treated
// as a header. Errors carry 1-based line numbers.
inline Signal ingest_stream(std::istream& in, SignalKind kind,
                            const std::string& name = "<stream>") {
  std::vector<double> grid;
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  bool saw_data = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    bool blank = true;
    for (char ch : sv) {
      if (ch != ' ' && ch != '\t') {
        blank = false;
        break;
      }
    }
    if (blank) continue;

    const auto fields = detail::split_fields(sv);
    const std::size_t want = kind == SignalKind::continuous ? 2u : 1u;
    if (fields.size() != want) {
      throw parse_error(name + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(want) + " field(s), got " +
                        std::to_string(fields.size()));
    }

    double nums[2] = {0.0, 0.0};
    bool ok = true;
    for (std::size_t f = 0; f < want; ++f) {
      if (!detail::parse_number(fields[f], nums[f])) ok = false;
    }
    if (!ok) {
      if (!saw_data) continue;  // header row
      throw parse_error(name + ":" + std::to_string(lineno) + ": not a number");
    }
    saw_data = true;

    if (kind == SignalKind::continuous) {
      if (!grid.empty() && !(nums[0] > grid.back())) {
        throw parse_error(name + ":" + std::to_string(lineno) +
                          ": grid values must be strictly increasing");
      }
      grid.push_back(nums[0]);
      values.push_back(nums[1]);
    } else {
      values.push_back(nums[0]);
    }
  }

  if (values.size() < 2)
    throw parse_error(name + ": need at least 2 data rows");
  return kind == SignalKind::continuous
             ? Signal::continuous(std::move(grid), std::move(values))
             : Signal::discrete(std::move(values));
}

inline Signal ingest(const std::string& path, SignalKind kind) {
  std::ifstream in(path);
  if (!in) throw parse_error(path + ": cannot open input file");
  return ingest_stream(in, kind, path);
}

}  // namespace io
}  // namespace pwlfit
