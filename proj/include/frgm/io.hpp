// File formats: point sets and matrices as headerless CSV or JSON
// ({"points": [...]} / {"matrix": [...]}), plus a small flat-TOML reader for
// experiment grids.
#pragma once

#include "frgm/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace frgm {

using json = nlohmann::json;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::vector<double>> parse_csv(const std::string& text,
                                                  const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw io_error(origin + ": bad number '" + cell + "' at line " +
                       std::to_string(lineno));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw io_error(origin + ": ragged row at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(origin + ": empty input");
  return rows;
}

inline Mat to_matrix(const std::vector<std::vector<double>>& rows) {
  Mat m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

inline Mat read_matrix_csv(const std::string& path) {
  return detail::to_matrix(detail::parse_csv(detail::read_file(path), path));
}

inline Mat json_to_matrix(const json& j, const std::string& key, const std::string& origin) {
  if (!j.contains(key) || !j[key].is_array() || j[key].empty())
    throw io_error(origin + ": expected non-empty array '" + key + "'");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j[key]) {
    if (!r.is_array()) throw io_error(origin + ": '" + key + "' rows must be arrays");
    rows.push_back(r.get<std::vector<double>>());
    if (rows.back().size() != rows.front().size())
      throw io_error(origin + ": ragged '" + key + "'");
  }
  return detail::to_matrix(rows);
}

// Dispatches on extension: .json reads {"matrix": [...]}, anything else CSV.
inline Mat read_matrix(const std::string& path) {
  if (detail::ends_with(path, ".json")) {
    json j;
    try {
      j = json::parse(detail::read_file(path));
    } catch (const json::parse_error& e) {
      throw io_error(path + ": " + e.what());
    }
    return json_to_matrix(j, "matrix", path);
  }
  return read_matrix_csv(path);
}

// Point sets: CSV rows x,y[,z] or JSON {"points": [[x,y],...]}.
inline PointSet read_points(const std::string& path) {
  Mat m;
  if (detail::ends_with(path, ".json")) {
    json j;
    try {
      j = json::parse(detail::read_file(path));
    } catch (const json::parse_error& e) {
      throw io_error(path + ": " + e.what());
    }
    m = json_to_matrix(j, "points", path);
  } else {
    m = read_matrix_csv(path);
  }
  try {
    return PointSet(std::move(m));
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
}

// 17 significant digits: round-trip exact for doubles, keeps outputs
// regression-stable.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_matrix_csv(const std::string& path, const Mat& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_points_csv(const std::string& path, const Mat& pts) {
  write_matrix_csv(path, pts);
}

inline json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Flat TOML subset: `key = value` lines with numbers, booleans, strings and
// one-level arrays; '#' comments. Enough for experiment grid files; JSON is
// the primary format.
inline json parse_flat_toml(const std::string& text, const std::string& origin) {
  json out = json::object();
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  auto parse_scalar = [&](std::string tok) -> json {
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    tok = trim(tok);
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
      return tok.substr(1, tok.size() - 2);
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
      size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size()) {
        if (tok.find_first_of(".eE") == std::string::npos) return static_cast<long long>(v);
        return v;
      }
    } catch (const std::exception&) {
    }
    throw io_error(origin + ": bad TOML value '" + tok + "' at line " + std::to_string(lineno));
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw io_error(origin + ": expected key = value at line " + std::to_string(lineno));
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t\r") + 1);
    std::string val = line.substr(eq + 1);
    val.erase(0, val.find_first_not_of(" \t"));
    val.erase(val.find_last_not_of(" \t\r") + 1);
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']')
        throw io_error(origin + ": unterminated array at line " + std::to_string(lineno));
      json arr = json::array();
      std::istringstream items(val.substr(1, val.size() - 2));
      std::string item;
      while (std::getline(items, item, ','))
        if (item.find_first_not_of(" \t") != std::string::npos) arr.push_back(parse_scalar(item));
      out[key] = std::move(arr);
    } else {
      out[key] = parse_scalar(val);
    }
  }
  return out;
}

// Grid/config file: .toml via the flat reader, everything else JSON.
inline json read_config(const std::string& path) {
  const std::string text = detail::read_file(path);
  if (detail::ends_with(path, ".toml")) return parse_flat_toml(text, path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw io_error(path + ": " + e.what());
  }
}

}  // namespace frgm
