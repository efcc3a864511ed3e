#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "labprod/csv.hpp"
#include "labprod/error.hpp"

namespace labprod::emit {

inline constexpr std::string_view kToolName = "labprod";
inline constexpr std::string_view kToolVersion = "1.0.0";

// FNV-1a, 64 bit.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  // Field separator so ("ab","c") and ("a","bc") differ.
  Fnv1a& field(std::string_view bytes) {
    update(bytes);
    return update(std::string_view("\x1f", 1));
  }
  std::uint64_t value() const { return hash_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

struct Empty {};
using Cell = std::variant<Empty, std::string, double, std::int64_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw ConfigError("emit: row width differs from header");
    rows.push_back(std::move(row));
  }
};

enum class Format { csv, json };

inline std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(Empty) const { return {}; }
    std::string operator()(const std::string& s) const { return csv::quote_if_needed(s, ','); }
    std::string operator()(double d) const { return csv::format_sig15(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
  } visitor;
  return std::visit(visitor, c);
}

inline nlohmann::json cell_json(const Cell& c) {
  struct {
    nlohmann::json operator()(Empty) const { return nullptr; }
    nlohmann::json operator()(const std::string& s) const { return s; }
    nlohmann::json operator()(double d) const {
      if (!std::isfinite(d)) return csv::format_sig15(d);
      return *csv::parse_double(csv::format_sig15(d));
    }
    nlohmann::json operator()(std::int64_t i) const { return i; }
  } visitor;
  return std::visit(visitor, c);
}

/// CSV output opens with '#' comment lines recording tool version, config
/// hash and row count; JSON carries the same under "meta".
inline std::string render(const Table& t, Format format, const std::string& config_hash) {
  std::ostringstream out;
  if (format == Format::csv) {
    out << "# " << kToolName << ' ' << kToolVersion << '\n';
    out << "# config-hash: " << config_hash << '\n';
    out << "# rows: " << t.rows.size() << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << '\n';
    }
  } else {
    nlohmann::ordered_json doc;
    doc["meta"] = {{"tool", kToolName}, {"version", kToolVersion}, {"config_hash", config_hash},
                   {"rows", t.rows.size()}};
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
  }
  return out.str();
}

/// Writes to a sibling temporary and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace labprod::emit
