#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "labprod/csv.hpp"
#include "labprod/error.hpp"
#include "labprod/record.hpp"

namespace labprod {

// Canonical column names, in emission order.
inline constexpr std::array<std::string_view, 14> kCanonicalColumns = {
    "firm_id",  "year",    "country",          "sector",          "sector_class",
    "revenue",  "cogs",    "total_labor_cost", "workers",         "capital",
    "ordinary_income", "financial_expense", "tax_public_charge", "depreciation",
};

inline constexpr std::array<std::string_view, 5> kMandatoryColumns = {
    "firm_id", "year", "revenue", "cogs", "workers",
};

/// Maps canonical field names to the header labels used by a particular feed.
/// Fields without an entry are looked up under their canonical name.
struct Schema {
  std::map<std::string, std::string> columns;
  char delimiter = ',';
  int min_year = 1980;
  int max_year = 2030;
  bool strict = false;
  std::string currency_unit;
  std::string provenance;

  std::string header_for(std::string_view field) const {
    auto it = columns.find(std::string(field));
    return it == columns.end() ? std::string(field) : it->second;
  }
};

struct RowIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  Dataset dataset;
  std::size_t skipped_rows = 0;
  std::vector<RowIssue> issues;
};

namespace detail {

inline bool is_comment_or_blank(std::string_view line) {
  line = csv::trim(line);
  return line.empty() || line.front() == '#';
}

// "# currency-unit: kJPY" in the comment preamble declares the unit.
inline std::optional<std::string> declared_unit(std::string_view line) {
  constexpr std::string_view tag = "# currency-unit:";
  line = csv::trim(line);
  if (!line.starts_with(tag)) return std::nullopt;
  auto unit = csv::trim(line.substr(tag.size()));
  if (unit.empty()) return std::nullopt;
  return std::string(unit);
}

class RowParser {
 public:
  RowParser(const Schema& schema, const std::vector<std::string>& header) : schema_(schema) {
    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < header.size(); ++i) {
      by_name.emplace(std::string(csv::trim(header[i])), i);
    }
    for (std::size_t k = 0; k < kCanonicalColumns.size(); ++k) {
      auto it = by_name.find(schema.header_for(kCanonicalColumns[k]));
      if (it != by_name.end()) index_[k] = it->second;
    }
    for (auto mandatory : kMandatoryColumns) {
      if (!index_[column(mandatory)]) {
        throw SchemaError("missing mandatory column '" + schema.header_for(mandatory) +
                          "' (field " + std::string(mandatory) + ")");
      }
    }
    width_ = header.size();
  }

  FirmRecord parse(const std::vector<std::string>& cells, std::size_t line) const {
    if (cells.size() != width_) {
      throw RowError(line, "expected " + std::to_string(width_) + " cells, found " +
                               std::to_string(cells.size()));
    }
    FirmRecord r;
    r.firm_id = std::string(csv::trim(cell(cells, "firm_id")));
    if (r.firm_id.empty()) throw RowError(line, "empty firm_id");

    auto year = csv::parse_int(cell(cells, "year"));
    if (!year) throw RowError(line, "unparseable year '" + std::string(cell(cells, "year")) + "'");
    if (*year < schema_.min_year || *year > schema_.max_year) {
      throw RowError(line, "year " + std::to_string(*year) + " outside [" +
                               std::to_string(schema_.min_year) + ", " +
                               std::to_string(schema_.max_year) + "]");
    }
    r.year = static_cast<int>(*year);

    if (has("country")) r.country = Country(csv::trim(cell(cells, "country")));
    if (has("sector")) r.sector = std::string(csv::trim(cell(cells, "sector")));
    if (has("sector_class")) {
      auto text = csv::trim(cell(cells, "sector_class"));
      if (!text.empty()) {
        r.sector_class = parse_sector_class(text);
        if (!r.sector_class) throw RowError(line, "unknown sector_class '" + std::string(text) + "'");
      }
    }

    r.revenue = mandatory_money(cells, "revenue", line);
    r.cogs = mandatory_money(cells, "cogs", line);

    auto workers = csv::parse_int(cell(cells, "workers"));
    if (!workers) {
      throw RowError(line, "unparseable workers '" + std::string(cell(cells, "workers")) + "'");
    }
    if (*workers < 0) throw RowError(line, "negative workers");
    r.workers = *workers;

    r.total_labor_cost = optional_money(cells, "total_labor_cost", line, false);
    r.capital = optional_money(cells, "capital", line, false);
    r.ordinary_income = optional_money(cells, "ordinary_income", line, true);
    r.financial_expense = optional_money(cells, "financial_expense", line, false);
    r.tax_public_charge = optional_money(cells, "tax_public_charge", line, false);
    r.depreciation = optional_money(cells, "depreciation", line, false);
    return r;
  }

 private:
  static std::size_t column(std::string_view name) {
    for (std::size_t k = 0; k < kCanonicalColumns.size(); ++k) {
      if (kCanonicalColumns[k] == name) return k;
    }
    return kCanonicalColumns.size();
  }

  bool has(std::string_view name) const { return index_[column(name)].has_value(); }

  std::string_view cell(const std::vector<std::string>& cells, std::string_view name) const {
    return cells[*index_[column(name)]];
  }

  double mandatory_money(const std::vector<std::string>& cells, std::string_view name,
                         std::size_t line) const {
    auto text = cell(cells, name);
    auto v = csv::parse_double(text);
    if (!v) throw RowError(line, "unparseable " + std::string(name) + " '" + std::string(text) + "'");
    if (*v < 0) throw RowError(line, "negative " + std::string(name));
    return *v;
  }

  std::optional<double> optional_money(const std::vector<std::string>& cells, std::string_view name,
                                       std::size_t line, bool allow_negative) const {
    if (!has(name)) return std::nullopt;
    auto text = csv::trim(cell(cells, name));
    if (text.empty() || text == "NA" || text == "NaN" || text == "nan") return std::nullopt;
    auto v = csv::parse_double(text);
    if (!v) throw RowError(line, "unparseable " + std::string(name) + " '" + std::string(text) + "'");
    if (!allow_negative && *v < 0) throw RowError(line, "negative " + std::string(name));
    return v;
  }

  const Schema& schema_;
  std::array<std::optional<std::size_t>, kCanonicalColumns.size()> index_{};
  std::size_t width_ = 0;
};

}  // namespace detail

/// Reads header-labelled delimited text into a Dataset. Lines starting with
/// '#' and blank lines are ignored. Bad rows are skipped and reported unless
/// schema.strict is set, in which case the first one throws RowError.
inline ParseResult parse_firm_records(std::istream& in, const Schema& schema) {
  ParseResult result;
  result.dataset.currency_unit = schema.currency_unit;
  if (!schema.provenance.empty()) result.dataset.provenance.push_back(schema.provenance);

  std::string line;
  std::size_t line_no = 0;
  std::optional<detail::RowParser> parser;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_comment_or_blank(line)) {
      auto unit = detail::declared_unit(line);
      if (unit && !parser) {
        if (result.dataset.currency_unit.empty()) {
          result.dataset.currency_unit = *unit;
        } else if (result.dataset.currency_unit != *unit) {
          throw UnitError("file declares currency '" + *unit + "' but schema expects '" +
                          result.dataset.currency_unit + "'");
        }
      }
      continue;
    }
    auto cells = csv::split(line, schema.delimiter);
    if (!parser) {
      if (!cells) throw SchemaError("line " + std::to_string(line_no) + ": malformed header");
      parser.emplace(schema, *cells);
      continue;
    }
    try {
      if (!cells) throw RowError(line_no, "unterminated quote");
      result.dataset.records.push_back(parser->parse(*cells, line_no));
    } catch (const RowError& e) {
      if (schema.strict) throw;
      ++result.skipped_rows;
      result.issues.push_back({e.line(), e.what()});
    }
  }
  if (!parser) throw SchemaError("no header row found");
  return result;
}

/// Writes records in the canonical schema; absent optional fields are empty
/// cells. Doubles use the shortest exact representation so parsing the output
/// reproduces the Dataset field for field.
inline void write_firm_records(std::ostream& out, const Dataset& d, char delim = ',') {
  for (std::size_t k = 0; k < kCanonicalColumns.size(); ++k) {
    if (k) out << delim;
    out << kCanonicalColumns[k];
  }
  out << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? csv::format_exact(*v) : std::string(); };
  for (const auto& r : d.records) {
    out << csv::quote_if_needed(r.firm_id, delim) << delim << r.year << delim
        << csv::quote_if_needed(r.country.code(), delim) << delim
        << csv::quote_if_needed(r.sector, delim) << delim
        << (r.sector_class ? to_string(*r.sector_class) : std::string_view{}) << delim
        << csv::format_exact(r.revenue) << delim << csv::format_exact(r.cogs) << delim
        << opt(r.total_labor_cost) << delim << r.workers << delim << opt(r.capital) << delim
        << opt(r.ordinary_income) << delim << opt(r.financial_expense) << delim
        << opt(r.tax_public_charge) << delim << opt(r.depreciation) << '\n';
  }
}

enum class MergePolicy { prefer_a, prefer_b, reject_conflict };

/// Union of two datasets keyed by (firm_id, year). Records are visited in
/// order, a then b; a colliding record replaces the earlier one in place under
/// prefer_b and is dropped under prefer_a.
inline Dataset merge_datasets(const Dataset& a, const Dataset& b, MergePolicy policy) {
  if (a.currency_unit != b.currency_unit) {
    throw UnitError("currency mismatch: '" + a.currency_unit + "' vs '" + b.currency_unit + "'");
  }
  Dataset out;
  out.currency_unit = a.currency_unit;
  out.provenance = a.provenance;
  out.provenance.insert(out.provenance.end(), b.provenance.begin(), b.provenance.end());
  out.records.reserve(a.size() + b.size());

  std::map<std::pair<std::string, int>, std::size_t> position;
  std::vector<std::string> conflicts;
  for (const Dataset* src : {&a, &b}) {
    for (const auto& r : src->records) {
      auto key = std::make_pair(r.firm_id, r.year);
      auto [it, inserted] = position.emplace(key, out.records.size());
      if (inserted) {
        out.records.push_back(r);
        continue;
      }
      switch (policy) {
        case MergePolicy::prefer_a:
          break;
        case MergePolicy::prefer_b:
          out.records[it->second] = r;
          break;
        case MergePolicy::reject_conflict:
          conflicts.push_back(r.firm_id + "/" + std::to_string(r.year));
          break;
      }
    }
  }
  if (!conflicts.empty()) {
    std::string msg = "duplicate (firm_id, year) keys:";
    for (const auto& k : conflicts) msg += " " + k;
    throw ConflictError(msg);
  }
  return out;
}

struct RecordFilter {
  std::optional<int> year;
  std::optional<Country> country;
  std::optional<SectorClass> sector_class;
  std::optional<std::int64_t> min_workers;  // inclusive
  std::vector<Field> require_positive;

  bool matches(const FirmRecord& r) const {
    if (year && r.year != *year) return false;
    if (country && r.country != *country) return false;
    if (sector_class && r.sector_class != sector_class) return false;
    if (min_workers && r.workers < *min_workers) return false;
    for (Field f : require_positive) {
      auto v = field_value(r, f);
      if (!v || *v <= 0) return false;
    }
    return true;
  }
};

inline Dataset filter_dataset(const Dataset& d, const RecordFilter& filter) {
  Dataset out;
  out.currency_unit = d.currency_unit;
  out.provenance = d.provenance;
  std::copy_if(d.records.begin(), d.records.end(), std::back_inserter(out.records),
               [&](const FirmRecord& r) { return filter.matches(r); });
  return out;
}

}  // namespace labprod
