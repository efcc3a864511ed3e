#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labprod/error.hpp"

namespace labprod {

// Country tag. JP and US are first-class because the analyses compare them;
// anything else keeps its code verbatim.
class Country {
 public:
  enum class Kind { jp, us, other };

  Country() = default;
  explicit Country(std::string_view code) { assign(code); }

  static Country jp() { return Country("JP"); }
  static Country us() { return Country("US"); }

  Kind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

  friend bool operator==(const Country& a, const Country& b) { return a.code_ == b.code_; }
  friend auto operator<=>(const Country& a, const Country& b) { return a.code_ <=> b.code_; }

 private:
  void assign(std::string_view code) {
    code_.assign(code);
    for (auto& ch : code_) {
      if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
    }
    if (code_ == "JP") {
      kind_ = Kind::jp;
    } else if (code_ == "US") {
      kind_ = Kind::us;
    } else {
      kind_ = Kind::other;
    }
  }

  Kind kind_ = Kind::other;
  std::string code_;
};

enum class SectorClass { manufacturing, non_manufacturing };

inline std::string_view to_string(SectorClass c) {
  return c == SectorClass::manufacturing ? "manufacturing" : "non_manufacturing";
}

inline std::optional<SectorClass> parse_sector_class(std::string_view s) {
  if (s == "manufacturing" || s == "M" || s == "mfg") return SectorClass::manufacturing;
  if (s == "non_manufacturing" || s == "S" || s == "non-manufacturing" || s == "nonmfg")
    return SectorClass::non_manufacturing;
  return std::nullopt;
}

/// One firm-year of financials. Money is in thousands of the Dataset's
/// currency unit. Optional-presence fields are std::nullopt when the source
/// did not report them; they are never silently zero.
struct FirmRecord {
  std::string firm_id;
  int year = 0;
  Country country;
  std::string sector;
  std::optional<SectorClass> sector_class;
  double revenue = 0.0;
  double cogs = 0.0;
  std::int64_t workers = 0;
  std::optional<double> total_labor_cost;
  std::optional<double> capital;
  std::optional<double> ordinary_income;
  std::optional<double> financial_expense;
  std::optional<double> tax_public_charge;
  std::optional<double> depreciation;

  friend bool operator==(const FirmRecord&, const FirmRecord&) = default;
};

struct Dataset {
  std::vector<FirmRecord> records;
  std::string currency_unit;
  std::vector<std::string> provenance;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Numeric fields addressable by name, for filters and schema mapping.
enum class Field {
  revenue,
  cogs,
  total_labor_cost,
  workers,
  capital,
  ordinary_income,
  financial_expense,
  tax_public_charge,
  depreciation,
};

inline constexpr std::array<Field, 9> kNumericFields = {
    Field::revenue,          Field::cogs,           Field::total_labor_cost,
    Field::workers,          Field::capital,        Field::ordinary_income,
    Field::financial_expense, Field::tax_public_charge, Field::depreciation,
};

inline std::string_view field_name(Field f) {
  switch (f) {
    case Field::revenue: return "revenue";
    case Field::cogs: return "cogs";
    case Field::total_labor_cost: return "total_labor_cost";
    case Field::workers: return "workers";
    case Field::capital: return "capital";
    case Field::ordinary_income: return "ordinary_income";
    case Field::financial_expense: return "financial_expense";
    case Field::tax_public_charge: return "tax_public_charge";
    case Field::depreciation: return "depreciation";
  }
  return "";
}

inline std::optional<Field> parse_field(std::string_view name) {
  for (Field f : kNumericFields) {
    if (field_name(f) == name) return f;
  }
  if (name == "labor_cost") return Field::total_labor_cost;
  return std::nullopt;
}

inline std::optional<double> field_value(const FirmRecord& r, Field f) {
  switch (f) {
    case Field::revenue: return r.revenue;
    case Field::cogs: return r.cogs;
    case Field::total_labor_cost: return r.total_labor_cost;
    case Field::workers: return static_cast<double>(r.workers);
    case Field::capital: return r.capital;
    case Field::ordinary_income: return r.ordinary_income;
    case Field::financial_expense: return r.financial_expense;
    case Field::tax_public_charge: return r.tax_public_charge;
    case Field::depreciation: return r.depreciation;
  }
  return std::nullopt;
}

}  // namespace labprod
