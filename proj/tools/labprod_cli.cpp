// labprod: firm-level labor-productivity analytics from the command line.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "labprod/labprod.hpp"

namespace fs = std::filesystem;
using namespace labprod;
using emit::Cell;
using emit::Table;

namespace {

constexpr const char* kExitCodes =
    "Exit codes: 0 success; 1 internal error; 2 config error (bad flags, unreadable or invalid "
    "config/input files); 3 data error (schema violations, insufficient or conflicting data); "
    "4 numerical error (collinearity, zero variance, degenerate ratios).";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Options shared by every data-consuming command.
struct DataOptions {
  std::vector<std::string> inputs;
  std::string schema_path;
  std::string macro_path;
  std::string currency;
  std::string merge_policy = "reject";
  std::string basis = "gm";
  std::string mode = "pooled";
  bool strict = false;
  std::optional<int> year;
  std::optional<std::string> country;
  std::optional<std::string> sector_class;
  std::optional<std::int64_t> min_workers;
};

struct OutputOptions {
  std::string out_dir;
  std::string format = "csv";
};

// Paths whose value must not leak into the config hash; their content is
// hashed instead so identical runs in different directories agree.
bool is_path_option(const std::string& name) {
  return name == "--out" || name == "--input" || name == "--schema" || name == "--macro" ||
         name == "--spec" || name == "--scenario" || name == "--help";
}

class Run {
 public:
  Run(CLI::App* sub, const OutputOptions& out, const std::vector<std::string>& files)
      : out_(out) {
    hash_.field(sub->get_name());
    for (const CLI::Option* opt : sub->get_options()) {
      auto name = opt->get_name();
      if (is_path_option(name) || opt->count() == 0) continue;
      hash_.field(name);
      for (const auto& v : opt->results()) hash_.field(v);
    }
    for (const auto& f : files) {
      if (!f.empty()) hash_.field(read_file(f));
    }
    if (out.format == "csv") {
      format_ = emit::Format::csv;
    } else if (out.format == "json") {
      format_ = emit::Format::json;
    } else {
      throw ConfigError("unknown --format '" + out.format + "'");
    }
    std::error_code ec;
    fs::create_directories(out.out_dir, ec);
    if (ec || !fs::is_directory(out.out_dir)) throw ConfigError("cannot create output directory " + out.out_dir);
  }

  std::string hash() const { return hash_.hex(); }

  void table(const std::string& stem, const Table& t) const {
    auto ext = format_ == emit::Format::csv ? ".csv" : ".json";
    auto path = fs::path(out_.out_dir) / (stem + ext);
    emit::write_atomic(path, emit::render(t, format_, hash()));
    std::cerr << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
  }

  // Datasets are always written in the canonical CSV schema with exact doubles.
  void dataset(const std::string& stem, const Dataset& d) const {
    std::ostringstream body;
    body << "# " << emit::kToolName << ' ' << emit::kToolVersion << '\n'
         << "# config-hash: " << hash() << '\n'
         << "# rows: " << d.size() << '\n'
         << "# currency-unit: " << d.currency_unit << '\n';
    write_firm_records(body, d);
    auto path = fs::path(out_.out_dir) / (stem + ".csv");
    emit::write_atomic(path, body.str());
    std::cerr << "wrote " << path.string() << " (" << d.size() << " records)\n";
  }

 private:
  OutputOptions out_;
  emit::Fnv1a hash_;
  emit::Format format_ = emit::Format::csv;
};

void add_output_options(CLI::App* sub, OutputOptions& o) {
  sub->add_option("--out", o.out_dir, "Output directory")->required();
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_data_options(CLI::App* sub, DataOptions& d, bool needs_macro_flag = true) {
  sub->add_option("--input", d.inputs, "Input CSV file(s); several are merged")->required()->check(CLI::ExistingFile);
  sub->add_option("--schema", d.schema_path, "Column-mapping schema (JSON)")->check(CLI::ExistingFile);
  if (needs_macro_flag) {
    sub->add_option("--macro", d.macro_path, "Macro context: labor_share, gdp, exchange_rate (JSON)")
        ->check(CLI::ExistingFile);
    sub->add_option("--basis", d.basis, "Productivity numerator")
        ->check(CLI::IsMember({"gm", "av-share", "av-components"}));
    sub->add_option("--mode", d.mode, "Aggregation of several firms")->check(CLI::IsMember({"pooled", "mean"}));
  }
  sub->add_option("--currency", d.currency, "Currency unit tag (overrides the schema)");
  sub->add_option("--merge-policy", d.merge_policy, "Duplicate (firm_id, year) handling across inputs")
      ->check(CLI::IsMember({"prefer-a", "prefer-b", "reject"}));
  sub->add_flag("--strict", d.strict, "Fail on the first bad row instead of skipping it");
  sub->add_option("--year", d.year, "Keep only this year");
  sub->add_option("--country", d.country, "Keep only this country code");
  sub->add_option("--sector-class", d.sector_class, "Keep only this sector class")
      ->check(CLI::IsMember({"manufacturing", "non_manufacturing"}));
  sub->add_option("--min-workers", d.min_workers, "Keep firms with at least this many workers");
}

struct Loaded {
  Dataset data;
  MacroContext macro;
  ValueBasis basis = ValueBasis::gross_margin;
  AggregateMode mode = AggregateMode::pooled;
  std::size_t skipped = 0;
  std::vector<RowIssue> issues;
};

Loaded load(const DataOptions& o) {
  Loaded l;
  Schema schema;
  if (!o.schema_path.empty()) schema = config::schema_from_json(config::read_json_file(o.schema_path));
  if (!o.currency.empty()) schema.currency_unit = o.currency;
  schema.strict = o.strict;
  if (!o.macro_path.empty()) l.macro = config::macro_from_json(config::read_json_file(o.macro_path));
  l.basis = *parse_value_basis(o.basis);
  l.mode = o.mode == "mean" ? AggregateMode::mean : AggregateMode::pooled;

  MergePolicy policy = o.merge_policy == "prefer-a"   ? MergePolicy::prefer_a
                       : o.merge_policy == "prefer-b" ? MergePolicy::prefer_b
                                                      : MergePolicy::reject_conflict;
  bool first = true;
  for (const auto& path : o.inputs) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    Schema s = schema;
    if (s.provenance.empty()) s.provenance = fs::path(path).filename().string();
    auto parsed = parse_firm_records(in, s);
    for (auto& issue : parsed.issues) {
      std::cerr << path << ": skipped " << issue.message << '\n';
      l.issues.push_back(std::move(issue));
    }
    l.skipped += parsed.skipped_rows;
    l.data = first ? std::move(parsed.dataset) : merge_datasets(l.data, parsed.dataset, policy);
    first = false;
  }

  RecordFilter f;
  f.year = o.year;
  if (o.country) f.country = Country(*o.country);
  if (o.sector_class) f.sector_class = parse_sector_class(*o.sector_class);
  f.min_workers = o.min_workers;
  l.data = filter_dataset(l.data, f);
  return l;
}

std::vector<std::string> files_of(const DataOptions& d) {
  auto v = d.inputs;
  v.push_back(d.schema_path);
  v.push_back(d.macro_path);
  return v;
}

// Records whose productivity can be computed (workers > 0, basis inputs
// present); the rest are counted.
std::pair<Dataset, std::size_t> usable(const Dataset& d, ValueBasis basis, const MacroContext& ctx) {
  Dataset out;
  out.currency_unit = d.currency_unit;
  out.provenance = d.provenance;
  std::size_t refused = 0;
  for (const auto& r : d.records) {
    if (r.workers <= 0) {
      ++refused;
      continue;
    }
    try {
      (void)value_for_basis(r, basis, ctx);
      out.records.push_back(r);
    } catch (const IncompleteRecordError&) {
      ++refused;
    }
  }
  return {std::move(out), refused};
}

Cell opt_cell(std::optional<double> v) { return v ? Cell(*v) : Cell(emit::Empty{}); }
Cell log_cell(double v) { return v > 0 ? Cell(std::log10(v)) : Cell(emit::Empty{}); }

Table summary_table() { return Table{{"metric", "value"}, {}}; }

// ---------------------------------------------------------------- commands

void cmd_ingest(CLI::App* sub, const DataOptions& d, const OutputOptions& o) {
  auto l = load(d);
  Run run(sub, o, files_of(d));
  run.dataset("dataset", l.data);

  Table s = summary_table();
  std::map<int, std::size_t> per_year;
  std::map<std::string, std::size_t> per_country;
  std::size_t mfg = 0, non_mfg = 0, no_class = 0;
  for (const auto& r : l.data.records) {
    ++per_year[r.year];
    ++per_country[r.country.code()];
    if (!r.sector_class) {
      ++no_class;
    } else if (*r.sector_class == SectorClass::manufacturing) {
      ++mfg;
    } else {
      ++non_mfg;
    }
  }
  s.add({std::string("records"), static_cast<std::int64_t>(l.data.size())});
  s.add({std::string("skipped_rows"), static_cast<std::int64_t>(l.skipped)});
  s.add({std::string("currency_unit"), l.data.currency_unit});
  s.add({std::string("manufacturing"), static_cast<std::int64_t>(mfg)});
  s.add({std::string("non_manufacturing"), static_cast<std::int64_t>(non_mfg)});
  s.add({std::string("unclassified"), static_cast<std::int64_t>(no_class)});
  for (const auto& [y, n] : per_year) s.add({"year:" + std::to_string(y), static_cast<std::int64_t>(n)});
  for (const auto& [c, n] : per_country) s.add({"country:" + c, static_cast<std::int64_t>(n)});
  run.table("ingest_summary", s);

  if (!l.issues.empty()) {
    Table issues{{"line", "message"}, {}};
    for (const auto& i : l.issues) issues.add({static_cast<std::int64_t>(i.line), i.message});
    run.table("ingest_issues", issues);
  }
}

void cmd_measures(CLI::App* sub, const DataOptions& d, const OutputOptions& o) {
  auto l = load(d);
  Run run(sub, o, files_of(d));
  auto [data, refused] = usable(l.data, l.basis, l.macro);

  Table firms{{"firm_id", "year", "country", "sector", "sector_class", "workers", "value", "productivity",
               "log10_workers", "log10_productivity"},
              {}};
  for (const auto& r : data.records) {
    auto pm = labor_productivity(r, l.basis, l.macro);
    firms.add({r.firm_id, static_cast<std::int64_t>(r.year), r.country.code(), r.sector,
               r.sector_class ? std::string(to_string(*r.sector_class)) : std::string(),
               static_cast<std::int64_t>(r.workers), pm.value * static_cast<double>(r.workers), pm.value,
               std::log10(static_cast<double>(r.workers)), log_cell(pm.value)});
  }
  run.table("productivity", firms);

  Table sectors{{"sector", "firms", "total_value", "total_workers", "productivity", "log10_productivity"}, {}};
  for (const auto& [name, a] : aggregate_by_sector(data, l.basis, l.macro, l.mode)) {
    sectors.add({name, static_cast<std::int64_t>(a.firms), a.total_value, a.total_workers, a.productivity,
                 log_cell(a.productivity)});
  }
  run.table("sectors", sectors);

  Table coverage{{"country", "year", "gdp", "coverage"}, {}};
  std::map<std::pair<std::string, int>, Country> keys;
  for (const auto& r : l.data.records) keys.emplace(std::make_pair(r.country.code(), r.year), r.country);
  for (const auto& [key, country] : keys) {
    if (!l.macro.has_gdp(country, key.second)) continue;
    try {
      double cov = gdp_coverage(l.data, l.macro, country, key.second);
      coverage.add({key.first, static_cast<std::int64_t>(key.second), l.macro.gdp(country, key.second), cov});
    } catch (const ContextError& e) {
      std::cerr << "gdp coverage skipped for " << key.first << "/" << key.second << ": " << e.what() << '\n';
    }
  }
  run.table("gdp_coverage", coverage);

  Table s = summary_table();
  auto overall = aggregate_productivity(data, l.basis, l.macro, l.mode);
  s.add({std::string("basis"), std::string(to_string(l.basis))});
  s.add({std::string("firms_used"), static_cast<std::int64_t>(data.size())});
  s.add({std::string("firms_refused"), static_cast<std::int64_t>(refused)});
  s.add({std::string("productivity"), overall ? Cell(overall->productivity) : Cell(emit::Empty{})});
  s.add({std::string("total_value"), overall ? Cell(overall->total_value) : Cell(emit::Empty{})});
  s.add({std::string("total_workers"), overall ? Cell(overall->total_workers) : Cell(emit::Empty{})});
  run.table("measures_summary", s);
}

void cmd_fit_production(CLI::App* sub, const DataOptions& d, const OutputOptions& o, bool pool_years,
                        double rts_tol) {
  auto l = load(d);
  Run run(sub, o, files_of(d));
  auto [data, refused] = usable(l.data, l.basis, l.macro);
  (void)refused;

  Table design{{"firm_id", "year", "Y", "K", "L", "log10_Y", "log10_K", "log10_L"}, {}};
  for (const auto& r : data.records) {
    double y = value_for_basis(r, l.basis, l.macro);
    if (!(y > 0.0) || !r.capital || !(*r.capital > 0.0)) continue;
    double L = static_cast<double>(r.workers);
    design.add({r.firm_id, static_cast<std::int64_t>(r.year), y, *r.capital, L, std::log10(y),
                std::log10(*r.capital), std::log10(L)});
  }
  run.table("production_design", design);

  Table fits{{"country", "sector_class", "year", "logA", "A", "alpha", "beta", "se_logA", "se_alpha", "se_beta",
              "r2", "n_used", "excluded", "sum_elasticities", "classification", "error"},
             {}};
  bool any = false;
  std::optional<Error> first_error;
  for (const auto& sf : fit_by_stratum(data, l.basis, l.macro, pool_years)) {
    if (!sf.fit && !first_error) first_error.emplace(sf.error_category, sf.error);
    std::vector<Cell> row{sf.key.country,
                          sf.key.sector_class ? std::string(to_string(*sf.key.sector_class)) : std::string(),
                          sf.key.year ? Cell(static_cast<std::int64_t>(*sf.key.year)) : Cell(std::string("pooled"))};
    if (sf.fit) {
      any = true;
      const auto& f = *sf.fit;
      auto rts = classify_returns(f, rts_tol);
      for (Cell c : {Cell(f.logA), Cell(f.A()), Cell(f.alpha), Cell(f.beta), Cell(f.se_logA), Cell(f.se_alpha),
                     Cell(f.se_beta), Cell(f.r2), Cell(static_cast<std::int64_t>(f.n_used)),
                     Cell(static_cast<std::int64_t>(f.excluded)), Cell(rts.sum_elasticities),
                     Cell(std::string(to_string(rts.classification))), Cell(std::string())}) {
        row.push_back(c);
      }
    } else {
      for (int i = 0; i < 12; ++i) row.push_back(emit::Empty{});
      row.push_back(sf.error);
    }
    fits.add(std::move(row));
  }
  run.table("production_fit", fits);
  if (!any) {
    if (first_error) throw Error(first_error->category(), std::string("no stratum could be fitted: ") + first_error->what());
    throw InsufficientDataError("no stratum could be fitted");
  }
}

ParetoLevel parse_level(const std::string& s) { return s == "sector" ? ParetoLevel::sector : ParetoLevel::firm; }

TailSpec tail_for(const std::string& tail, ParetoLevel level) {
  if (!tail.empty()) return TailSpec::parse(tail);
  return level == ParetoLevel::firm ? TailSpec::top_fraction(0.1) : TailSpec::whole();
}

void cmd_fit_pareto(CLI::App* sub, const DataOptions& d, const OutputOptions& o, const std::string& level_name,
                    const std::string& tail_text) {
  auto l = load(d);
  auto level = parse_level(level_name);
  auto tail = tail_for(tail_text, level);
  Run run(sub, o, files_of(d));
  auto [data, refused] = usable(l.data, l.basis, l.macro);
  auto series = rank_size(productivity_values(data, level, l.basis, l.macro, l.mode));

  Table rs{{"rank", "value", "log10_rank", "log10_value"}, {}};
  for (const auto& p : series.points) {
    rs.add({static_cast<std::int64_t>(p.rank), p.value, std::log10(static_cast<double>(p.rank)),
            std::log10(p.value)});
  }
  run.table("rank_size", rs);

  auto fit = fit_pareto(series, tail);
  std::optional<double> hill;
  std::size_t k = fit.max_rank - fit.min_rank + 1;
  if (fit.min_rank == 1 && k < series.n()) hill = hill_estimate(series, k);
  Table t{{"level", "tail", "mu", "se_mu", "r2", "intercept", "slope", "min_rank", "max_rank", "tail_fraction", "n",
           "dropped", "refused", "hill_mu"},
          {}};
  t.add({level_name, tail.describe(), fit.mu, fit.se_mu, fit.r2, fit.intercept, -fit.mu,
         static_cast<std::int64_t>(fit.min_rank), static_cast<std::int64_t>(fit.max_rank), fit.tail_fraction,
         static_cast<std::int64_t>(fit.n_total), static_cast<std::int64_t>(series.dropped),
         static_cast<std::int64_t>(refused), opt_cell(hill)});
  run.table("pareto_fit", t);
}

void cmd_pareto_series(CLI::App* sub, const DataOptions& d, const OutputOptions& o, const std::string& level_name,
                       const std::string& tail_text) {
  auto l = load(d);
  auto level = parse_level(level_name);
  auto tail = tail_for(tail_text, level);
  Run run(sub, o, files_of(d));
  auto [data, refused] = usable(l.data, l.basis, l.macro);
  (void)refused;
  Table t{{"year", "mu", "se_mu", "r2", "tail_fraction", "status"}, {}};
  for (const auto& [year, yf] : pareto_time_series(split_by_year(data), level, l.basis, l.macro, tail, l.mode)) {
    if (yf.fit) {
      t.add({static_cast<std::int64_t>(year), yf.fit->mu, yf.fit->se_mu, yf.fit->r2, yf.fit->tail_fraction,
             std::string("ok")});
    } else {
      t.add({static_cast<std::int64_t>(year), emit::Empty{}, emit::Empty{}, emit::Empty{}, emit::Empty{},
             "absent: " + yf.error});
    }
  }
  run.table("pareto_series", t);
}

void cmd_prod_series(CLI::App* sub, const DataOptions& d, const OutputOptions& o) {
  auto l = load(d);
  Run run(sub, o, files_of(d));
  auto [data, refused] = usable(l.data, l.basis, l.macro);
  (void)refused;
  Table t{{"year", "sector_class", "firms", "total_value", "total_workers", "productivity"}, {}};
  for (const auto& [key, a] : productivity_by_class_series(data, l.basis, l.macro, l.mode)) {
    t.add({static_cast<std::int64_t>(key.first), std::string(to_string(key.second)),
           static_cast<std::int64_t>(a.firms), a.total_value, a.total_workers, a.productivity});
  }
  run.table("prod_series", t);
}

std::vector<std::int64_t> parse_thresholds(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = csv::parse_int(item);
    if (!v || *v < 0) throw ConfigError("bad threshold '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError("no thresholds given");
  return out;
}

void cmd_size_sweep(CLI::App* sub, const DataOptions& d, const OutputOptions& o, const std::string& thresholds) {
  auto l = load(d);
  auto ts = parse_thresholds(thresholds);
  Run run(sub, o, files_of(d));
  auto [data, refused] = usable(l.data, l.basis, l.macro);
  (void)refused;
  Table t{{"threshold", "productivity"}, {}};
  for (const auto& p : size_sweep(data, ts, l.basis, l.macro, l.mode)) {
    t.add({p.threshold, p.aggregate ? Cell(p.aggregate->productivity) : Cell(emit::Empty{})});
  }
  run.table("size_sweep", t);
}

void cmd_simulate(CLI::App* sub, const std::string& scenario_path, const OutputOptions& o) {
  auto scenario = config::scenario_from_json(config::read_json_file(scenario_path));
  Run run(sub, o, {scenario_path});
  auto trace = equilibrium::simulate_reallocation(scenario.firms, scenario.market, scenario.options);

  Table t{{"iteration", "max_spread", "total_output"}, {}};
  for (const auto& s : trace.steps) {
    t.add({static_cast<std::int64_t>(s.iteration), s.max_spread, s.total_output});
  }
  run.table("trace", t);

  Table f{{"id", "L", "Y", "marginal_product", "labor_productivity", "profit"}, {}};
  for (const auto& firm : trace.final_firms) {
    double y = equilibrium::output(firm);
    f.add({firm.id, firm.L, y, equilibrium::marginal_labor_productivity(firm), y / firm.L,
           equilibrium::profit(firm, scenario.market)});
  }
  run.table("equilibrium_final", f);

  auto disp = equilibrium::equilibrium_dispersion(std::span<const equilibrium::TheoryFirm>(trace.final_firms));
  Table s = summary_table();
  s.add({std::string("converged"), static_cast<std::int64_t>(trace.converged ? 1 : 0)});
  s.add({std::string("iterations"), static_cast<std::int64_t>(trace.steps.size() - 1)});
  s.add({std::string("max_relative_spread"), disp.max_relative_spread});
  s.add({std::string("coefficient_of_variation"), disp.coefficient_of_variation});
  s.add({std::string("total_labor"), trace.steps.back().total_labor});
  s.add({std::string("total_output"), trace.steps.back().total_output});
  run.table("simulate_summary", s);
}

void cmd_synth(CLI::App* sub, const std::string& spec_path, std::optional<std::uint64_t> seed, const OutputOptions& o) {
  auto job = config::synth_job_from_json(config::read_json_file(spec_path));
  if (seed) {
    job.spec.seed = *seed;
    job.sectors.seed = *seed;
  }
  Run run(sub, o, {spec_path});
  auto data = config::run_synth_job(job);
  run.dataset("dataset", data);

  Table truth = summary_table();
  if (job.kind == config::SynthJob::Kind::sector_economy) {
    const auto& s = job.sectors;
    truth.add({std::string("kind"), std::string("sector_economy")});
    truth.add({std::string("sector_sigma"), s.sector_sigma});
    truth.add({std::string("firm_mu"), s.firm_mu});
    truth.add({std::string("seed"), static_cast<std::int64_t>(s.seed)});
  } else {
    const auto& s = job.spec;
    truth.add({std::string("kind"),
               std::string(job.kind == config::SynthJob::Kind::size_graded ? "size_graded" : "cobb_douglas")});
    truth.add({std::string("logA"), s.logA});
    truth.add({std::string("alpha"), s.alpha});
    truth.add({std::string("beta"), s.beta});
    truth.add({std::string("noise_sigma"), s.noise_sigma});
    truth.add({std::string("labor_share"), s.labor_share});
    truth.add({std::string("gradient"), job.gradient});
    truth.add({std::string("seed"), static_cast<std::int64_t>(s.seed)});
  }
  truth.add({std::string("records"), static_cast<std::int64_t>(data.size())});
  run.table("synth_truth", truth);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"labprod: firm-level labor productivity analytics"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  OutputOptions out;
  DataOptions data;

  auto* ingest = app.add_subcommand("ingest", "Validate, merge and summarize firm records");
  add_data_options(ingest, data, false);
  add_output_options(ingest, out);

  auto* measures = app.add_subcommand("measures", "Per-firm productivity, sector aggregates, GDP coverage");
  add_data_options(measures, data);
  add_output_options(measures, out);

  bool pool_years = false;
  double rts_tol = kDefaultReturnsTolerance;
  auto* fitprod = app.add_subcommand("fit-production", "Cobb-Douglas fit per country x sector class x year");
  add_data_options(fitprod, data);
  add_output_options(fitprod, out);
  fitprod->add_flag("--pool-years", pool_years, "Fit all years of a stratum together");
  fitprod->add_option("--rts-tol", rts_tol, "Returns-to-scale tolerance on |alpha+beta-1|");

  std::string level = "firm";
  std::string tail;
  auto* fitpareto = app.add_subcommand("fit-pareto", "Rank-size series and Pareto index");
  add_data_options(fitpareto, data);
  add_output_options(fitpareto, out);
  fitpareto->add_option("--level", level, "Rank firms or sectors")->check(CLI::IsMember({"firm", "sector"}));
  fitpareto->add_option("--tail", tail, "whole | frac:F | ranks:A..B (default frac:0.1 for firms, whole for sectors)");

  auto* series = app.add_subcommand("pareto-series", "Pareto index per year");
  add_data_options(series, data);
  add_output_options(series, out);
  series->add_option("--level", level, "Rank firms or sectors")->check(CLI::IsMember({"firm", "sector"}));
  series->add_option("--tail", tail, "whole | frac:F | ranks:A..B");

  auto* prodseries = app.add_subcommand("prod-series", "Pooled productivity per year and sector class");
  add_data_options(prodseries, data);
  add_output_options(prodseries, out);

  std::string thresholds = "0";
  auto* sweep = app.add_subcommand("size-sweep", "Productivity of firms at or above worker thresholds");
  add_data_options(sweep, data);
  add_output_options(sweep, out);
  sweep->add_option("--thresholds", thresholds, "Comma-separated ascending worker thresholds");

  std::string scenario;
  auto* simulate = app.add_subcommand("simulate", "Labor reallocation toward equal marginal productivity");
  simulate->add_option("--scenario", scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  add_output_options(simulate, out);

  std::string spec;
  std::optional<std::uint64_t> seed;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic firm population");
  synth->add_option("--spec", spec, "Synth spec file (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", seed, "Override the spec seed");
  add_output_options(synth, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorCategory::config);
  }

  try {
    if (*ingest) cmd_ingest(ingest, data, out);
    if (*measures) cmd_measures(measures, data, out);
    if (*fitprod) cmd_fit_production(fitprod, data, out, pool_years, rts_tol);
    if (*fitpareto) cmd_fit_pareto(fitpareto, data, out, level, tail);
    if (*series) cmd_pareto_series(series, data, out, level, tail);
    if (*prodseries) cmd_prod_series(prodseries, data, out);
    if (*sweep) cmd_size_sweep(sweep, data, out, thresholds);
    if (*simulate) cmd_simulate(simulate, scenario, out);
    if (*synth) cmd_synth(synth, spec, seed, out);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.category()) << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
