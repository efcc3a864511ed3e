#include <gtest/gtest.h>

#include <cmath>

#include "cli_harness.hpp"

using namespace harness;

namespace {

const std::string kSynthSpec = LABPROD_CONFIG_DIR "/synth_cobb_douglas.json";
const std::string kMacro = LABPROD_CONFIG_DIR "/macro.json";
const std::string kScenario = LABPROD_CONFIG_DIR "/scenario_two_firms.json";

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, SynthThenFitRecoversGroundTruth) {
  auto dir = scratch("cli_synth_fit");
  ASSERT_EQ(run_cli("synth --spec " + q(kSynthSpec) + " --out " + q(dir / "s")), 0);
  auto truth = read_csv(dir / "s" / "synth_truth.csv");
  EXPECT_EQ(truth.metric("records"), "2000");
  ASSERT_EQ(run_cli("fit-production --input " + q(dir / "s" / "dataset.csv") + " --out " + q(dir / "f")), 0);
  auto fit = read_csv(dir / "f" / "production_fit.csv");
  ASSERT_EQ(fit.rows.size(), 1u);
  EXPECT_NEAR(fit.num(0, "alpha"), 0.35, 0.02);
  EXPECT_NEAR(fit.num(0, "beta"), 0.6, 0.02);
  EXPECT_NEAR(fit.num(0, "logA"), 0.0, 0.1);
  EXPECT_EQ(fit.at(0, "n_used"), "2000");
  auto design = read_csv(dir / "f" / "production_design.csv");
  EXPECT_EQ(design.rows.size(), 2000u);
}

TEST(Cli, EveryOutputCarriesHeader) {
  auto dir = scratch("cli_headers");
  ASSERT_EQ(run_cli("synth --spec " + q(kSynthSpec) + " --out " + q(dir)), 0);
  ASSERT_EQ(run_cli("measures --input " + q(dir / "dataset.csv") + " --macro " + q(kMacro) + " --out " + q(dir / "m")),
            0);
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto t = read_csv(entry.path());
    ASSERT_GE(t.comments.size(), 3u) << entry.path();
    EXPECT_EQ(t.comments[0], "# labprod 1.0.0");
    EXPECT_EQ(t.comments[1].rfind("# config-hash: ", 0), 0u);
    EXPECT_EQ(t.comments[2], "# rows: " + std::to_string(t.rows.size())) << entry.path();
  }
}

TEST(Cli, ThreePointParetoFit) {
  auto dir = scratch("cli_pareto3");
  // Productivities 8, 4, 2 against ranks 1, 2, 3: not collinear in logs, so
  // compare with a hand least-squares fit.
  write(dir / "in.csv",
        "firm_id,year,revenue,cogs,workers\n"
        "a,2003,16,0,2\n"
        "b,2003,8,0,2\n"
        "c,2003,4,0,2\n");
  ASSERT_EQ(run_cli("fit-pareto --tail whole --input " + q(dir / "in.csv") + " --out " + q(dir / "o")), 0);
  auto t = read_csv(dir / "o" / "pareto_fit.csv");
  double x[3] = {std::log10(8.0), std::log10(4.0), std::log10(2.0)};
  double y[3] = {0.0, std::log10(2.0), std::log10(3.0)};
  double mx = (x[0] + x[1] + x[2]) / 3, my = (y[0] + y[1] + y[2]) / 3, sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  EXPECT_NEAR(t.num(0, "mu"), -sxy / sxx, 1e-13);
  EXPECT_EQ(t.at(0, "tail"), "whole");
  EXPECT_EQ(t.at(0, "n"), "3");
  auto rs = read_csv(dir / "o" / "rank_size.csv");
  ASSERT_EQ(rs.rows.size(), 3u);
  EXPECT_EQ(rs.at(0, "value"), "8");
  EXPECT_EQ(rs.at(2, "rank"), "3");
}

TEST(Cli, ExactPowerLawFitIsExact) {
  auto dir = scratch("cli_pareto_exact");
  std::string csv = "firm_id,year,revenue,cogs,workers\n";
  for (int r = 1; r <= 200; ++r) {
    csv += "f" + std::to_string(r) + ",2003," + labprod::csv::format_exact(std::pow(r, -0.5)) + ",0,1\n";
  }
  write(dir / "in.csv", csv);
  ASSERT_EQ(run_cli("fit-pareto --tail whole --input " + q(dir / "in.csv") + " --out " + q(dir / "o")), 0);
  EXPECT_NEAR(read_csv(dir / "o" / "pareto_fit.csv").num(0, "mu"), 2.0, 1e-9);
}

TEST(Cli, SizeSweepAtZeroEqualsPooledMeasure) {
  auto dir = scratch("cli_sweep");
  ASSERT_EQ(run_cli("synth --spec " + q(kSynthSpec) + " --out " + q(dir)), 0);
  auto in = q(dir / "dataset.csv");
  ASSERT_EQ(run_cli("size-sweep --thresholds 0 --input " + in + " --out " + q(dir / "w")), 0);
  ASSERT_EQ(run_cli("measures --input " + in + " --out " + q(dir / "m")), 0);
  auto sweep = read_csv(dir / "w" / "size_sweep.csv");
  auto summary = read_csv(dir / "m" / "measures_summary.csv");
  ASSERT_EQ(sweep.rows.size(), 1u);
  EXPECT_EQ(sweep.at(0, "threshold"), "0");
  EXPECT_EQ(sweep.at(0, "productivity"), summary.metric("productivity"));
}

TEST(Cli, SimulateConvergesOnSampleScenario) {
  auto dir = scratch("cli_sim");
  ASSERT_EQ(run_cli("simulate --scenario " + q(kScenario) + " --out " + q(dir)), 0);
  auto s = read_csv(dir / "simulate_summary.csv");
  EXPECT_EQ(s.metric("converged"), "1");
  EXPECT_LE(*labprod::csv::parse_double(s.metric("max_relative_spread")), 1e-8);
  auto trace = read_csv(dir / "trace.csv");
  EXPECT_EQ(trace.at(0, "iteration"), "0");
  auto fin = read_csv(dir / "equilibrium_final.csv");
  ASSERT_EQ(fin.rows.size(), 2u);
  EXPECT_NEAR(fin.num(0, "L") + fin.num(1, "L"), 20.0, 1e-9);
}

TEST(Cli, JsonFormat) {
  auto dir = scratch("cli_json");
  ASSERT_EQ(run_cli("simulate --format json --scenario " + q(kScenario) + " --out " + q(dir)), 0);
  auto text = slurp(dir / "simulate_summary.json");
  EXPECT_NE(text.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(text.find("\"converged\""), std::string::npos);
}

TEST(Cli, IngestRoundTripIsStable) {
  auto dir = scratch("cli_ingest");
  ASSERT_EQ(run_cli("synth --spec " + q(kSynthSpec) + " --out " + q(dir / "a")), 0);
  ASSERT_EQ(run_cli("ingest --input " + q(dir / "a" / "dataset.csv") + " --out " + q(dir / "b")), 0);
  ASSERT_EQ(run_cli("ingest --input " + q(dir / "b" / "dataset.csv") + " --out " + q(dir / "c")), 0);
  auto strip = [](std::string s) { return s.substr(s.find("# rows:")); };
  EXPECT_EQ(strip(slurp(dir / "b" / "dataset.csv")), strip(slurp(dir / "c" / "dataset.csv")));
  EXPECT_EQ(strip(slurp(dir / "a" / "dataset.csv")), strip(slurp(dir / "b" / "dataset.csv")));
  auto summary = read_csv(dir / "b" / "ingest_summary.csv");
  EXPECT_EQ(summary.metric("records"), "2000");
  EXPECT_EQ(summary.metric("currency_unit"), "kJPY");
}

TEST(Cli, InputsAreNotModified) {
  auto dir = scratch("cli_readonly");
  ASSERT_EQ(run_cli("synth --spec " + q(kSynthSpec) + " --out " + q(dir)), 0);
  auto before = slurp(dir / "dataset.csv");
  ASSERT_EQ(run_cli("fit-pareto --input " + q(dir / "dataset.csv") + " --out " + q(dir / "p")), 0);
  ASSERT_EQ(run_cli("measures --input " + q(dir / "dataset.csv") + " --out " + q(dir / "m")), 0);
  EXPECT_EQ(slurp(dir / "dataset.csv"), before);
}

TEST(Cli, ConfigHashTracksOptionsNotPaths) {
  auto dir = scratch("cli_hash");
  ASSERT_EQ(run_cli("synth --spec " + q(kSynthSpec) + " --out " + q(dir / "x")), 0);
  ASSERT_EQ(run_cli("synth --spec " + q(kSynthSpec) + " --out " + q(dir / "y")), 0);
  ASSERT_EQ(run_cli("synth --seed 5 --spec " + q(kSynthSpec) + " --out " + q(dir / "z")), 0);
  auto hx = read_csv(dir / "x" / "synth_truth.csv").comments[1];
  EXPECT_EQ(hx, read_csv(dir / "y" / "synth_truth.csv").comments[1]);
  EXPECT_NE(hx, read_csv(dir / "z" / "synth_truth.csv").comments[1]);
  EXPECT_EQ(slurp(dir / "x" / "dataset.csv"), slurp(dir / "y" / "dataset.csv"));
}

TEST(Cli, ExitCodes) {
  auto dir = scratch("cli_exit");
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate --out " + q(dir)), 2);
  EXPECT_EQ(run_cli("measures --input /nonexistent.csv --out " + q(dir)), 2);
  EXPECT_EQ(run_cli("measures --basis bogus --input " + q(kMacro) + " --out " + q(dir)), 2);

  write(dir / "noheader.csv", "firm_id,year,revenue\nx,2003,5\n");
  EXPECT_EQ(run_cli("measures --input " + q(dir / "noheader.csv") + " --out " + q(dir / "a")), 3);

  write(dir / "bad.csv", "firm_id,year,revenue,cogs,workers\nx,2003,abc,1,1\n");
  EXPECT_EQ(run_cli("ingest --strict --input " + q(dir / "bad.csv") + " --out " + q(dir / "b")), 3);
  EXPECT_EQ(run_cli("ingest --input " + q(dir / "bad.csv") + " --out " + q(dir / "c")), 0);
  EXPECT_TRUE(fs::exists(dir / "c" / "ingest_issues.csv"));

  write(dir / "a1.csv", "firm_id,year,revenue,cogs,workers\nx,2003,5,1,1\n");
  write(dir / "a2.csv", "firm_id,year,revenue,cogs,workers\nx,2003,6,1,1\n");
  EXPECT_EQ(run_cli("ingest --input " + q(dir / "a1.csv") + " --input " + q(dir / "a2.csv") + " --out " +
                    q(dir / "d")),
            3);
  EXPECT_EQ(run_cli("ingest --merge-policy prefer-b --input " + q(dir / "a1.csv") + " --input " +
                    q(dir / "a2.csv") + " --out " + q(dir / "e")),
            0);

  write(dir / "flat.csv",
        "firm_id,year,revenue,cogs,workers\na,2003,5,0,1\nb,2003,5,0,1\nc,2003,5,0,1\nd,2003,5,0,1\n");
  EXPECT_EQ(run_cli("fit-pareto --tail whole --input " + q(dir / "flat.csv") + " --out " + q(dir / "f")), 4);

  write(dir / "collinear.csv",
        "firm_id,year,revenue,cogs,workers,capital\na,2003,5,0,1,2\nb,2003,7,0,2,4\nc,2003,9,0,4,8\n"
        "d,2003,11,0,8,16\n");
  EXPECT_EQ(run_cli("fit-production --input " + q(dir / "collinear.csv") + " --out " + q(dir / "g")), 4);

  EXPECT_EQ(run_cli("size-sweep --thresholds 10,5 --input " + q(dir / "a1.csv") + " --out " + q(dir / "h")), 2);
}

TEST(Cli, HelpListsExitCodes) {
  auto dir = scratch("cli_help");
  EXPECT_EQ(run_cli("--help", dir / "help.txt"), 0);
  EXPECT_NE(slurp(dir / "help.txt").find("Exit codes"), std::string::npos);
}
