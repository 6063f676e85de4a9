#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "orthosim/config_io.hpp"
#include "orthosim/experiment.hpp"

using namespace orthosim;
using namespace orthosim::experiment;
using protocols::ProtocolKind;
using std::numbers::pi;

namespace {

ExperimentSpec builtin_spec(const std::string& name) {
  const auto* b = find_builtin(name);
  EXPECT_NE(b, nullptr) << name;
  auto loaded = config_io::parse_config(b->ini);
  EXPECT_TRUE(loaded.ok()) << name;
  return loaded.spec;
}

std::string csv(const std::vector<PointSummary>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

}  // namespace

TEST(Points, OrderLastAxisFastest) {
  ExperimentSpec s;
  s.sweep.kinds = {ProtocolKind::glt2s, ProtocolKind::stream_qkd};
  s.sweep.key_lengths = {3, 4};
  s.sweep.theta = {0.1, 0.2, 0.3};
  const auto p = s.points();
  ASSERT_EQ(p.size(), 12u);
  EXPECT_EQ(p[0].kind, ProtocolKind::glt2s);
  EXPECT_EQ(p[0].key_length, 3u);
  EXPECT_DOUBLE_EQ(p[1].adversary.theta, 0.2);
  EXPECT_EQ(p[3].key_length, 4u);
  EXPECT_EQ(p[6].kind, ProtocolKind::stream_qkd);
}

TEST(Points, EmptyAxesGiveBase) {
  ExperimentSpec s;
  s.base.key_length = 17;
  const auto p = s.points();
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], s.base);
}

TEST(TrialSeed, DistinctPerPointAndTrial) {
  EXPECT_NE(trial_seed(1, 0, 1), trial_seed(1, 1, 0));
  EXPECT_NE(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
  EXPECT_EQ(trial_seed(5, 3, 9), derive_seed(5, 3, 9));
}

TEST(Experiment, DeterministicCsv) {
  auto s = builtin_spec("probe-sweep");
  s.base.block_pairs = 100;
  s.trials = 2;
  const auto a = csv(run_experiment(s));
  const auto b = csv(run_experiment(s));
  EXPECT_EQ(a, b);
  RunOptions other;
  other.seed_override = s.seed_base + 1;
  EXPECT_NE(a, csv(run_experiment(s, other)));
}

TEST(Experiment, CsvShape) {
  auto s = builtin_spec("escape-curve");
  s.trials = 10;
  const auto text = csv(run_experiment(s));
  std::istringstream in(text);
  std::string header, line;
  std::getline(in, header);
  const auto columns = std::count(header.begin(), header.end(), ',') + 1;
  EXPECT_EQ(columns, 32);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ',') + 1, columns) << line;
  }
  EXPECT_EQ(rows, 10u);
}

TEST(Experiment, EscapeCurveReproducesClosedForm) {
  auto s = builtin_spec("escape-curve");
  RunOptions o;
  o.trials_override = 4000;
  for (const auto& row : run_experiment(s, o)) {
    ASSERT_TRUE(row.analytic_escape);
    EXPECT_NEAR(*row.analytic_escape, std::pow(0.75, row.config.key_length), 1e-12);
    EXPECT_NEAR(row.empirical_escape(), *row.analytic_escape, 4 * row.escape_sigma() + 1e-9) << row.config.key_length;
  }
}

TEST(Experiment, ProbeSweepExactColumnsMonotone) {
  auto s = builtin_spec("probe-sweep");
  s.base.block_pairs = 50;
  s.trials = 1;
  const auto rows = run_experiment(s);
  ASSERT_EQ(rows.size(), 16u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].exact_sweep->error_rate, rows[i - 1].exact_sweep->error_rate);
    EXPECT_GT(rows[i].exact_sweep->info_ae, rows[i - 1].exact_sweep->info_ae);
    EXPECT_LT(rows[i].exact_sweep->info_ab, rows[i - 1].exact_sweep->info_ab);
  }
}

TEST(Experiment, OnTrialSeesEveryTrial) {
  auto s = builtin_spec("completeness");
  s.trials = 3;
  std::size_t calls = 0;
  RunOptions o;
  o.on_trial = [&](std::size_t point, std::size_t trial, const protocols::RunResult& r) {
    EXPECT_EQ(point, calls / 3);
    EXPECT_EQ(trial, calls % 3);
    EXPECT_TRUE(r.payload_agrees());
    ++calls;
  };
  const auto rows = run_experiment(s, o);
  EXPECT_EQ(calls, 9u);
  for (const auto& r : rows) EXPECT_EQ(r.agreed, 3u);
}

TEST(Experiment, ResourceGuard) {
  ExperimentSpec s;
  s.base.kind = ProtocolKind::stream_qkd;
  s.base.block_pairs = 1000000;
  s.trials = 1000;
  bool flagged = false;
  for (const auto& d : s.validate()) flagged |= d.field == "trials";
  EXPECT_TRUE(flagged);
}

TEST(Builtins, AllValidAndNamed) {
  for (const char* name : {"escape-curve", "six-state-curve", "jk-grid", "probe-sweep", "block-advantage", "completeness"})
    EXPECT_TRUE(builtin_spec(name).validate().empty()) << name;
  EXPECT_EQ(find_builtin("nope"), nullptr);
}

TEST(TranscriptMetrics, StreamMatchesRun) {
  protocols::ProtocolConfig c;
  c.kind = ProtocolKind::stream_qkd;
  c.block_pairs = 400;
  c.abort_threshold = 1.0;
  c.adversary = {adversary::Strategy::intercept_resend, 1.0, adversary::Basis::z, 0.0};
  const auto r = protocols::run(c);
  const auto m = evaluate_transcript(r.transcript);
  EXPECT_EQ(m.carriers, 800u);
  ASSERT_TRUE(m.error_rate);
  EXPECT_NEAR(*m.error_rate, r.error_rate, 1e-12);
  EXPECT_TRUE(m.check_information);
  EXPECT_GT(m.tampered, 0u);
}

TEST(TranscriptMetrics, GltAndPop) {
  protocols::ProtocolConfig g;
  g.kind = ProtocolKind::glt2s;
  g.key_length = 50;
  const auto rg = protocols::run(g);
  EXPECT_EQ(evaluate_transcript(rg.transcript).bit_errors, 0u);
  EXPECT_GT(evaluate_transcript(rg.transcript).checked_bits, 0u);

  protocols::ProtocolConfig p;
  p.kind = ProtocolKind::pop_qsdc;
  p.block_pairs = 8;
  p.abort_threshold = 0.0;
  const auto rp = protocols::run(p);
  const auto m = evaluate_transcript(rp.transcript);
  EXPECT_EQ(m.carriers, 48u);
  EXPECT_EQ(m.checked_bits, 32u);
  EXPECT_EQ(*m.error_rate, 0.0);
}
