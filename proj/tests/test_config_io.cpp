#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "orthosim/config_io.hpp"

using namespace orthosim;
using namespace orthosim::config_io;
using protocols::ProtocolKind;
using std::numbers::pi;

namespace {

bool has_issue(const LoadedConfig& c, const std::string& field, std::size_t line = 0) {
  for (const auto& i : c.issues)
    if (i.field == field && (line == 0 || i.line == line)) return true;
  return false;
}

std::string dump(const LoadedConfig& c) {
  std::string s;
  for (const auto& i : c.issues) s += std::to_string(i.line) + " " + i.field + ": " + i.message + "\n";
  return s;
}

}  // namespace

TEST(ParseConfig, FullDocument) {
  const auto c = parse_config(R"(schema = orthosim/1
[protocol]
kind = stream-qkd
block_pairs = 40
check_fraction = 0.25
abort_threshold = 0.05
seed = 9
[adversary]
strategy = probe
theta = 3pi/8
attack_fraction = 0.5
[noise]
channel = bit-flip
probability = 0.01
[experiment]
trials = 12
seed_base = 77
sweep_theta = 0:pi/2:5
sweep_pairs = 10, 20
)");
  ASSERT_TRUE(c.ok()) << dump(c);
  const auto& b = c.spec.base;
  EXPECT_EQ(b.kind, ProtocolKind::stream_qkd);
  EXPECT_EQ(b.block_pairs, 40u);
  EXPECT_DOUBLE_EQ(b.check_fraction, 0.25);
  EXPECT_DOUBLE_EQ(b.threshold(), 0.05);
  EXPECT_EQ(b.seed, 9u);
  EXPECT_EQ(b.adversary.strategy, adversary::Strategy::probe);
  EXPECT_NEAR(b.adversary.theta, 3 * pi / 8, 1e-15);
  EXPECT_DOUBLE_EQ(b.adversary.attack_fraction, 0.5);
  EXPECT_EQ(b.noise.kind, transport::NoiseKind::bit_flip);
  EXPECT_EQ(c.spec.trials, 12u);
  EXPECT_EQ(c.spec.seed_base, 77u);
  ASSERT_EQ(c.spec.sweep.theta.size(), 5u);
  EXPECT_NEAR(c.spec.sweep.theta[4], pi / 2, 1e-15);
  EXPECT_EQ(c.spec.points().size(), 10u);
}

TEST(ParseConfig, CalibratedThresholdIsDefault) {
  const auto c = parse_config("schema = orthosim/1\n[protocol]\nkind = stream-qkd\nabort_threshold = calibrated\n");
  ASSERT_TRUE(c.ok()) << dump(c);
  EXPECT_FALSE(c.spec.base.abort_threshold);
  EXPECT_NEAR(c.spec.base.threshold(), 0.11002786443835955, 1e-9);
}

TEST(ParseConfig, MessageImpliesMessageTask) {
  const auto c = parse_config("schema = orthosim/1\n[protocol]\nkind = pop-qsdc\nblock_pairs = 8\nabort_threshold = 0\nmessage = 0110\n");
  ASSERT_TRUE(c.ok()) << dump(c);
  EXPECT_EQ(c.spec.base.task, protocols::Task::message);
  EXPECT_EQ(c.spec.base.message, (std::vector<bool>{0, 1, 1, 0}));
}

TEST(ParseConfig, UnknownKeyReportedWithLine) {
  const auto c = parse_config("schema = orthosim/1\n[protocol]\nkind = glt2s\nchek_fraction = 0.5\n");
  EXPECT_TRUE(has_issue(c, "protocol.chek_fraction", 4)) << dump(c);
  EXPECT_TRUE(has_issue(parse_config("schema = orthosim/1\n[protokol]\nkind = glt2s\n"), "protokol"));
}

TEST(ParseConfig, SchemaRequired) {
  EXPECT_TRUE(has_issue(parse_config("[protocol]\nkind = glt2s\n"), "schema"));
  EXPECT_TRUE(has_issue(parse_config("schema = orthosim/9\n"), "schema"));
}

TEST(ParseConfig, SyntaxErrorHasLine) {
  const auto c = parse_config("schema = orthosim/1\n[protocol\nkind = glt2s\n");
  ASSERT_FALSE(c.ok());
  EXPECT_EQ(c.issues.front().line, 2u);
}

TEST(ParseConfig, MalformedValues) {
  const auto c = parse_config(R"(schema = orthosim/1
[protocol]
kind = bb84
key_length = many
[adversary]
theta = pi/zero
)");
  EXPECT_TRUE(has_issue(c, "protocol.kind", 3)) << dump(c);
  EXPECT_TRUE(has_issue(c, "protocol.key_length", 4));
  EXPECT_TRUE(has_issue(c, "adversary.theta", 6));
}

TEST(ParseConfig, ZeroCheckFractionDiagnosed) {
  const auto c = parse_config("schema = orthosim/1\n[protocol]\nkind = glt2s\ncheck_fraction = 0\n");
  EXPECT_TRUE(has_issue(c, "protocol.check_fraction", 4)) << dump(c);
}

TEST(ParseConfig, CapacityDiagnosed) {
  const auto c = parse_config(read_file(std::filesystem::path(ORTHOSIM_CONFIG_DIR) / "bad_capacity.ini"));
  EXPECT_TRUE(has_issue(c, "protocol.message")) << dump(c);
}

TEST(ParseConfig, ShippedConfigsValidate) {
  for (const char* name : {"glt2s_intercept.ini", "stream_probe.ini", "pop_message.ini"}) {
    const auto c = parse_config(read_file(std::filesystem::path(ORTHOSIM_CONFIG_DIR) / name));
    EXPECT_TRUE(c.ok()) << name << "\n" << dump(c);
  }
}

TEST(ParseConfig, BuiltinsValidate) {
  for (const auto& b : experiment::builtins()) {
    const auto c = parse_config(b.ini);
    EXPECT_TRUE(c.ok()) << b.name << "\n" << dump(c);
  }
}

TEST(ParseAngle, Forms) {
  EXPECT_DOUBLE_EQ(*parse_angle("0.5"), 0.5);
  EXPECT_DOUBLE_EQ(*parse_angle("pi"), pi);
  EXPECT_DOUBLE_EQ(*parse_angle("pi/8"), pi / 8);
  EXPECT_DOUBLE_EQ(*parse_angle("3pi/8"), 3 * pi / 8);
  EXPECT_DOUBLE_EQ(*parse_angle("3*pi/8"), 3 * pi / 8);
  EXPECT_FALSE(parse_angle("pie"));
  EXPECT_FALSE(parse_angle(""));
  EXPECT_FALSE(parse_angle("pi/0"));
}

TEST(Bits, RoundTrip) {
  const std::vector<bool> b = {1, 0, 0, 1, 1};
  EXPECT_EQ(format_bits(b), "10011");
  EXPECT_EQ(*parse_bits("10011"), b);
  EXPECT_FALSE(parse_bits("1021"));
}

TEST(Fnv1a, ReferenceVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(RunJson, Fields) {
  protocols::ProtocolConfig c;
  c.kind = ProtocolKind::glt2s;
  c.key_length = 6;
  c.abort_threshold = 0.0;
  c.adversary.strategy = adversary::Strategy::glt_intercept_resend;
  const auto r = protocols::run(c);
  const auto j = to_json(r);
  EXPECT_EQ(j.at("schema"), kRunSchema);
  EXPECT_EQ(j.at("protocol"), "glt2s");
  for (const char* key : {"outcome", "error_rate", "threshold", "alice_payload", "bob_payload", "metrics", "attack",
                          "transcript"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("transcript").size(), r.transcript.records().size());
  EXPECT_EQ(j.at("attack").at("rounds_attacked"), r.attack->rounds_attacked);
  EXPECT_FALSE(to_json(r, false).contains("transcript"));
}

TEST(MetadataJson, Fields) {
  const auto c = parse_config(experiment::find_builtin("escape-curve")->ini);
  const auto j = metadata_json(c.spec, experiment::find_builtin("escape-curve")->ini, 10);
  EXPECT_EQ(j.at("schema"), kMetadataSchema);
  EXPECT_EQ(j.at("trials"), 100000u);
  EXPECT_EQ(j.at("rows"), 10u);
  EXPECT_EQ(j.at("config_fnv1a64").get<std::string>().size(), 16u);
}
