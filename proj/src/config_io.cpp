#include "orthosim/config_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "orthosim/error.hpp"

namespace orthosim::config_io {

namespace pt = boost::property_tree;
using protocols::ProtocolConfig;

// ------------------------------------------------------------ scalar parsing

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

// Line of `key` inside `[section]`, from a plain scan of the source text.
std::size_t locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  std::string current;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto t = trim(line);
    if (t.empty() || t.front() == ';' || t.front() == '#') continue;
    if (t.front() == '[') {
      current = std::string(trim(t.substr(1, t.find(']') - 1)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string_view::npos && current == section && trim(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

}  // namespace

std::optional<double> parse_angle(std::string_view text) {
  auto s = std::string(trim(text));
  const auto p = s.find("pi");
  if (p == std::string::npos) return parse_double(s);
  double coefficient = 1.0;
  std::string head = s.substr(0, p);
  if (!head.empty() && head.back() == '*') head.pop_back();
  if (!trim(head).empty()) {
    auto c = parse_double(head);
    if (!c) return std::nullopt;
    coefficient = *c;
  }
  double divisor = 1.0;
  std::string tail = s.substr(p + 2);
  if (!trim(tail).empty()) {
    if (trim(tail).front() != '/') return std::nullopt;
    auto d = parse_double(trim(tail).substr(1));
    if (!d || *d == 0.0) return std::nullopt;
    divisor = *d;
  }
  return coefficient * std::numbers::pi / divisor;
}

std::optional<std::vector<bool>> parse_bits(std::string_view text) {
  std::vector<bool> bits;
  for (char c : trim(text)) {
    if (c == '0' || c == '1') bits.push_back(c == '1');
    else return std::nullopt;
  }
  return bits;
}

std::string format_bits(const std::vector<bool>& bits) {
  std::string out;
  out.reserve(bits.size());
  for (bool b : bits) out.push_back(b ? '1' : '0');
  return out;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ------------------------------------------------------------ config parsing

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"schema"}},
      {"protocol",
       {"kind", "task", "fiducials", "outcomes", "key_length", "block_pairs", "check_fraction", "abort_threshold",
        "seed", "message"}},
      {"adversary", {"strategy", "attack_fraction", "basis", "theta"}},
      {"noise", {"channel", "probability"}},
      {"experiment", {"trials", "seed_base", "sweep_kind", "sweep_theta", "sweep_n", "sweep_jk", "sweep_pairs"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, const std::string& text, std::vector<ConfigIssue>& issues)
      : tree_(tree), text_(text), issues_(issues) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const pt::ptree* node = &tree_;
    if (!section.empty()) {
      auto child = tree_.get_child_optional(section);
      if (!child) return std::nullopt;
      node = &*child;
    }
    auto v = node->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return std::string(trim(*v));
  }

  void issue(const std::string& section, const std::string& key, std::string message) const {
    const std::string field = section.empty() ? key : section + "." + key;
    issues_.push_back({locate(text_, section, key), field, std::move(message)});
  }

  template <class T, class Parse>
  void read(const std::string& section, const std::string& key, T& target, Parse parse, const char* expected) const {
    auto v = raw(section, key);
    if (!v) return;
    auto parsed = parse(*v);
    if (!parsed) {
      issue(section, key, std::string("expected ") + expected + ", got '" + *v + "'");
      return;
    }
    target = static_cast<T>(*parsed);
  }

 private:
  const pt::ptree& tree_;
  const std::string& text_;
  std::vector<ConfigIssue>& issues_;
};

std::optional<adversary::Strategy> parse_strategy(const std::string& s) {
  using adversary::Strategy;
  for (auto k : {Strategy::none, Strategy::glt_intercept_resend, Strategy::intercept_resend, Strategy::probe})
    if (s == adversary::to_string(k)) return k;
  return std::nullopt;
}

std::optional<adversary::Basis> parse_basis(const std::string& s) {
  using adversary::Basis;
  for (auto k : {Basis::z, Basis::x, Basis::random})
    if (s == adversary::to_string(k)) return k;
  return std::nullopt;
}

std::optional<transport::NoiseKind> parse_noise(const std::string& s) {
  using transport::NoiseKind;
  for (auto k : {NoiseKind::none, NoiseKind::depolarizing, NoiseKind::bit_flip})
    if (s == transport::to_string(k)) return k;
  return std::nullopt;
}

template <class T, class Parse>
std::optional<std::vector<T>> parse_list(const std::string& s, Parse parse) {
  std::vector<T> out;
  for (auto item : split_list(s)) {
    auto v = parse(std::string(item));
    if (!v) return std::nullopt;
    out.push_back(static_cast<T>(*v));
  }
  return out;
}

// "a:b:count" expands to count evenly spaced values from a to b inclusive.
std::optional<std::vector<double>> parse_theta_axis(const std::string& s) {
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) return std::nullopt;
    auto a = parse_angle(parts[0]);
    auto b = parse_angle(parts[1]);
    auto count = parse_uint(parts[2]);
    if (!a || !b || !count || *count < 2) return std::nullopt;
    std::vector<double> out;
    for (std::uint64_t k = 0; k < *count; ++k)
      out.push_back(*a + (*b - *a) * static_cast<double>(k) / static_cast<double>(*count - 1));
    return out;
  }
  return parse_list<double>(s, [](const std::string& x) { return parse_angle(x); });
}

std::optional<gpt::FiducialSpec> parse_jk(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) return std::nullopt;
  auto j = parse_uint(std::string_view(s).substr(0, x));
  auto k = parse_uint(std::string_view(s).substr(x + 1));
  if (!j || !k) return std::nullopt;
  return gpt::FiducialSpec{static_cast<std::size_t>(*j), static_cast<std::size_t>(*k)};
}

const std::map<std::string, std::string>& diagnostic_sections() {
  static const std::map<std::string, std::string> sections = {
      {"kind", "protocol"},          {"task", "protocol"},          {"fiducials", "protocol"},
      {"outcomes", "protocol"},      {"key_length", "protocol"},    {"block_pairs", "protocol"},
      {"check_fraction", "protocol"}, {"abort_threshold", "protocol"}, {"message", "protocol"},
      {"strategy", "adversary"},     {"attack_fraction", "adversary"}, {"theta", "adversary"},
      {"probability", "noise"},      {"trials", "experiment"},      {"sweep", "experiment"},
  };
  return sections;
}

}  // namespace

LoadedConfig parse_config(const std::string& text) {
  LoadedConfig out;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    out.issues.push_back({e.line(), "", "syntax error: " + e.message()});
    return out;
  }

  // Unknown sections and keys are errors, so typos never pass silently.
  for (const auto& [name, node] : tree) {
    const bool is_section = !node.empty();
    const std::string section = is_section ? name : "";
    const auto known = known_keys().find(section);
    if (is_section && known == known_keys().end()) {
      out.issues.push_back({0, name, "unknown section [" + name + "]"});
      continue;
    }
    if (!is_section) {
      if (!known_keys().at("").count(name))
        out.issues.push_back({locate(text, "", name), name, "unknown key outside any section"});
      continue;
    }
    for (const auto& [key, value] : node)
      if (!known->second.count(key))
        out.issues.push_back({locate(text, section, key), section + "." + key, "unknown key"});
  }

  Reader r(tree, text, out.issues);
  auto schema = r.raw("", "schema");
  if (!schema) {
    out.issues.push_back({0, "schema", std::string("missing schema field; expected ") + kConfigSchema});
  } else if (*schema != kConfigSchema) {
    r.issue("", "schema", "unsupported schema '" + *schema + "', expected " + kConfigSchema);
  }

  auto& spec = out.spec;
  ProtocolConfig& c = spec.base;
  auto uint = [](const std::string& s) { return parse_uint(s); };
  auto real = [](const std::string& s) { return parse_double(s); };

  r.read("protocol", "kind", c.kind, protocols::parse_kind, "glt2s | stream-qkd | pop-qsdc");
  r.read("protocol", "task", c.task, protocols::parse_task, "key | message");
  r.read("protocol", "fiducials", c.theory.fiducials, uint, "a nonnegative integer");
  r.read("protocol", "outcomes", c.theory.outcomes, uint, "a nonnegative integer");
  r.read("protocol", "key_length", c.key_length, uint, "a nonnegative integer");
  r.read("protocol", "block_pairs", c.block_pairs, uint, "a nonnegative integer");
  r.read("protocol", "check_fraction", c.check_fraction, real, "a number");
  if (auto v = r.raw("protocol", "abort_threshold"); v && *v != "calibrated") {
    double e0 = 0.0;
    r.read("protocol", "abort_threshold", e0, real, "a number or 'calibrated'");
    c.abort_threshold = e0;
  }
  r.read("protocol", "seed", c.seed, uint, "a nonnegative integer");
  r.read("protocol", "message", c.message, parse_bits, "a string of 0s and 1s");
  if (r.raw("protocol", "message") && !r.raw("protocol", "task")) c.task = protocols::Task::message;

  r.read("adversary", "strategy", c.adversary.strategy, parse_strategy,
         "none | glt-intercept-resend | intercept-resend | probe");
  r.read("adversary", "attack_fraction", c.adversary.attack_fraction, real, "a number");
  r.read("adversary", "basis", c.adversary.basis, parse_basis, "z | x | random");
  r.read("adversary", "theta", c.adversary.theta, [](const std::string& s) { return parse_angle(s); },
         "an angle such as 0.3 or pi/8");

  r.read("noise", "channel", c.noise.kind, parse_noise, "none | depolarizing | bit-flip");
  r.read("noise", "probability", c.noise.probability, real, "a number");

  r.read("experiment", "trials", spec.trials, uint, "a positive integer");
  r.read("experiment", "seed_base", spec.seed_base, uint, "a nonnegative integer");
  r.read("experiment", "sweep_kind", spec.sweep.kinds,
         [](const std::string& s) { return parse_list<protocols::ProtocolKind>(s, protocols::parse_kind); },
         "a comma-separated list of protocol kinds");
  r.read("experiment", "sweep_theta", spec.sweep.theta, parse_theta_axis,
         "a comma-separated list of angles or start:stop:count");
  r.read("experiment", "sweep_n", spec.sweep.key_lengths,
         [&](const std::string& s) { return parse_list<std::size_t>(s, uint); }, "a comma-separated list of integers");
  r.read("experiment", "sweep_jk", spec.sweep.theories,
         [](const std::string& s) { return parse_list<gpt::FiducialSpec>(s, parse_jk); },
         "a comma-separated list of JxK pairs");
  r.read("experiment", "sweep_pairs", spec.sweep.block_pairs,
         [&](const std::string& s) { return parse_list<std::size_t>(s, uint); }, "a comma-separated list of integers");

  if (!out.issues.empty()) return out;

  for (const auto& d : spec.validate()) {
    const auto it = diagnostic_sections().find(d.field);
    const std::string section = it == diagnostic_sections().end() ? "" : it->second;
    const std::size_t line = section.empty() ? 0 : locate(text, section, d.field);
    out.issues.push_back({line, section.empty() ? d.field : section + "." + d.field, d.message});
  }
  return out;
}

// ------------------------------------------------------------------- output

nlohmann::ordered_json to_json(const adversary::AttackReport& report) {
  nlohmann::ordered_json j;
  j["strategy"] = report.strategy;
  j["rounds_attacked"] = report.rounds_attacked;
  auto events = nlohmann::ordered_json::array();
  for (bool e : report.detection_events) events.push_back(e);
  j["detection_events"] = events;
  j["empirical_detection"] = report.empirical_detection;
  j["analytic_escape"] = report.analytic_escape;
  j["eve_information"] = report.eve_information ? nlohmann::ordered_json(*report.eve_information) : nullptr;
  if (report.pairing) {
    j["pairing"] = {{"pairs", report.pairing->pairs},
                    {"matchings", report.pairing->matchings},
                    {"success", report.pairing->success},
                    {"success_probability", report.pairing->success_probability}};
  }
  return j;
}

nlohmann::ordered_json to_json(const metrics::SecurityVerdict& v) {
  nlohmann::ordered_json j;
  j["error_rate"] = v.error_rate;
  j["threshold"] = v.threshold;
  j["info_ab"] = v.info_ab;
  j["info_ae"] = v.info_ae;
  j["within_threshold"] = v.within_threshold;
  j["information_advantage"] = v.information_advantage;
  j["qkd_condition"] = v.qkd_condition;
  if (v.qsdc_condition) j["qsdc_condition"] = *v.qsdc_condition;
  if (v.block_pairs) j["block_pairs"] = *v.block_pairs;
  return j;
}

nlohmann::ordered_json to_json(const protocols::RunResult& r, bool include_transcript) {
  nlohmann::ordered_json j;
  j["schema"] = kRunSchema;
  j["protocol"] = protocols::to_string(r.kind);
  j["outcome"] = protocols::to_string(r.outcome);
  if (!r.abort_reason.empty()) j["abort_reason"] = r.abort_reason;
  j["error_rate"] = r.error_rate;
  j["threshold"] = r.threshold;
  j["checked_units"] = r.checked_units;
  j["error_count"] = r.error_count;
  j["raw_bits"] = r.raw_bits;
  j["sifted_bits"] = r.sifted_bits;
  if (r.kind == protocols::ProtocolKind::pop_qsdc) j["repetition_length"] = r.repetition_length;
  j["alice_payload"] = format_bits(r.alice_payload);
  j["bob_payload"] = format_bits(r.bob_payload);
  j["payload_agrees"] = r.payload_agrees();
  nlohmann::ordered_json m;
  m["info_ab"] = r.metrics.info_ab ? nlohmann::ordered_json(*r.metrics.info_ab) : nullptr;
  m["verdict"] = to_json(r.metrics.verdict);
  j["metrics"] = m;
  j["attack"] = r.attack ? to_json(*r.attack) : nullptr;
  if (include_transcript) {
    auto records = nlohmann::ordered_json::array();
    for (const auto& rec : r.transcript.records())
      records.push_back({{"round", rec.round},
                         {"channel", transport::to_string(rec.channel)},
                         {"sender", transport::to_string(rec.sender)},
                         {"payload", rec.payload},
                         {"tampered", rec.tampered}});
    j["transcript"] = records;
  }
  return j;
}

nlohmann::ordered_json metadata_json(const experiment::ExperimentSpec& spec, std::string_view config_text,
                                     std::size_t rows) {
  nlohmann::ordered_json j;
  j["schema"] = kMetadataSchema;
  j["config_schema"] = kConfigSchema;
  j["seed_base"] = spec.seed_base;
  j["trials"] = spec.trials;
  j["seed_rule"] = "splitmix64(splitmix64(splitmix64(seed_base) ^ point) ^ trial)";
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(config_text)));
  j["config_fnv1a64"] = hash;
  j["rows"] = rows;
  j["table"] = "results.csv";
  return j;
}

}  // namespace orthosim::config_io
