#include "orthosim/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "orthosim/error.hpp"

namespace orthosim::experiment {

using protocols::ProtocolConfig;
using protocols::ProtocolKind;

namespace {

// Upper bound on simulated carriers per experiment; keeps every run at desk scale.
constexpr double kMaxCarriers = 2e8;

double carriers_per_trial(const ProtocolConfig& c) {
  switch (c.kind) {
    case ProtocolKind::glt2s: return static_cast<double>(c.key_length);
    case ProtocolKind::stream_qkd: return 2.0 * static_cast<double>(c.block_pairs);
    case ProtocolKind::pop_qsdc: return 6.0 * static_cast<double>(c.block_pairs);
  }
  return 0.0;
}

template <class T>
std::vector<T> or_single(const std::vector<T>& axis, T fallback) {
  return axis.empty() ? std::vector<T>{fallback} : axis;
}

}  // namespace

std::vector<ProtocolConfig> ExperimentSpec::points() const {
  std::vector<ProtocolConfig> out;
  for (auto kind : or_single(sweep.kinds, base.kind))
    for (const auto& theory : or_single(sweep.theories, base.theory))
      for (auto n : or_single(sweep.key_lengths, base.key_length))
        for (auto pairs : or_single(sweep.block_pairs, base.block_pairs))
          for (auto theta : or_single(sweep.theta, base.adversary.theta)) {
            ProtocolConfig c = base;
            c.kind = kind;
            c.theory = theory;
            c.key_length = n;
            c.block_pairs = pairs;
            c.adversary.theta = theta;
            out.push_back(std::move(c));
          }
  return out;
}

std::vector<protocols::Diagnostic> ExperimentSpec::validate() const {
  std::vector<protocols::Diagnostic> out;
  if (trials < 1) out.push_back({"trials", "trial count must be at least 1"});
  const auto grid = points();
  double carriers = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (auto d : grid[p].validate()) {
      if (grid.size() > 1) d.message = "sweep point " + std::to_string(p) + ": " + d.message;
      out.push_back(std::move(d));
    }
    carriers += carriers_per_trial(grid[p]) * static_cast<double>(trials);
  }
  if (carriers > kMaxCarriers)
    out.push_back({"trials", "experiment would simulate more than 2e8 carriers; reduce trials or sizes"});
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t point, std::size_t trial) {
  return derive_seed(seed_base, point, trial);
}

double PointSummary::empirical_escape() const {
  return trials == 0 ? 0.0 : static_cast<double>(escaped) / static_cast<double>(trials);
}

double PointSummary::escape_sigma() const {
  return analytic_escape && trials > 0 ? metrics::binomial_sigma(*analytic_escape, trials) : 0.0;
}

namespace {

void attach_exact(PointSummary& s) {
  const auto& c = s.config;
  using adversary::Strategy;
  const auto strategy = c.adversary.strategy;
  if (c.kind == ProtocolKind::glt2s) {
    if (strategy == Strategy::glt_intercept_resend) {
      const double d = adversary::detection_probability(c.theory.fiducials, c.theory.outcomes);
      const double per_gbit = 1.0 - c.adversary.attack_fraction * c.check_fraction * d;
      // With f = 1 and every gbit attacked this is the closed form (1 - d)^n.
      s.analytic_escape = c.check_fraction == 1.0 && c.adversary.attack_fraction == 1.0
                              ? adversary::escape_probability(c.theory.fiducials, c.theory.outcomes, c.key_length)
                              : std::pow(per_gbit, static_cast<double>(c.key_length));
    }
    return;
  }
  if (strategy != Strategy::intercept_resend && strategy != Strategy::probe) return;
  s.exact_pair = adversary::stream_pair_analytics(c.adversary);
  if (strategy == Strategy::probe) s.exact_sweep = adversary::probe_sweep_point(c.adversary.theta);
  if (c.kind == ProtocolKind::stream_qkd) {
    double pass = 0.0;
    for (std::size_t k = 0; k < 4; ++k) pass += 0.25 * s.exact_pair->transition[k][k];
    const auto checks = static_cast<double>(
        std::clamp<long long>(std::llround(c.check_fraction * static_cast<double>(c.block_pairs)), 1,
                              static_cast<long long>(c.block_pairs)));
    s.analytic_escape = std::pow(pass, checks);
  }
  if (c.kind == ProtocolKind::pop_qsdc && strategy == Strategy::probe && c.adversary.attack_fraction == 1.0 &&
      c.block_pairs <= 3)
    s.exact_block_information =
        adversary::permutation_ignorance_holevo(c.adversary.theta, c.block_pairs) / static_cast<double>(c.block_pairs);
}

}  // namespace

PointSummary run_point(const ProtocolConfig& config, std::size_t point, std::size_t trials, std::uint64_t seed_base,
                       const std::function<void(std::size_t, const protocols::RunResult&)>& on_trial) {
  PointSummary s;
  s.point = point;
  s.config = config;
  s.trials = trials;
  double error_sum = 0.0;
  double ab_sum = 0.0, ae_sum = 0.0;
  std::size_t ab_n = 0, ae_n = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    ProtocolConfig c = config;
    c.seed = trial_seed(seed_base, point, t);
    const auto r = protocols::run(c);
    s.completed += r.outcome == protocols::Outcome::completed ? 1 : 0;
    s.agreed += r.payload_agrees() ? 1 : 0;
    error_sum += r.error_rate;
    if (r.metrics.info_ab) {
      ab_sum += *r.metrics.info_ab;
      ++ab_n;
    }
    if (r.attack) {
      ++s.attacked_trials;
      const auto& ev = r.attack->detection_events;
      if (std::find(ev.begin(), ev.end(), true) == ev.end()) ++s.escaped;
      if (r.attack->eve_information) {
        ae_sum += *r.attack->eve_information;
        ++ae_n;
      }
      if (r.attack->pairing && r.attack->pairing->success) ++s.pairing_successes;
    }
    if (on_trial) on_trial(t, r);
  }
  s.mean_error_rate = trials ? error_sum / static_cast<double>(trials) : 0.0;
  if (ab_n) s.mean_info_ab = ab_sum / static_cast<double>(ab_n);
  if (ae_n) s.mean_eve_information = ae_sum / static_cast<double>(ae_n);
  attach_exact(s);
  return s;
}

std::vector<PointSummary> run_experiment(const ExperimentSpec& input, const RunOptions& options) {
  ExperimentSpec spec = input;
  if (options.trials_override) spec.trials = *options.trials_override;
  if (options.seed_override) spec.seed_base = *options.seed_override;
  const auto diagnostics = spec.validate();
  if (!diagnostics.empty())
    throw InvalidSpec("experiment: " + diagnostics.front().field + ": " + diagnostics.front().message);
  const auto grid = spec.points();
  std::vector<PointSummary> rows;
  rows.reserve(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::function<void(std::size_t, const protocols::RunResult&)> hook;
    if (options.on_trial) hook = [&, p](std::size_t t, const protocols::RunResult& r) { options.on_trial(p, t, r); };
    rows.push_back(run_point(grid[p], p, spec.trials, spec.seed_base, hook));
  }
  return rows;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : ""; }

}  // namespace

void write_csv(std::ostream& out, const std::vector<PointSummary>& rows) {
  out << "point,kind,J,K,n,N,theta,strategy,attack_fraction,check_fraction,e0,noise,noise_probability,trials,"
         "completed,agreement_rate,mean_error_rate,attacked_trials,empirical_escape,analytic_escape,escape_sigma,"
         "mean_info_ab,mean_eve_information,pairing_success_rate,exact_bit_error,exact_info_ab,exact_info_ae,"
         "sweep_error_rate,sweep_info_ab,sweep_info_ae,sweep_qkd_condition,block_info_ae\n";
  for (const auto& s : rows) {
    const auto& c = s.config;
    const double trials = static_cast<double>(s.trials);
    out << s.point << ',' << protocols::to_string(c.kind) << ',' << c.theory.fiducials << ',' << c.theory.outcomes
        << ',' << c.key_length << ',' << c.block_pairs << ',' << num(c.adversary.theta) << ','
        << adversary::to_string(c.adversary.strategy) << ',' << num(c.adversary.attack_fraction) << ','
        << num(c.check_fraction) << ',' << num(c.threshold()) << ',' << transport::to_string(c.noise.kind) << ','
        << num(c.noise.probability) << ',' << s.trials << ',' << s.completed << ','
        << num(static_cast<double>(s.agreed) / trials) << ',' << num(s.mean_error_rate) << ',' << s.attacked_trials
        << ',';
    if (s.attacked_trials) out << num(s.empirical_escape());
    out << ',' << opt(s.analytic_escape) << ',';
    if (s.analytic_escape) out << num(s.escape_sigma());
    out << ',' << opt(s.mean_info_ab) << ',' << opt(s.mean_eve_information) << ',';
    if (c.kind == ProtocolKind::pop_qsdc && s.attacked_trials)
      out << num(static_cast<double>(s.pairing_successes) / static_cast<double>(s.attacked_trials));
    out << ',';
    if (s.exact_pair) out << num(s.exact_pair->bit_error_rate) << ',' << num(s.exact_pair->info_ab) << ','
                          << num(s.exact_pair->info_ae);
    else out << ",,";
    out << ',';
    if (s.exact_sweep) {
      const auto v = metrics::check_qkd_condition(s.exact_sweep->error_rate, c.threshold(), s.exact_sweep->info_ab,
                                                  s.exact_sweep->info_ae);
      out << num(s.exact_sweep->error_rate) << ',' << num(s.exact_sweep->info_ab) << ',' << num(s.exact_sweep->info_ae)
          << ',' << (v.qkd_condition ? "true" : "false");
    } else {
      out << ",,,";
    }
    out << ',' << opt(s.exact_block_information) << '\n';
  }
}

// ----------------------------------------------------------------- builtins

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> list = {
      {"escape-curve", "GLT-2S 2-in-2-out, full intercept-resend, f = 1: escape rate against (3/4)^n, n = 1..10",
       R"(schema = orthosim/1
[protocol]
kind = glt2s
fiducials = 2
outcomes = 2
check_fraction = 1
abort_threshold = 0
[adversary]
strategy = glt-intercept-resend
[experiment]
trials = 100000
seed_base = 20240101
sweep_n = 1,2,3,4,5,6,7,8,9,10
)"},
      {"six-state-curve", "GLT-2S 3-in-2-out (qubit-like fiducials): escape rate against (2/3)^n, n = 1..10",
       R"(schema = orthosim/1
[protocol]
kind = glt2s
fiducials = 3
outcomes = 2
check_fraction = 1
abort_threshold = 0
[adversary]
strategy = glt-intercept-resend
[experiment]
trials = 100000
seed_base = 20240102
sweep_n = 1,2,3,4,5,6,7,8,9,10
)"},
      {"jk-grid", "GLT-2S over (J, K) in {2,3,4}^2 and n in {1, 5}: escape against the J-in-K-out formula",
       R"(schema = orthosim/1
[protocol]
kind = glt2s
check_fraction = 1
abort_threshold = 0
[adversary]
strategy = glt-intercept-resend
[experiment]
trials = 100000
seed_base = 20240103
sweep_jk = 2x2,2x3,2x4,3x2,3x3,3x4,4x2,4x3,4x4
sweep_n = 1,5
)"},
      {"probe-sweep", "Streaming Bell-pair QKD under the probe family on a 16-point theta grid, with exact trade-off columns",
       R"(schema = orthosim/1
[protocol]
kind = stream-qkd
block_pairs = 2000
check_fraction = 0.5
abort_threshold = calibrated
[adversary]
strategy = probe
[experiment]
trials = 4
seed_base = 20240104
sweep_theta = 0:pi/2:16
)"},
      {"block-advantage", "PoP-QSDC under per-particle probes: permutation-averaged I'(A:E) per pair and pairing guesses",
       R"(schema = orthosim/1
[protocol]
kind = pop-qsdc
abort_threshold = 1
[adversary]
strategy = probe
[experiment]
trials = 2000
seed_base = 20240105
sweep_theta = pi/8,pi/4,pi/2
sweep_pairs = 2,3
)"},
      {"completeness", "All three protocols, noiseless and adversary-free: completion and payload agreement",
       R"(schema = orthosim/1
[protocol]
key_length = 200
block_pairs = 64
check_fraction = 0.25
abort_threshold = 0
[experiment]
trials = 100
seed_base = 20240106
sweep_kind = glt2s,stream-qkd,pop-qsdc
)"},
  };
  return list;
}

const Builtin* find_builtin(const std::string& name) {
  for (const auto& b : builtins())
    if (b.name == name) return &b;
  return nullptr;
}

// ------------------------------------------------------- transcript metrics

TranscriptMetrics evaluate_transcript(const transport::Transcript& transcript) {
  TranscriptMetrics m;
  std::optional<transport::ClassicalMessage> reference, report, outcomes, verdict;
  std::vector<transport::ClassicalMessage> pop_reports;
  for (const auto& rec : transcript.records()) {
    ++m.records;
    if (rec.tampered) ++m.tampered;
    if (rec.channel == transport::ChannelKind::carrier) {
      ++m.carriers;
      continue;
    }
    auto msg = transport::decode_payload(rec.payload);
    if (!msg) continue;
    if (msg->topic == "check-reference") reference = msg;
    else if (msg->topic == "check-report") report = msg;
    else if (msg->topic == "check-outcomes") outcomes = msg;
    else if (msg->topic == "check-verdict") verdict = msg;
    else if (msg->topic == "check-report-1" || msg->topic == "check-report-2") pop_reports.push_back(*msg);
  }

  if (reference && report) {
    if (reference->data.size() != report->data.size())
      throw InvalidSpec("transcript: check reference and report differ in length");
    metrics::JointCounts counts(2, 2);
    for (std::size_t i = 0; i < reference->data.size(); ++i) {
      const auto a = static_cast<std::size_t>(reference->data[i] != 0);
      const auto b = static_cast<std::size_t>(report->data[i] != 0);
      counts.add(a, b);
      m.bit_errors += a != b ? 1 : 0;
    }
    m.checked_bits = reference->data.size();
    if (m.checked_bits) m.check_information = metrics::mutual_information(counts);
  } else if (outcomes && verdict && !verdict->data.empty()) {
    m.checked_bits = outcomes->data.size();
    m.bit_errors = static_cast<std::size_t>(verdict->data.front());
  } else {
    // PoP checks compare against the singlet, whose reference bits are all 0.
    for (const auto& r : pop_reports) {
      m.checked_bits += r.data.size();
      for (auto v : r.data) m.bit_errors += v != 0 ? 1 : 0;
    }
  }
  if (m.checked_bits) m.error_rate = static_cast<double>(m.bit_errors) / static_cast<double>(m.checked_bits);
  return m;
}

}  // namespace orthosim::experiment
