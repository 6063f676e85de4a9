#pragma once

// Seeded batch runs over sweep grids, aggregated into one row per grid point.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "orthosim/protocols.hpp"

namespace orthosim::experiment {

struct SweepAxes {
  std::vector<protocols::ProtocolKind> kinds;
  std::vector<double> theta;
  std::vector<std::size_t> key_lengths;        // GLT n
  std::vector<gpt::FiducialSpec> theories;     // (J, K)
  std::vector<std::size_t> block_pairs;        // N

  friend bool operator==(const SweepAxes&, const SweepAxes&) = default;
};

struct ExperimentSpec {
  protocols::ProtocolConfig base;
  std::size_t trials = 1;
  std::uint64_t seed_base = 0;
  SweepAxes sweep;

  /// Cartesian product of the sweep axes applied to `base`, in the order
  /// kind, (J, K), n, N, theta (last varies fastest).
  std::vector<protocols::ProtocolConfig> points() const;
  std::vector<protocols::Diagnostic> validate() const;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// seed = derive_seed(seed_base, point, trial).
std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t point, std::size_t trial);

/// Aggregate of all trials at one grid point.
struct PointSummary {
  std::size_t point = 0;
  protocols::ProtocolConfig config;
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::size_t agreed = 0;
  double mean_error_rate = 0.0;
  /// Trials with an adversary in which no checked unit exposed her.
  std::size_t escaped = 0;
  std::size_t attacked_trials = 0;
  /// Closed-form escape probability for one trial at this point, if known.
  std::optional<double> analytic_escape;
  std::optional<double> mean_info_ab;
  std::optional<double> mean_eve_information;
  std::size_t pairing_successes = 0;
  /// Exact per-pair analytics of the attacked stream (quantum attacks).
  std::optional<adversary::PairAnalytics> exact_pair;
  /// Exact single-qubit probe trade-off at theta (probe attacks).
  std::optional<adversary::SweepPoint> exact_sweep;
  /// I'(A:E) per pair under permutation ignorance (pop-qsdc probe, N <= 3).
  std::optional<double> exact_block_information;

  double empirical_escape() const;
  double escape_sigma() const;
};

struct RunOptions {
  std::optional<std::size_t> trials_override;
  std::optional<std::uint64_t> seed_override;
  /// Called with (point, trial, result) for every trial, in order.
  std::function<void(std::size_t, std::size_t, const protocols::RunResult&)> on_trial;
};

std::vector<PointSummary> run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

PointSummary run_point(const protocols::ProtocolConfig& config, std::size_t point, std::size_t trials,
                       std::uint64_t seed_base,
                       const std::function<void(std::size_t, const protocols::RunResult&)>& on_trial = {});

/// Comma-separated table with a header row; fixed 10-digit precision.
void write_csv(std::ostream& out, const std::vector<PointSummary>& rows);

struct Builtin {
  std::string name;
  std::string description;
  std::string ini;
};

const std::vector<Builtin>& builtins();
const Builtin* find_builtin(const std::string& name);

/// Error rate and Alice-Bob check information recovered from a transcript.
struct TranscriptMetrics {
  std::size_t records = 0;
  std::size_t carriers = 0;
  std::size_t tampered = 0;
  std::size_t checked_bits = 0;
  std::size_t bit_errors = 0;
  std::optional<double> error_rate;
  /// Plug-in I(A:B) on the publicly compared check bits.
  std::optional<double> check_information;
};

TranscriptMetrics evaluate_transcript(const transport::Transcript& transcript);

}  // namespace orthosim::experiment
