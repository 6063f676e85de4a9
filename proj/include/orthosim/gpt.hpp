#pragma once

// Operational state algebra for generalized probabilistic theories: a state is
// the table of outcome probabilities under each fiducial measurement.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "orthosim/random.hpp"

namespace orthosim::gpt {

/// Measurement structure of a theory: J fiducial measurements with K outcomes each.
struct FiducialSpec {
  std::size_t fiducials = 2;
  std::size_t outcomes = 2;

  /// Throws InvalidSpec unless J >= 1 and K >= 2.
  void validate() const;

  friend bool operator==(const FiducialSpec&, const FiducialSpec&) = default;
};

// Fiducial labels for the 2-in-2-out theory (upper row X, lower row Z).
inline constexpr std::size_t kGbitX = 0;
inline constexpr std::size_t kGbitZ = 1;

// Fiducial labels for the qubit embedding (3-in-2-out).
inline constexpr std::size_t kQubitX = 0;
inline constexpr std::size_t kQubitY = 1;
inline constexpr std::size_t kQubitZ = 2;

inline constexpr double kNormalizationTolerance = 1e-12;

/// Immutable J x K probability table; row mu holds P(alpha | mu).
class GptState {
 public:
  /// `probs` is row-major. Rejects entries outside [0,1] and rows whose sum
  /// differs from 1 by more than kNormalizationTolerance.
  GptState(FiducialSpec spec, std::vector<double> probs);

  static GptState maximally_mixed(FiducialSpec spec);

  const FiducialSpec& spec() const { return spec_; }
  double prob(std::size_t fiducial, std::size_t outcome) const;
  std::span<const double> row(std::size_t fiducial) const;
  std::span<const double> table() const { return probs_; }

  /// True when every row is a point mass.
  bool is_pure() const;

  bool approx_equal(const GptState& other, double tol = 1e-12) const;

  friend bool operator==(const GptState&, const GptState&) = default;

 private:
  FiducialSpec spec_;
  std::vector<double> probs_;
};

/// Pure gbit: one definite outcome per fiducial.
class PureGbit {
 public:
  PureGbit(FiducialSpec spec, std::vector<std::size_t> assignment);

  /// The all-0 gbit for bit 0 and the all-(K-1) gbit for bit 1.
  static PureGbit codeword(FiducialSpec spec, bool bit);

  /// g_0..g_3 of the 2-in-2-out theory, index = 2 * X-value + Z-value.
  static PureGbit two_by_two(std::size_t index);

  const FiducialSpec& spec() const { return spec_; }
  std::span<const std::size_t> assignment() const { return assignment_; }
  GptState state() const;

  friend bool operator==(const PureGbit&, const PureGbit&) = default;

 private:
  FiducialSpec spec_;
  std::vector<std::size_t> assignment_;
};

GptState gbit_pure(const FiducialSpec& spec, std::span<const std::size_t> assignment);

/// Convex combination. Weights must be nonnegative and sum to 1 within 1e-12.
GptState mix(std::span<const GptState> states, std::span<const double> weights);

enum class PauliEigenstate { x_up, x_down, y_up, y_down, z_up, z_down };

/// Fiducial table (X, Y, Z rows) of a Pauli eigenstate.
GptState embed_qubit(PauliEigenstate eigenstate);

struct FiducialMeasurement {
  std::size_t outcome;
  GptState post;
};

/// Samples an outcome from row `fiducial`, then collapses that row onto the
/// outcome and resets every other row to the uniform distribution.
FiducialMeasurement measure_fiducial(const GptState& state, std::size_t fiducial, Rng& rng);

/// Least fiducial on which the two assignments differ; nullopt when a == b.
std::optional<std::size_t> distinguishing_fiducial(const PureGbit& a, const PureGbit& b);

struct PrBoxOutputs {
  bool a;
  bool b;
};

/// One use of the PR box: a uniform, b = a xor (x and y).
PrBoxOutputs pr_box_sample(bool x, bool y, Rng& rng);

}  // namespace orthosim::gpt
