#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace orthosim::metrics {

/// h(e) in bits; h(0) = h(1) = 0.
double binary_entropy(double e);

/// Shannon entropy in bits of a probability vector (zeros contribute 0).
double shannon_entropy(std::span<const double> probabilities);

/// Co-occurrence table of two discrete symbols (Alice/Bob or Alice/Eve).
class JointCounts {
 public:
  JointCounts(std::size_t rows, std::size_t cols);

  void add(std::size_t a, std::size_t b, std::uint64_t count = 1);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t at(std::size_t a, std::size_t b) const { return counts_[a * cols_ + b]; }
  std::uint64_t total() const { return total_; }

  double row_entropy() const;
  double col_entropy() const;
  double joint_entropy() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Plug-in estimate H(A) + H(B) - H(A,B) on empirical frequencies (no bias
/// correction). Throws InvalidSpec on an empty table.
double mutual_information(const JointCounts& counts);

/// Bit-by-bit table of two equal-length strings.
JointCounts bit_counts(const std::vector<bool>& a, const std::vector<bool>& b);

struct SecurityVerdict {
  double error_rate = 0.0;
  double threshold = 0.0;
  double info_ab = 0.0;
  double info_ae = 0.0;
  /// e <= e0.
  bool within_threshold = false;
  /// I(A:B) >= I(A:E) for the QKD form, I(A:B) > I'(A:E) for the QSDC form.
  bool information_advantage = false;
  /// e <= e0 => I(A:B) >= I(A:E). Vacuously true when e > e0.
  bool qkd_condition = false;
  /// e <= e0 => I(A:B) > I'(A:E); set only by check_qsdc_condition.
  std::optional<bool> qsdc_condition;
  std::optional<std::size_t> block_pairs;
};

SecurityVerdict check_qkd_condition(double e, double e0, double info_ab, double info_ae);

SecurityVerdict check_qsdc_condition(double e, double e0, double info_ab, double info_ae_prime,
                                     std::size_t block_pairs);

/// sqrt(p (1 - p) / trials).
double binomial_sigma(double p, std::uint64_t trials);

/// Failure probability of majority decoding for a length-r repetition code
/// (r odd) over a binary symmetric channel with crossover e.
double repetition_failure(std::size_t r, double e);

/// Smallest odd r with repetition_failure(r, e0) <= target.
std::size_t repetition_length(double e0, double target = 1e-3);

/// floor(2N (1 - h(e0))): message bits a block of N pairs may carry.
std::size_t qsdc_capacity(std::size_t block_pairs, double e0);

}  // namespace orthosim::metrics
