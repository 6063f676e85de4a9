#include "orthosim/metrics.hpp"

#include <cmath>

#include "orthosim/error.hpp"

namespace orthosim::metrics {

double binary_entropy(double e) {
  if (!(e >= 0.0 && e <= 1.0)) throw InvalidSpec("binary_entropy: argument outside [0,1]");
  if (e == 0.0 || e == 1.0) return 0.0;
  return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

double shannon_entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

JointCounts::JointCounts(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), counts_(rows * cols, 0) {
  if (rows == 0 || cols == 0) throw InvalidSpec("JointCounts: table needs at least one row and column");
}

void JointCounts::add(std::size_t a, std::size_t b, std::uint64_t count) {
  if (a >= rows_ || b >= cols_) throw InvalidSpec("JointCounts::add: symbol out of range");
  counts_[a * cols_ + b] += count;
  total_ += count;
}

namespace {
double entropy_of_counts(const std::vector<std::uint64_t>& counts, std::uint64_t total) {
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}
}  // namespace

double JointCounts::row_entropy() const {
  std::vector<std::uint64_t> marginal(rows_, 0);
  for (std::size_t a = 0; a < rows_; ++a)
    for (std::size_t b = 0; b < cols_; ++b) marginal[a] += at(a, b);
  return entropy_of_counts(marginal, total_);
}

double JointCounts::col_entropy() const {
  std::vector<std::uint64_t> marginal(cols_, 0);
  for (std::size_t a = 0; a < rows_; ++a)
    for (std::size_t b = 0; b < cols_; ++b) marginal[b] += at(a, b);
  return entropy_of_counts(marginal, total_);
}

double JointCounts::joint_entropy() const { return entropy_of_counts(counts_, total_); }

double mutual_information(const JointCounts& counts) {
  if (counts.total() == 0) throw InvalidSpec("mutual_information: empty table");
  const double mi = counts.row_entropy() + counts.col_entropy() - counts.joint_entropy();
  // Clamp round-off; the plug-in estimate itself is nonnegative.
  return mi < 0.0 ? 0.0 : mi;
}

JointCounts bit_counts(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw InvalidSpec("bit_counts: length mismatch");
  JointCounts counts(2, 2);
  for (std::size_t i = 0; i < a.size(); ++i) counts.add(a[i] ? 1 : 0, b[i] ? 1 : 0);
  return counts;
}

SecurityVerdict check_qkd_condition(double e, double e0, double info_ab, double info_ae) {
  SecurityVerdict v;
  v.error_rate = e;
  v.threshold = e0;
  v.info_ab = info_ab;
  v.info_ae = info_ae;
  v.within_threshold = e <= e0;
  v.information_advantage = info_ab >= info_ae;
  v.qkd_condition = !v.within_threshold || v.information_advantage;
  return v;
}

SecurityVerdict check_qsdc_condition(double e, double e0, double info_ab, double info_ae_prime,
                                     std::size_t block_pairs) {
  SecurityVerdict v = check_qkd_condition(e, e0, info_ab, info_ae_prime);
  v.information_advantage = info_ab > info_ae_prime;
  v.qsdc_condition = !v.within_threshold || v.information_advantage;
  v.block_pairs = block_pairs;
  return v;
}

double binomial_sigma(double p, std::uint64_t trials) {
  if (trials == 0) throw InvalidSpec("binomial_sigma: zero trials");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double repetition_failure(std::size_t r, double e) {
  if (r % 2 == 0) throw InvalidSpec("repetition_failure: length must be odd");
  if (!(e >= 0.0 && e <= 1.0)) throw InvalidSpec("repetition_failure: crossover outside [0,1]");
  // Sum of binomial tail terms k > r/2, computed in log space.
  double failure = 0.0;
  for (std::size_t k = r / 2 + 1; k <= r; ++k) {
    if (e == 0.0) break;
    if (e == 1.0) return 1.0;
    const double log_term = std::lgamma(static_cast<double>(r) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                            std::lgamma(static_cast<double>(r - k) + 1) + static_cast<double>(k) * std::log(e) +
                            static_cast<double>(r - k) * std::log1p(-e);
    failure += std::exp(log_term);
  }
  return failure;
}

std::size_t repetition_length(double e0, double target) {
  if (!(e0 >= 0.0 && e0 < 0.5)) throw InvalidSpec("repetition_length: threshold must lie in [0, 1/2)");
  for (std::size_t r = 1; r < 100001; r += 2)
    if (repetition_failure(r, e0) <= target) return r;
  throw ResourceLimit("repetition_length: no code length found below 100001");
}

std::size_t qsdc_capacity(std::size_t block_pairs, double e0) {
  const double bits = 2.0 * static_cast<double>(block_pairs) * (1.0 - binary_entropy(e0));
  // Nudge before flooring so exact integers survive round-off.
  return static_cast<std::size_t>(std::floor(bits + 1e-9));
}

}  // namespace orthosim::metrics
