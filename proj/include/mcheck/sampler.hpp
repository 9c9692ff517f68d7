#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mcheck/matcore.hpp"

namespace mcheck {

/// Seedable generator with platform-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not, so the conversions to
/// uniform reals, bounded integers and exponentials are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on {0, ..., n - 1}; n must be positive.
  index_t uniform_index(index_t n);
  /// Standard exponential.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent seed for stream `stream` of a run seeded with
/// `seed` (SplitMix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct SampleConfig {
  index_t n = 1;
  index_t nnz = 1;
  std::uint64_t seed = 0;
  /// Probability that a row gets a random sum below one; 1/n when unset.
  std::optional<double> deficient_row_probability;
  /// When set, every entry is a multiple of 2^-dyadic_bits (1..40), so sums,
  /// residuals and I - B are exact in double precision. Deficient rows then
  /// sum to at most 1 - 2^-dyadic_bits.
  std::optional<int> dyadic_bits;

  double deficient_probability() const;
  /// Throws InvalidConfig.
  void validate() const;
};

/// m points uniform on the unit simplex (Dirichlet with all-ones parameter),
/// by normalising independent exponentials.
std::vector<double> dirichlet_uniform(index_t m, Rng& rng);

/// m distinct indices from {0, ..., n - 1}, uniform over ordered selections
/// (partial Fisher-Yates over a virtual identity array).
std::vector<index_t> sample_without_replacement(index_t n, index_t m, Rng& rng);

/// Random substochastic B: per row, m ~ Unif{1..nnz} distinct columns; the
/// row-sum is 1, or Unif[0, 1] with the deficient-row probability; the
/// values are a scaled uniform simplex point where the first drawn column
/// receives the remainder by running subtraction, rounded down so that the
/// stored row never sums to more than the drawn row-sum.
CsrMatrix sample_substochastic(const SampleConfig& cfg);

/// I - sample_substochastic(cfg), a w.d.d. L0-matrix.
CsrMatrix sample_wdd_l0(const SampleConfig& cfg);

/// I - B for a square B.
CsrMatrix identity_minus(const CsrMatrix& B);

}  // namespace mcheck
