#include "mcheck/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

#include "mcheck/error.hpp"

namespace mcheck {

namespace {

// a + b = first + second exactly.
std::pair<double, double> two_sum(double a, double b) {
  const double x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  return {x, (a - av) + (b - bv)};
}

}  // namespace

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

index_t Rng::uniform_index(index_t n) {
  const std::uint64_t bound = n;
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<index_t>(x % bound);
}

double Rng::exponential() { return -std::log1p(-uniform01()); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SampleConfig::deficient_probability() const {
  return deficient_row_probability.value_or(1.0 / static_cast<double>(n));
}

void SampleConfig::validate() const {
  if (n < 1) throw Error(Errc::InvalidConfig, "n must be at least 1");
  if (nnz < 1 || nnz > n) {
    throw Error(Errc::InvalidConfig, "nnz must lie in [1, n]; got nnz=" + std::to_string(nnz) +
                                         " with n=" + std::to_string(n));
  }
  const double p = deficient_probability();
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(Errc::InvalidConfig, "deficient-row probability must lie in (0, 1]");
  }
  if (dyadic_bits && (*dyadic_bits < 1 || *dyadic_bits > 40)) {
    throw Error(Errc::InvalidConfig, "dyadic bits must lie in [1, 40]");
  }
}

std::vector<double> dirichlet_uniform(index_t m, Rng& rng) {
  if (m == 0) throw Error(Errc::InvalidArgs, "simplex dimension must be positive");
  std::vector<double> x(m);
  KahanAccumulator total;
  do {
    total = {};
    for (auto& v : x) {
      v = rng.exponential();
      total += v;
    }
  } while (total.sum == 0.0);
  for (auto& v : x) v /= total.sum;
  return x;
}

std::vector<index_t> sample_without_replacement(index_t n, index_t m, Rng& rng) {
  if (m > n) throw Error(Errc::InvalidArgs, "cannot draw more indices than the population");
  // Only the displaced slots of the virtual array [0, n) are stored.
  std::unordered_map<index_t, index_t> displaced;
  displaced.reserve(2 * m);
  auto slot = [&](index_t k) {
    const auto it = displaced.find(k);
    return it == displaced.end() ? k : it->second;
  };
  std::vector<index_t> out;
  out.reserve(m);
  for (index_t k = 0; k < m; ++k) {
    const index_t r = k + rng.uniform_index(n - k);
    const index_t picked = slot(r);
    displaced[r] = slot(k);
    out.push_back(picked);
  }
  return out;
}

CsrMatrix sample_substochastic(const SampleConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const index_t n = cfg.n;
  const double p = cfg.deficient_probability();
  const double grid = cfg.dyadic_bits ? std::ldexp(1.0, *cfg.dyadic_bits) : 0.0;
  auto snap = [grid](double x) { return grid > 0.0 ? std::floor(x * grid) / grid : x; };

  std::vector<Triplet> entries;
  entries.reserve(n * (cfg.nnz + 1) / 2 + n);
  std::vector<double> b;
  for (index_t i = 0; i < n; ++i) {
    const index_t m = 1 + rng.uniform_index(cfg.nnz);
    double s = rng.uniform01() < p ? rng.uniform01() : 1.0;
    if (grid > 0.0 && s < 1.0) s = std::min(snap(s), 1.0 - 1.0 / grid);
    const auto cols = sample_without_replacement(n, m, rng);

    b.assign(m, 0.0);
    b[0] = s;
    if (m >= 2) {
      // Components 2..m of an order-m simplex point; the first column takes
      // what is left of s. The rounding of each subtraction is tracked so
      // that the stored row never sums to more than s.
      const auto w = dirichlet_uniform(m, rng);
      double lost = 0.0;
      for (index_t k = 1; k < m; ++k) {
        b[k] = snap(s * w[k]);
        const auto [diff, err] = two_sum(b[0], -b[k]);
        b[0] = diff;
        lost += err;
      }
      const auto [rest, err] = two_sum(b[0], lost);
      b[0] = err < 0.0 ? std::nextafter(rest, -1.0) : rest;
    }
    assert(b[0] >= -8.0 * kUnitRoundoff * s);
    b[0] = std::max(b[0], 0.0);

    for (index_t k = 0; k < m; ++k) entries.push_back({i, cols[k], b[k]});
  }
  return csr_from_triplets(n, n, entries);
}

CsrMatrix sample_wdd_l0(const SampleConfig& cfg) { return identity_minus(sample_substochastic(cfg)); }

CsrMatrix identity_minus(const CsrMatrix& B) {
  if (!B.is_square()) throw Error(Errc::NotSquare, "I - B needs a square B");
  std::vector<Triplet> entries;
  entries.reserve(B.nnz() + B.nrows());
  for (index_t i = 0; i < B.nrows(); ++i) {
    entries.push_back({i, i, 1.0});
    const auto cols = B.row_cols(i);
    const auto vals = B.row_values(i);
    for (index_t k = 0; k < cols.size(); ++k) entries.push_back({i, cols[k], -vals[k]});
  }
  return csr_from_triplets(B.nrows(), B.ncols(), entries);
}

}  // namespace mcheck
