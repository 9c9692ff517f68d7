#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "mcheck/error.hpp"
#include "mcheck/mtest.hpp"
#include "mcheck/sampler.hpp"

namespace mcheck::cli {

namespace {

constexpr const char* kSparse = "bfs_sparse";
constexpr const char* kDense = "bfs_dense";
constexpr const char* kOracle = "oracle_cubic";

template <class F>
double time_seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

std::uint64_t trial_seed(std::uint64_t seed, index_t n, index_t nnz, std::uint64_t trial) {
  return derive_seed(derive_seed(derive_seed(seed, n), nnz), trial);
}

struct Accumulated {
  double sparse = 0.0;
  double dense = 0.0;
  double oracle = 0.0;
  std::size_t dense_runs = 0;
  std::size_t oracle_runs = 0;
  std::size_t m_matrices = 0;
  std::size_t disagreements = 0;
};

struct TrialResult {
  std::vector<BenchRecord> records;
  bool verdict = false;
  bool unanimous = true;
};

TrialResult run_trial(const BenchOptions& opts, index_t n, index_t nnz, std::uint64_t seed) {
  SampleConfig cfg;
  cfg.n = n;
  cfg.nnz = nnz;
  cfg.seed = seed;
  const CsrMatrix A = sample_wdd_l0(cfg);

  TrialResult out;
  MatrixVerdict sparse;
  const double ts = time_seconds([&] { sparse = is_nonsingular_m_matrix(A, opts.tol); });
  out.verdict = sparse.is_nonsingular_m_matrix;
  out.records.push_back({n, nnz, 0, kSparse, ts, sparse.is_nonsingular_m_matrix, sparse.index});

  if (n <= opts.dense_max) {
    const DenseMatrix D = A.to_dense();
    MatrixVerdict dense;
    const double td = time_seconds([&] { dense = is_nonsingular_m_matrix(D, opts.tol); });
    out.records.push_back({n, nnz, 0, kDense, td, dense.is_nonsingular_m_matrix, dense.index});
    if (n <= opts.oracle_max) {
      bool oracle = false;
      const double to = time_seconds([&] { oracle = monotone_oracle(D, opts.oracle_max); });
      out.records.push_back({n, nnz, 0, kOracle, to, oracle, std::nullopt});
    }
  }
  for (const auto& r : out.records) {
    if (r.verdict != out.verdict) out.unanimous = false;
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", x);
  return buf;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

index_t parse_index_field(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return static_cast<index_t>(v);
}

}  // namespace

void BenchOptions::validate() const {
  if (sizes.empty() || nnz.empty()) throw Error(Errc::InvalidArgs, "sizes and nnz lists must be nonempty");
  if (trials < 1) throw Error(Errc::InvalidArgs, "trials must be at least 1");
  for (index_t n : sizes) {
    if (n < 1) throw Error(Errc::InvalidArgs, "sizes must be at least 1");
    for (index_t k : nnz) {
      if (k < 1 || k > n) {
        throw Error(Errc::InvalidArgs, "nnz " + std::to_string(k) + " is outside [1, " + std::to_string(n) + "]");
      }
    }
  }
}

std::string csv_header() { return "n,nnz,trial,method,wall_time_s,verdict,index"; }

std::string to_csv_row(const BenchRecord& r) {
  std::string line = std::to_string(r.n) + ',' + std::to_string(r.nnz) + ',' + std::to_string(r.trial) + ',' +
                     r.method + ',' + format_double(r.wall_time_s) + ',' + (r.verdict ? "true" : "false") + ',';
  if (r.index) line += r.index->to_string();
  return line;
}

BenchRecord parse_csv_row(const std::string& line) {
  const auto f = split_commas(line);
  if (f.size() != 7) throw Error(Errc::ParseError, "expected 7 CSV fields in '" + line + "'");
  BenchRecord r;
  try {
    r.n = parse_index_field(f[0]);
    r.nnz = parse_index_field(f[1]);
    r.trial = parse_index_field(f[2]);
    r.method = f[3];
    if (r.method != "bfs_sparse" && r.method != "bfs_dense" && r.method != "oracle_cubic") {
      throw std::invalid_argument(f[3]);
    }
    std::size_t used = 0;
    r.wall_time_s = std::stod(f[4], &used);
    if (used != f[4].size() || !(r.wall_time_s >= 0.0)) throw std::invalid_argument(f[4]);
    if (f[5] != "true" && f[5] != "false") throw std::invalid_argument(f[5]);
    r.verdict = f[5] == "true";
    if (f[6] == "infinite") {
      r.index = ContractionIndex::infinite();
    } else if (!f[6].empty()) {
      r.index = ContractionIndex::finite(parse_index_field(f[6]));
    }
  } catch (const std::logic_error&) {
    throw Error(Errc::ParseError, "malformed CSV row '" + line + "'");
  }
  return r;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

BenchOutcome run_bench(const BenchOptions& opts, std::ostream& csv, std::ostream& summary) {
  opts.validate();
  BenchOutcome outcome;
  csv << csv_header() << '\n';
  for (index_t n : opts.sizes) {
    for (index_t nnz : opts.nnz) {
      // Warmup trials use their own seed streams and are not recorded.
      for (index_t w = 0; w < opts.warmup; ++w) {
        run_trial(opts, n, nnz, trial_seed(opts.seed, n, nnz, (std::uint64_t{1} << 32) + w));
      }
      Accumulated acc;
      for (index_t t = 0; t < opts.trials; ++t) {
        TrialResult tr = run_trial(opts, n, nnz, trial_seed(opts.seed, n, nnz, t));
        if (tr.verdict) ++acc.m_matrices;
        if (!tr.unanimous) ++acc.disagreements;
        for (auto& r : tr.records) {
          r.trial = t;
          if (r.method == kSparse) {
            acc.sparse += r.wall_time_s;
          } else if (r.method == kDense) {
            acc.dense += r.wall_time_s;
            ++acc.dense_runs;
          } else {
            acc.oracle += r.wall_time_s;
            ++acc.oracle_runs;
          }
          csv << to_csv_row(r) << '\n';
          ++outcome.rows;
        }
      }
      outcome.disagreements += acc.disagreements;

      const double trials = static_cast<double>(opts.trials);
      const WilsonInterval ci = wilson_interval(acc.m_matrices, opts.trials);
      summary << "n=" << n << " nnz=" << nnz << " mean_s " << kSparse << '=' << format_double(acc.sparse / trials);
      if (acc.dense_runs > 0) {
        summary << ' ' << kDense << '=' << format_double(acc.dense / static_cast<double>(acc.dense_runs));
      }
      if (acc.oracle_runs > 0) {
        summary << ' ' << kOracle << '=' << format_double(acc.oracle / static_cast<double>(acc.oracle_runs));
      }
      summary << " p_m_matrix=" << static_cast<double>(acc.m_matrices) / trials << " ci99=[" << ci.lo << ", "
              << ci.hi << "]";
      if (acc.disagreements > 0) summary << " disagreements=" << acc.disagreements;
      summary << '\n';
    }
  }
  return outcome;
}

}  // namespace mcheck::cli
