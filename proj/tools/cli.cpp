#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "bench.hpp"
#include "mcheck/contraction.hpp"
#include "mcheck/error.hpp"
#include "mcheck/mmio.hpp"
#include "mcheck/mtest.hpp"
#include "mcheck/sampler.hpp"

namespace mcheck::cli {

namespace {

constexpr const char* kTolEnv = "MCHECK_TOL";

std::optional<Tolerance> resolve_tolerance(const std::optional<double>& flag) {
  if (flag) return Tolerance(*flag);
  const char* env = std::getenv(kTolEnv);
  if (env == nullptr || *env == '\0') return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0') {
    throw Error(Errc::InvalidTolerance, std::string(kTolEnv) + " is not a number: '" + env + "'");
  }
  return Tolerance(v);
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

nlohmann::json index_json(const std::optional<ContractionIndex>& idx) {
  if (!idx) return nullptr;
  if (idx->is_finite()) return idx->value();
  return "infinite";
}

int cmd_check(const std::string& path, const std::optional<double>& tol_flag, const std::string& format,
              std::ostream& out) {
  const CsrMatrix A = read_matrix_market(path);
  const MatrixVerdict v = is_nonsingular_m_matrix(A, resolve_tolerance(tol_flag));
  if (format == "json") {
    nlohmann::json j;
    j["schema"] = 1;
    j["rows"] = A.nrows();
    j["cols"] = A.ncols();
    j["nnz"] = A.nnz();
    j["square"] = v.is_square;
    j["z"] = v.is_z;
    j["l0"] = v.is_l0;
    j["l"] = v.is_l;
    j["wdd"] = v.is_wdd;
    j["sdd"] = v.is_sdd;
    j["wcdd"] = v.is_wcdd;
    j["con"] = index_json(v.index);
    j["nonsingular_m_matrix"] = v.is_nonsingular_m_matrix;
    out << j.dump(2) << '\n';
  } else {
    out << "order: " << A.nrows() << " x " << A.ncols() << ", " << A.nnz() << " stored entries\n"
        << "square: " << yes_no(v.is_square) << '\n'
        << "Z-matrix: " << yes_no(v.is_z) << '\n'
        << "L0-matrix: " << yes_no(v.is_l0) << '\n'
        << "L-matrix: " << yes_no(v.is_l) << '\n'
        << "w.d.d.: " << yes_no(v.is_wdd) << '\n'
        << "s.d.d.: " << yes_no(v.is_sdd) << '\n'
        << "w.c.d.d.: " << yes_no(v.is_wcdd) << '\n'
        << "con: " << (v.index ? v.index->to_string() : std::string("n/a")) << '\n'
        << "nonsingular M-matrix: " << yes_no(v.is_nonsingular_m_matrix) << '\n';
  }
  return v.is_nonsingular_m_matrix ? kYes : kNo;
}

int cmd_index(const std::string& path, const std::optional<double>& tol_flag, std::ostream& out) {
  const CsrMatrix B = read_matrix_market(path);
  if (!B.is_square()) throw Error(Errc::NotSquare, "the index of contraction needs a square matrix");
  const auto tol = resolve_tolerance(tol_flag);
  const ContractionIndex idx = tol ? index_of_contraction(B, *tol) : index_of_contraction(B);
  out << idx.to_string() << '\n';
  return idx.is_finite() ? kYes : kNo;
}

struct SampleArgs {
  index_t n = 0;
  index_t nnz = 0;
  std::uint64_t seed = 0;
  std::optional<double> deficient_prob;
  std::optional<int> dyadic_bits;
  std::string output;
  bool substochastic = false;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  SampleConfig cfg;
  cfg.n = a.n;
  cfg.nnz = a.nnz;
  cfg.seed = a.seed;
  cfg.deficient_row_probability = a.deficient_prob;
  cfg.dyadic_bits = a.dyadic_bits;
  const CsrMatrix M = a.substochastic ? sample_substochastic(cfg) : sample_wdd_l0(cfg);
  if (a.output.empty() || a.output == "-") {
    write_matrix_market(M, out);
  } else {
    write_matrix_market(M, std::filesystem::path(a.output));
  }
  return kYes;
}

int cmd_oracle(const std::string& path, const std::optional<double>& tol_flag, std::ostream& out) {
  const CsrMatrix A = read_matrix_market(path);
  if (A.nrows() > kOracleMaxOrder || A.ncols() > kOracleMaxOrder) {
    throw Error(Errc::OrderTooLargeForOracle,
                "oracles accept orders up to " + std::to_string(kOracleMaxOrder) + ", got " +
                    std::to_string(std::max(A.nrows(), A.ncols())));
  }
  if (!A.is_square()) throw Error(Errc::NotSquare, "oracles need a square matrix");
  const auto tol = resolve_tolerance(tol_flag);
  const bool oracle = monotone_oracle(A.to_dense());
  const MatrixVerdict fast = is_nonsingular_m_matrix(A, tol);
  std::string brute = "n/a (not a w.d.d. L0-matrix)";
  if (fast.is_l0 && fast.is_wdd) brute = index_by_brute_force(point_jacobi(A, tol)).to_string();

  out << "monotone oracle: " << yes_no(oracle) << '\n'
      << "brute-force con: " << brute << '\n'
      << "fast test: " << yes_no(fast.is_nonsingular_m_matrix) << " (con: "
      << (fast.index ? fast.index->to_string() : std::string("n/a")) << ")\n"
      << (oracle == fast.is_nonsingular_m_matrix ? "AGREE" : "DISAGREE") << '\n';
  return oracle == fast.is_nonsingular_m_matrix ? kYes : kNo;
}

int cmd_bench(BenchOptions opts, const std::optional<double>& tol_flag, const std::string& csv_path,
              std::ostream& out, std::ostream& err) {
  opts.tol = resolve_tolerance(tol_flag);
  opts.validate();
  BenchOutcome outcome;
  if (csv_path.empty() || csv_path == "-") {
    outcome = run_bench(opts, out, err);
  } else {
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(Errc::IoError, "cannot open " + csv_path + " for writing");
    outcome = run_bench(opts, csv, out);
    csv.flush();
    if (!csv) throw Error(Errc::IoError, "write to " + csv_path + " failed");
  }
  if (outcome.disagreements > 0) {
    err << "mcheck: " << outcome.disagreements << " trial(s) with disagreeing verdicts\n";
    return kNo;
  }
  return kYes;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonsingular M-matrix test for weakly diagonally dominant matrices", "mcheck"};
  app.require_subcommand(1);
  std::optional<double> tol;
  const std::string tol_help = std::string("classification tolerance in (0, 1); overrides ") + kTolEnv;

  std::string path;
  std::string format = "text";
  auto* check = app.add_subcommand("check", "classify a Matrix Market file and test for a nonsingular M-matrix");
  check->add_option("input", path, "Matrix Market file")->required();
  check->add_option("--tol", tol, tol_help);
  check->add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));

  auto* index = app.add_subcommand("index", "index of contraction of a substochastic matrix");
  index->add_option("input", path, "Matrix Market file")->required();
  index->add_option("--tol", tol, tol_help);

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "sample a random w.d.d. L0-matrix I - B");
  sample->add_option("-n,--order", sample_args.n, "matrix order")->required();
  sample->add_option("--nnz", sample_args.nnz, "maximum nonzeros per row of B")->required();
  sample->add_option("--seed", sample_args.seed, "random seed");
  sample->add_option("--deficient-prob", sample_args.deficient_prob,
                     "probability that a row of B sums to less than one (default 1/n)");
  sample->add_option("--dyadic-bits", sample_args.dyadic_bits, "round entries of B to multiples of 2^-bits");
  sample->add_option("-o,--output", sample_args.output, "output file (default stdout)");
  sample->add_flag("--substochastic", sample_args.substochastic, "write B instead of I - B");

  auto* oracle = app.add_subcommand("oracle", "compare the fast test with the dense oracles");
  oracle->add_option("input", path, "Matrix Market file")->required();
  oracle->add_option("--tol", tol, tol_help);

  BenchOptions bench_opts;
  std::string csv_path;
  auto* bench = app.add_subcommand("bench", "time the linear-time test against the cubic oracle");
  bench->add_option("--sizes", bench_opts.sizes, "matrix orders")->delimiter(',');
  bench->add_option("--nnz", bench_opts.nnz, "maximum nonzeros per row")->delimiter(',');
  bench->add_option("--trials", bench_opts.trials, "trials per (n, nnz)");
  bench->add_option("--warmup", bench_opts.warmup, "discarded warmup trials per (n, nnz)");
  bench->add_option("--seed", bench_opts.seed, "random seed");
  bench->add_option("--oracle-max", bench_opts.oracle_max, "largest order given to the cubic oracle");
  bench->add_option("--dense-max", bench_opts.dense_max, "largest order run on the dense path");
  bench->add_option("--csv", csv_path, "CSV output file (default stdout)");
  bench->add_option("--tol", tol, tol_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kYes : kError;
  }

  try {
    if (check->parsed()) return cmd_check(path, tol, format, out);
    if (index->parsed()) return cmd_index(path, tol, out);
    if (sample->parsed()) return cmd_sample(sample_args, out);
    if (oracle->parsed()) return cmd_oracle(path, tol, out);
    if (bench->parsed()) return cmd_bench(bench_opts, tol, csv_path, out, err);
  } catch (const Error& e) {
    err << "mcheck: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    err << "mcheck: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace mcheck::cli
