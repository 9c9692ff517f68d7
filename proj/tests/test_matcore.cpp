#include <doctest.h>

#include <mcheck/contraction.hpp>
#include <mcheck/error.hpp>
#include <mcheck/matcore.hpp>
#include <mcheck/sampler.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "support/exact.hpp"
#include "support/fixtures.hpp"

using namespace mcheck;

namespace {

Errc error_code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an mcheck::Error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("csr_from_triplets builds canonical rows") {
  SUBCASE("single entry") {
    const std::vector<Triplet> t{{0, 1, 1.0}};
    const CsrMatrix M = csr_from_triplets(2, 2, t);
    CHECK(M.nnz() == 1);
    CHECK(M.at(0, 1) == 1.0);
    CHECK(M.at(1, 0) == 0.0);
  }
  SUBCASE("exact cancellation drops the entry") {
    const std::vector<Triplet> t{{0, 0, 0.5}, {0, 0, -0.5}};
    CHECK(csr_from_triplets(2, 2, t).nnz() == 0);
  }
  SUBCASE("subdiagonal ones of order 5") {
    const CsrMatrix M = fixtures::subdiagonal_ones(5);
    CHECK(M.nnz() == 4);
    CHECK(M.row_nnz(0) == 0);
    for (index_t i = 1; i < 5; ++i) {
      REQUIRE(M.row_nnz(i) == 1);
      CHECK(M.row_cols(i)[0] == i - 1);
    }
  }
  SUBCASE("duplicates are summed and columns sorted") {
    const std::vector<Triplet> t{{1, 2, 0.25}, {1, 0, 0.5}, {1, 2, 0.25}, {0, 1, 1.0}};
    const CsrMatrix M = csr_from_triplets(2, 3, t);
    CHECK(M.nnz() == 3);
    CHECK(std::vector<index_t>(M.row_cols(1).begin(), M.row_cols(1).end()) == std::vector<index_t>{0, 2});
    CHECK(M.at(1, 2) == 0.5);
  }
  SUBCASE("errors") {
    const std::vector<Triplet> out_of_range{{2, 0, 1.0}};
    CHECK(error_code_of([&] { csr_from_triplets(2, 2, out_of_range); }) == Errc::IndexOutOfRange);
    const std::vector<Triplet> nan{{0, 0, std::numeric_limits<double>::quiet_NaN()}};
    CHECK(error_code_of([&] { csr_from_triplets(2, 2, nan); }) == Errc::NonFiniteValue);
    const std::vector<Triplet> inf{{0, 0, std::numeric_limits<double>::infinity()}};
    CHECK(error_code_of([&] { csr_from_triplets(2, 2, inf); }) == Errc::NonFiniteValue);
  }
}

TEST_CASE("CsrMatrix constructor enforces the invariants") {
  CHECK_NOTHROW(CsrMatrix(2, 2, {0, 1, 2}, {1, 0}, {1.0, 2.0}));
  CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 1, 2}, {1, 0}, {1.0, 0.0}), Error);  // stored zero
  CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), Error);     // unsorted
  CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {1, 1}, {1.0, 1.0}), Error);     // repeated column
  CHECK_THROWS_AS(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), Error);             // column out of range
  CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), Error);  // decreasing row_ptr
  CHECK_THROWS_AS(CsrMatrix(1, 1, {0, 1}, {0}, {std::nan("")}), Error);
}

TEST_CASE("triplet round trip preserves the summed entries") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const index_t rows = 1 + rng.uniform_index(9);
    const index_t cols = 1 + rng.uniform_index(9);
    std::vector<Triplet> t;
    std::map<std::pair<index_t, index_t>, double> expected;
    const index_t count = rng.uniform_index(30);
    for (index_t k = 0; k < count; ++k) {
      // Quarter-integers, so summation in any order is exact.
      const double v = static_cast<double>(static_cast<int>(rng.uniform_index(9)) - 4) / 4.0;
      const Triplet e{rng.uniform_index(rows), rng.uniform_index(cols), v};
      t.push_back(e);
      expected[{e.row, e.col}] += v;
    }
    std::erase_if(expected, [](const auto& kv) { return kv.second == 0.0; });
    const CsrMatrix M = csr_from_triplets(rows, cols, t);
    const auto back = M.triplets();
    REQUIRE(back.size() == expected.size());
    for (const Triplet& e : back) CHECK(expected.at({e.row, e.col}) == e.value);
    CHECK(csr_from_triplets(rows, cols, back) == M);
  }
}

TEST_CASE("dense conversion round trip") {
  const CsrMatrix M = fixtures::eight_vertex_example();
  const DenseMatrix D = M.to_dense();
  CHECK(D(1, 6) == 0.5);
  CHECK(CsrMatrix::from_dense(D) == M);
}

TEST_CASE("validate_substochastic") {
  CHECK(validate_substochastic(fixtures::subdiagonal_ones(5)).ok);
  CHECK(validate_substochastic(fixtures::identity(4)).ok);
  SUBCASE("negative entry is reported with its row") {
    const std::vector<Triplet> t{{0, 0, 0.5}, {1, 0, -0.1}};
    const auto r = validate_substochastic(csr_from_triplets(2, 2, t));
    CHECK_FALSE(r.ok);
    CHECK(*r.row == 1);
    CHECK(*r.reason == SubstochasticViolation::NegativeEntry);
    CHECK(r.describe().find("row 2") != std::string::npos);
  }
  SUBCASE("row-sum above one") {
    const std::vector<Triplet> t{{0, 0, 0.75}, {0, 1, 0.5}};
    const auto r = validate_substochastic(csr_from_triplets(2, 2, t));
    CHECK_FALSE(r.ok);
    CHECK(*r.row == 0);
    CHECK(*r.reason == SubstochasticViolation::RowSumExceedsOne);
    CHECK(r.row_sum == 1.25);
  }
  SUBCASE("rounding above one stays within the slack") {
    const std::vector<Triplet> t{{0, 0, 1.0 - 0x1p-53}, {0, 1, 0x1p-52}};
    CHECK(validate_substochastic(csr_from_triplets(2, 2, t)).ok);
  }
}

TEST_CASE("default_tolerance") {
  const double eps = 0x1p-53;
  CHECK(default_tolerance(1).value() == 0x1p-50);
  CHECK(default_tolerance(6).value() == doctest::Approx(2.0 * (5 * eps / (1 - 5 * eps))).epsilon(1e-15));
  CHECK(default_tolerance(48).value() == doctest::Approx(2.0 * (47 * eps / (1 - 47 * eps))).epsilon(1e-15));
  CHECK(default_tolerance(48).value() > gamma_k(47));
  CHECK(gamma_k(0) == 0.0);
}

TEST_CASE("Tolerance range") {
  CHECK_THROWS_AS(Tolerance(0.0), Error);
  CHECK_THROWS_AS(Tolerance(1.0), Error);
  CHECK_THROWS_AS(Tolerance(-1e-3), Error);
  CHECK_THROWS_AS(Tolerance(std::nan("")), Error);
  CHECK(Tolerance(1e-10).value() == 1e-10);
}

TEST_CASE("classify_rows") {
  SUBCASE("only the first row of the subdiagonal example is deficient") {
    const RowClass rc = classify_rows(fixtures::subdiagonal_ones(5), Tolerance(1e-10));
    CHECK(rc.jhat_count == 1);
    CHECK(rc.contains(0));
    for (index_t i = 1; i < 5; ++i) CHECK_FALSE(rc.contains(i));
  }
  SUBCASE("identity has no deficient rows") {
    CHECK(classify_rows(fixtures::identity(7), Tolerance(1e-6)).jhat_count == 0);
  }
  SUBCASE("a deficit below the tolerance is not detected") {
    const CsrMatrix B = fixtures::b_nu(8, 0x1p-60);
    const RowClass rc = classify_rows(B, default_tolerance(B.max_row_nnz()));
    CHECK(rc.jhat_count == 0);
  }
  SUBCASE("tolerance not above the summation bound") {
    const CsrMatrix B = fixtures::b_nu(8, 0.01);
    CHECK(error_code_of([&] { classify_rows(B, Tolerance(gamma_k(7))); }) == Errc::ToleranceTooSmall);
    CHECK(error_code_of([&] { classify_rows(B, Tolerance(gamma_k(6))); }) == Errc::ToleranceTooSmall);
    CHECK_NOTHROW(classify_rows(B, Tolerance(2 * gamma_k(7))));
  }
  SUBCASE("order too large for the floating-point model") {
    const index_t huge = (index_t{1} << 53) + 2;
    const CsrMatrix B(1, huge, {0, 1}, {0}, {0.5});
    CHECK(error_code_of([&] { classify_rows(B, Tolerance(1e-6)); }) == Errc::OrderTooLargeForFloat);
  }
}

TEST_CASE("classify_rows is permutation equivariant") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const index_t n = 1 + rng.uniform_index(15);
    SampleConfig cfg;
    cfg.n = n;
    cfg.nnz = 1 + rng.uniform_index(n);
    cfg.seed = rng.next();
    cfg.deficient_row_probability = 0.4;
    const CsrMatrix B = sample_substochastic(cfg);
    const auto perm = fixtures::random_permutation(n, rng);
    const Tolerance tol = default_tolerance(B.max_row_nnz());
    const RowClass a = classify_rows(B, tol);
    const RowClass b = classify_rows(permute_symmetric(B, perm), tol);
    for (index_t k = 0; k < n; ++k) CHECK(b.in_jhat[k] == a.in_jhat[perm[k]]);
  }
}

TEST_CASE("classify_rows matches exact classification outside the tolerance band") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const index_t n = 1 + seed % 20;
    const CsrMatrix B = sample_substochastic(fixtures::dyadic_config(n, 1 + seed % n, seed, 0.5, 30));
    const Tolerance tol = default_tolerance(B.max_row_nnz());
    const mpq_class band = 1 - 2 * mpq_class(tol.value());
    const RowClass rc = classify_rows(B, tol);
    for (index_t i = 0; i < n; ++i) {
      const mpq_class s = exact::row_sum(B, i);
      REQUIRE((s == 1 || s <= band));
      CHECK(rc.contains(i) == (s < 1));
    }
  }
}

TEST_CASE("plain row-sums stay within gamma of the exact sum") {
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const index_t k = 1 + rng.uniform_index(48);
    Rng inner(rng.next());
    const auto w = dirichlet_uniform(k, inner);
    const double s = inner.uniform01();
    std::vector<double> row;
    for (double x : w) {
      if (x * s > 0.0) row.push_back(x * s);
    }
    if (row.empty()) continue;
    mpq_class exact_sum = 0;
    for (double v : row) exact_sum += mpq_class(v);
    const mpq_class err = abs(mpq_class(row_sum(row)) - exact_sum);
    CHECK(err <= mpq_class(gamma_k(row.size() - 1)) * exact_sum);
  }
}

TEST_CASE("Kahan row-sums above the cutoff stay within their bound") {
  Rng rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    const index_t k = kKahanCutoff + 1 + rng.uniform_index(2000);
    const auto row = dirichlet_uniform(k, rng);
    mpq_class exact_sum = 0;
    for (double v : row) exact_sum += mpq_class(v);
    const mpq_class err = abs(mpq_class(row_sum(row)) - exact_sum);
    CHECK(err <= mpq_class(row_sum_error_bound(k)) * exact_sum);
  }
}

TEST_CASE("abs_row_sum") {
  const std::vector<double> v{-0.5, 0.25, -0.25};
  CHECK(abs_row_sum(v) == 1.0);
  CHECK(row_sum(v) == -0.5);
}

TEST_CASE("graph_edges") {
  const CsrMatrix B = fixtures::subdiagonal_ones(5);
  const auto e = graph_edges(B, 2);
  REQUIRE(e.size() == 1);
  CHECK(e[0] == 1);
  SUBCASE("padded rows are empty") {
    const std::vector<Triplet> t{{0, 2, 0.5}};
    const CsrMatrix R = csr_from_triplets(1, 3, t);
    CHECK(graph_edges(R, 0).size() == 1);
    CHECK(graph_edges(R, 2).empty());
    CHECK_THROWS_AS(graph_edges(R, 3), Error);
  }
  SUBCASE("dense row") {
    const CsrMatrix D = CsrMatrix::from_dense(DenseMatrix(2, 2, {0.5, 0.5, 0.25, 0.25}));
    const auto row = graph_edges(D, 0);
    CHECK(std::vector<index_t>(row.begin(), row.end()) == std::vector<index_t>{0, 1});
  }
}

TEST_CASE("ContractionIndex") {
  CHECK(ContractionIndex::finite(3).to_string() == "3");
  CHECK(ContractionIndex::infinite().to_string() == "infinite");
  CHECK(ContractionIndex::finite(0) != ContractionIndex::infinite());
  CHECK(ContractionIndex::finite(2) == ContractionIndex::finite(2));
  CHECK_THROWS(ContractionIndex::infinite().value());
}

TEST_CASE("error codes render their names") {
  const Error e(Errc::NotWdd, "row 3");
  CHECK(e.code() == Errc::NotWdd);
  CHECK(std::string(e.what()).find("NotWdd") != std::string::npos);
  const ParseError p(7, "bad value");
  CHECK(p.line() == 7);
  CHECK(p.code() == Errc::ParseError);
  CHECK(std::string(p.what()).find("line 7") != std::string::npos);
}
