#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "splab/eigensolver.hpp"
#include "splab/error.hpp"
#include "splab/rng.hpp"
#include "splab/sparse.hpp"

using namespace splab;

namespace {

// Random sparse symmetric matrix with about `per_row` off-diagonals per row.
SparseMatrix random_symmetric(std::size_t m, int per_row, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> a(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    a[i * m + i] = rng.normal();
    for (int t = 0; t < per_row; ++t) {
      const std::size_t j = rng.below(m);
      const double v = rng.normal();
      a[i * m + j] += v;
      a[j * m + i] += v;
    }
  }
  return SparseMatrix::from_dense(a, m, true);
}

}  // namespace

TEST_CASE("sparse basics") {
  const auto id = SparseMatrix::identity(5);
  const std::vector<double> v{1, -2, 3, 0.5, 7};
  CHECK(id.matvec(v) == v);
  CHECK_THROWS_AS(id.matvec({1.0, 2.0}), ValidationError);

  const auto a = random_symmetric(40, 3, 9);
  Rng rng(1);
  std::vector<double> u(40), w(40);
  for (auto& x : u) x = rng.normal();
  for (auto& x : w) x = rng.normal();
  CHECK(dot(u, a.matvec(w)) == doctest::Approx(dot(a.matvec(u), w)).epsilon(1e-12));
}

TEST_CASE("binary save and load") {
  const auto a = random_symmetric(30, 4, 2);
  const auto path = std::filesystem::temp_directory_path() / "splab_sparse_test.bin";
  a.save_binary(path);
  const auto b = SparseMatrix::load_binary(path);
  std::filesystem::remove(path);
  CHECK(a.to_dense() == b.to_dense());
}

TEST_CASE("shifted operator equals the materialized matrix") {
  const auto a = random_symmetric(25, 3, 4);
  std::vector<double> d(25);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 0.1 * static_cast<double>(i);
  const ShiftedOperator op(a, -1.5, d);
  const auto m = a.scaled_plus_diagonal(-1.5, d);
  const auto x = to_dense(op), y = m.to_dense();
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-14));
}

TEST_CASE("3x3 transposition example") {
  std::vector<double> a{0, -0.5, -0.5, -0.5, 0, -0.5, -0.5, -0.5, 0};
  const auto m = SparseMatrix::from_dense(a, 3, true);
  EigenOptions o;
  o.strategy = EigenStrategy::kLanczos;
  const auto r = lowest_two_eigs(m, o);
  CHECK(r.lambda0 == doctest::Approx(-1.0));
  CHECK(r.lambda1 == doctest::Approx(0.5));
  for (double g : r.ground) CHECK(g == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("scaled identity is degenerate") {
  std::vector<double> a(16 * 16, 0.0);
  for (int i = 0; i < 16; ++i) a[i * 16 + i] = 2.5;
  for (auto strategy : {EigenStrategy::kLanczos, EigenStrategy::kDense}) {
    EigenOptions o;
    o.strategy = strategy;
    const auto r = lowest_two_eigs(SparseMatrix::from_dense(a, 16, true), o);
    CHECK(r.lambda0 == doctest::Approx(2.5));
    CHECK(r.lambda1 == doctest::Approx(2.5));
    CHECK(r.degenerate);
    CHECK(r.gap() == 0.0);
    CHECK(norm2(r.ground) == doctest::Approx(1.0));
  }
}

TEST_CASE("Lanczos agrees with dense diagonalization") {
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const std::size_t m = 50 + 20 * s;
    const auto a = random_symmetric(m, 4, s);
    EigenOptions lo;
    lo.strategy = EigenStrategy::kLanczos;
    const auto r = lowest_two_eigs(a, lo);
    std::vector<double> vals, vecs;
    dense_eigh(a.to_dense(), m, vals, &vecs);
    CHECK(r.lambda0 == doctest::Approx(vals[0]).epsilon(1e-10));
    CHECK(r.lambda1 == doctest::Approx(vals[1]).epsilon(1e-10));
    double ov = 0.0;
    for (std::size_t i = 0; i < m; ++i) ov += r.ground[i] * vecs[i * m];
    CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("asymmetric input is rejected") {
  std::vector<double> a{0, 1, 0, 0};
  CHECK_THROWS_AS(lowest_two_eigs(SparseMatrix::from_dense(a, 2, false)), ValidationError);
}

TEST_CASE("budget exhaustion raises a convergence error") {
  const auto a = random_symmetric(3000, 4, 77);
  EigenOptions o;
  o.strategy = EigenStrategy::kLanczos;
  o.max_iter = 5;
  o.dense_fallback = 0;
  CHECK_THROWS_AS(lowest_two_eigs(a, o), ConvergenceError);
}
