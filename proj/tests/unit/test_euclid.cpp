#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "isolab/error.hpp"
#include "isolab/euclid.hpp"

using namespace isolab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd rot90() {
  MatrixXd t(2, 2);
  t << 0, -1, 1, 0;
  return t;
}

VectorXd random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * g(rng);
  return v;
}

}  // namespace

TEST_CASE("construction validates orthogonality") {
  MatrixXd bad = MatrixXd::Identity(2, 2);
  bad(0, 1) = 1e-6;
  CHECK_THROWS_AS(EuclideanIsometry(bad, VectorXd::Zero(2)), ValidationError);
  CHECK_THROWS_AS(EuclideanIsometry(MatrixXd::Identity(2, 3), VectorXd::Zero(2)), ValidationError);
  CHECK_THROWS_AS(EuclideanIsometry(MatrixXd::Identity(2, 2), VectorXd::Zero(3)), ValidationError);
}

TEST_CASE("decompose examples") {
  const EuclideanIsometry id(MatrixXd::Identity(2, 2), VectorXd::Unit(2, 0));
  const DriftDecomposition d = decompose(id);
  CHECK((d.c_star - VectorXd::Unit(2, 0)).norm() <= 1e-12);
  CHECK(d.c_bar.norm() <= 1e-12);
  CHECK(drift(id) == doctest::Approx(1.0));

  const EuclideanIsometry r(rot90(), VectorXd::Unit(2, 0));
  const DriftDecomposition dr = decompose(r);
  CHECK(dr.c_star.norm() <= 1e-12);
  CHECK(dr.fix_basis.cols() == 0);
  const FixedPointOrAxis fr = fixed_point_or_axis(r);
  REQUIRE(fr.fixed_point);
  CHECK((*fr.fixed_point - VectorXd::Constant(2, 0.5)).norm() <= 1e-12);
  CHECK((r(*fr.fixed_point) - *fr.fixed_point).norm() <= 1e-12);

  MatrixXd block = MatrixXd::Identity(3, 3);
  block.topLeftCorner(2, 2) = rot90();
  VectorXd c(3);
  c << 1, 0, 3;
  const EuclideanIsometry b(block, c);
  const DriftDecomposition db = decompose(b);
  CHECK((db.c_star - VectorXd::Unit(3, 2) * 3).norm() <= 1e-12);
  CHECK(drift(b) == doctest::Approx(3.0));
  CHECK_FALSE(fixed_point_or_axis(b).fixed_point);
}

TEST_CASE("decomposition invariants on random instances") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + trial % 12;
    const int fix = trial % 3;
    const EuclideanIsometry iso(random_orthogonal(dim, fix, 100 + trial), random_vector(dim, rng));
    const DriftDecomposition d = decompose(iso);
    CHECK(d.fix_basis.cols() == fix);
    CHECK((d.c_bar + d.c_star - iso.c()).norm() <= 1e-9);
    CHECK((iso.theta() * d.c_star - d.c_star).norm() <= 1e-9);
    CHECK((iso.theta() * d.w - d.w - d.c_bar).norm() <= 1e-8);
    // Minimum norm: w has no component in Fix.
    if (fix > 0) CHECK((d.fix_basis.transpose() * d.w).norm() <= 1e-9);
  }
}

TEST_CASE("fixed points without eigenvalue one") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + trial;
    const EuclideanIsometry iso(random_orthogonal(dim, 0, trial), random_vector(dim, rng));
    const FixedPointOrAxis f = fixed_point_or_axis(iso);
    REQUIRE(f.fixed_point);
    CHECK((iso(*f.fixed_point) - *f.fixed_point).norm() <= 1e-9);
    CHECK(drift(iso) <= 1e-9);
  }
  const EuclideanIsometry t(MatrixXd::Identity(4, 4), VectorXd::Constant(4, 0.5));
  CHECK_FALSE(fixed_point_or_axis(t).fixed_point);
  CHECK(drift(t) == doctest::Approx(1.0));
}

TEST_CASE("powers") {
  const EuclideanIsometry r(rot90(), VectorXd::Unit(2, 0));
  const VectorXd v = VectorXd::Unit(2, 1) * 2;
  CHECK((r.power(0, v) - v).norm() == 0.0);
  CHECK((r.power(4, v) - v).norm() <= 1e-12);
  CHECK((r.power(3, r.power(-3, v)) - v).norm() <= 1e-12);
  CHECK((r.power(2, v) - r(r(v))).norm() <= 1e-12);
}

TEST_CASE("convergence_check examples") {
  const EuclideanIsometry t(MatrixXd::Identity(2, 2), VectorXd::Unit(2, 0));
  for (const ConvergenceRow& row : convergence_check(t, VectorXd::Zero(2), 50)) CHECK(row.deviation <= 1e-12);

  const EuclideanIsometry r(rot90(), VectorXd::Unit(2, 0));
  VectorXd v(2);
  v << 5, 0;
  const auto rows = convergence_check(r, v, 100);
  CHECK(rows.size() == 200);
  const double wn = decompose(r).w.norm();
  bool saw_pos = false, saw_neg = false;
  for (const ConvergenceRow& row : rows) {
    CHECK(row.bound == doctest::Approx((5 + 2 * wn) / std::abs(row.n)));
    CHECK(row.deviation <= row.bound + 1e-9);
    if (row.n == 100) saw_pos = true;
    if (row.n == -100) saw_neg = true;
  }
  CHECK(saw_pos);
  CHECK(saw_neg);
  CHECK(convergence_check(r, v, 10, false).size() == 10);
}

TEST_CASE("bound holds on random instances") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = 1 + (trial * 7) % 50;
    const int fix = trial % 4 == 0 ? 0 : std::min(dim, trial % 3);
    const EuclideanIsometry iso(random_orthogonal(dim, fix, 500 + trial), random_vector(dim, rng));
    for (const ConvergenceRow& row : convergence_check(iso, random_vector(dim, rng, 3.0), 200))
      CHECK(row.deviation <= row.bound + 1e-9);
  }
}

TEST_CASE("zero drift means bounded orbits") {
  std::mt19937_64 rng(13);
  const int dim = 9;
  const EuclideanIsometry iso(random_orthogonal(dim, 0, 77), random_vector(dim, rng));
  const VectorXd v = random_vector(dim, rng);
  const double cap = v.norm() + 2 * decompose(iso).w.norm();
  VectorXd x = v;
  for (int n = 1; n <= 500; ++n) {
    x = iso(x);
    CHECK(x.norm() <= cap + 1e-9);
  }
}

TEST_CASE("the shift by w conjugates to Theta + c_star") {
  std::mt19937_64 rng(17);
  const int dim = 7;
  const EuclideanIsometry iso(random_orthogonal(dim, 2, 9), random_vector(dim, rng));
  const DriftDecomposition d = decompose(iso);
  const EuclideanIsometry hat(iso.theta(), d.c_star);
  const VectorXd v = random_vector(dim, rng);
  MatrixXd tn = MatrixXd::Identity(dim, dim);
  for (int n = 1; n <= 20; ++n) {
    tn = iso.theta() * tn;
    CHECK((hat.power(n, v) - (tn * v + n * d.c_star)).norm() <= 1e-9);
    // I^n(v) = hat^n(v + w) - w
    CHECK((iso.power(n, v) - (hat.power(n, v + d.w) - d.w)).norm() <= 1e-9);
  }
}

TEST_CASE("random_orthogonal") {
  for (int fix : {0, 1, 3}) {
    const MatrixXd q = random_orthogonal(8, fix, 42);
    CHECK((q.transpose() * q - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::JacobiSVD<MatrixXd> svd(q - MatrixXd::Identity(8, 8));
    int zeros = 0;
    for (int i = 0; i < 8; ++i) zeros += svd.singularValues()(i) < 1e-8;
    CHECK(zeros == fix);
  }
  CHECK((random_orthogonal(5, 0, 1) - random_orthogonal(5, 0, 1)).norm() == 0.0);
  CHECK_THROWS_AS(random_orthogonal(3, 4, 1), ValidationError);
}

TEST_CASE("csv") {
  const EuclideanIsometry r(rot90(), VectorXd::Unit(2, 0));
  std::ostringstream os;
  write_csv(os, convergence_check(r, VectorXd::Zero(2), 2, false));
  CHECK(os.str().rfind("n,deviation,bound\n1,", 0) == 0);
}
