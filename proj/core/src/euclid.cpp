#include "isolab/euclid.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <json.hpp>

#include "isolab/error.hpp"

namespace isolab {

EuclideanIsometry::EuclideanIsometry(Eigen::MatrixXd theta, Eigen::VectorXd c)
    : theta_(std::move(theta)), c_(std::move(c)) {
  if (theta_.rows() != theta_.cols() || theta_.rows() != c_.size() || c_.size() == 0)
    throw ValidationError("euclidean isometry: theta must be square and match c");
  if (!theta_.allFinite() || !c_.allFinite()) throw ValidationError("euclidean isometry: non-finite entries");
  const Eigen::MatrixXd gram = theta_.transpose() * theta_;
  const double err = (gram - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  if (err > 1e-10) throw ValidationError("euclidean isometry: theta is not orthogonal");
}

Eigen::VectorXd EuclideanIsometry::power(long n, const Eigen::VectorXd& v) const {
  Eigen::VectorXd x = v;
  if (n >= 0) {
    for (long k = 0; k < n; ++k) x = theta_ * x + c_;
  } else {
    for (long k = 0; k < -n; ++k) x = theta_.transpose() * (x - c_);
  }
  return x;
}

DriftDecomposition decompose(const EuclideanIsometry& iso) {
  const Eigen::Index n = iso.dim();
  const Eigen::MatrixXd a = iso.theta() - Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!s.allFinite()) throw NumericalError("decompose: singular value decomposition failed");

  Eigen::Index rank = 0;
  while (rank < n && s(rank) > kKernelThreshold) ++rank;
  // For normal A = Theta - Id the kernel equals the orthogonal complement of the range.
  DriftDecomposition out;
  out.fix_basis = svd.matrixV().rightCols(n - rank);
  out.c_star = out.fix_basis * (out.fix_basis.transpose() * iso.c());
  out.c_bar = iso.c() - out.c_star;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  for (Eigen::Index k = 0; k < rank; ++k) w += v.col(k) * (u.col(k).dot(out.c_bar) / s(k));
  out.w = w;
  return out;
}

double drift(const EuclideanIsometry& iso) { return decompose(iso).c_star.norm(); }

FixedPointOrAxis fixed_point_or_axis(const EuclideanIsometry& iso) {
  DriftDecomposition d = decompose(iso);
  FixedPointOrAxis out{std::nullopt, d.w, d.c_star};
  if (d.c_star.norm() <= 1e-9) out.fixed_point = -d.w;
  return out;
}

std::vector<ConvergenceRow> convergence_check(const EuclideanIsometry& iso, const Eigen::VectorXd& v, long n_max,
                                              bool both_signs) {
  if (n_max < 1) throw ValidationError("convergence_check: need n_max >= 1");
  if (v.size() != iso.dim()) throw ValidationError("convergence_check: dimension mismatch");
  const DriftDecomposition d = decompose(iso);
  const double numerator = v.norm() + 2.0 * d.w.norm();
  std::vector<ConvergenceRow> rows;
  for (int sign : {1, -1}) {
    if (sign < 0 && !both_signs) break;
    Eigen::VectorXd x = v;
    for (long k = 1; k <= n_max; ++k) {
      x = sign > 0 ? Eigen::VectorXd(iso.theta() * x + iso.c())
                   : Eigen::VectorXd(iso.theta().transpose() * (x - iso.c()));
      const long n = sign * k;
      // I^{-n}(v)/(-n) tends to c_star as well.
      const double dev = (x / static_cast<double>(k) - sign * d.c_star).norm();
      rows.push_back({n, dev, numerator / static_cast<double>(k)});
    }
  }
  return rows;
}

Eigen::MatrixXd random_orthogonal(int dim, int fix_dim, unsigned long long seed) {
  if (dim < 1 || fix_dim < 0 || fix_dim > dim) throw ValidationError("random_orthogonal: bad dimensions");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> angle(0.1, 2.0 * std::numbers::pi - 0.1);

  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;

  Eigen::MatrixXd block = Eigen::MatrixXd::Identity(dim, dim);
  int k = fix_dim;
  for (; k + 1 < dim; k += 2) {
    const double t = angle(rng);
    block(k, k) = std::cos(t);
    block(k, k + 1) = -std::sin(t);
    block(k + 1, k) = std::sin(t);
    block(k + 1, k + 1) = std::cos(t);
  }
  if (k < dim) block(k, k) = -1.0;
  return q * block * q.transpose();
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "n,deviation,bound\n";
  for (const auto& r : rows)
    out << r.n << ',' << nlohmann::json(r.deviation).dump() << ',' << nlohmann::json(r.bound).dump() << '\n';
}

}  // namespace isolab
