#pragma once

// Affine isometries v -> Theta v + c of R^n. The translation splits as
// c = c_bar + c_star with c_star in Fix(Theta) = ker(Theta - Id) and c_bar in
// its orthogonal complement Im(Theta - Id). With (Theta - Id) w = c_bar the
// shift v -> v + w conjugates I to Theta + c_star, which gives
//
//   || I^n(v)/n - c_star || <= (||v|| + 2||w||) / n     for n != 0.

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace isolab {

inline constexpr double kKernelThreshold = 1e-8;

class EuclideanIsometry {
 public:
  /// Throws ValidationError unless theta is square, orthogonal to 1e-10
  /// entrywise and c has matching length.
  EuclideanIsometry(Eigen::MatrixXd theta, Eigen::VectorXd c);

  const Eigen::MatrixXd& theta() const { return theta_; }
  const Eigen::VectorXd& c() const { return c_; }
  Eigen::Index dim() const { return c_.size(); }

  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const { return theta_ * v + c_; }
  /// I^n(v) for any integer n; the inverse is Theta^T (v - c).
  Eigen::VectorXd power(long n, const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd theta_;
  Eigen::VectorXd c_;
};

struct DriftDecomposition {
  Eigen::VectorXd c_bar;
  Eigen::VectorXd c_star;
  Eigen::VectorXd w;
  Eigen::MatrixXd fix_basis;  // orthonormal columns spanning ker(Theta - Id)
};

/// Kernel from the SVD of Theta - Id, singular values below kKernelThreshold
/// counted as zero; w is the minimum-norm solution.
DriftDecomposition decompose(const EuclideanIsometry& iso);

double drift(const EuclideanIsometry& iso);

struct FixedPointOrAxis {
  std::optional<Eigen::VectorXd> fixed_point;  // set when ||c_star|| <= 1e-9
  Eigen::VectorXd w;
  Eigen::VectorXd c_star;
};

FixedPointOrAxis fixed_point_or_axis(const EuclideanIsometry& iso);

struct ConvergenceRow {
  long n = 0;
  double deviation = 0.0;  // || I^n(v)/n - c_star ||
  double bound = 0.0;      // (||v|| + 2||w||) / |n|
};

/// Rows for n = 1..n_max and, when both_signs, n = -1..-n_max. Orbits are
/// iterated directly, one application per step.
std::vector<ConvergenceRow> convergence_check(const EuclideanIsometry& iso, const Eigen::VectorXd& v, long n_max,
                                              bool both_signs = true);

/// Random orthogonal matrix (QR of a Gaussian matrix with sign fix) whose
/// fixed space has the requested dimension; fix_dim = 0 gives eigenvalue 1
/// with probability zero.
Eigen::MatrixXd random_orthogonal(int dim, int fix_dim, unsigned long long seed);

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

}  // namespace isolab
