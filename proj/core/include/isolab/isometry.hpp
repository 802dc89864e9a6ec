#pragma once

// Affine isometries I = Theta_f + c_f of C0(S^1), L1(S^1) and L^p(S^1 x S^1).
//
// Powers are never obtained by applying a grid operator n times. A single
// orbit pass per axis point accumulates f^n, Df^n and the cocycle data, so
// I^n(v) = Theta^n(v) + c_{f^n} carries only the error of evaluating v.
//
// Composition follows the cocycle identity: I_f(I_g(v)) = I_{g o f}(v).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "isolab/circle.hpp"
#include "isolab/funcspace.hpp"

namespace isolab {

struct AffineIsometry {
  SpaceTag tag;
  Diffeo f;

  CocycleKind cocycle_kind() const { return tag.cocycle_kind(); }
};

GridFunction apply_once(const AffineIsometry& iso, const GridFunction& v);
GridFunction apply_power(const AffineIsometry& iso, int n, const GridFunction& v);
/// I^t(v) for every t in times, sharing one orbit pass per point.
std::vector<GridFunction> apply_powers(const AffineIsometry& iso, std::span<const int> times, const GridFunction& v);

struct RecurrenceReport {
  SpaceTag tag = SpaceTag::c0();
  std::vector<std::int64_t> times;
  std::vector<double> residuals;  // ||I^t(v) - v||
};

/// Throws ValidationError when times is empty.
RecurrenceReport recurrence_scan(const AffineIsometry& iso, const GridFunction& v, std::span<const int> times);

struct DriftRow {
  std::int64_t n = 0;
  double value = 0.0;  // ||I^n(v)|| / n
};

/// ||I^n(v)||/n for n = 1..n_max.
std::vector<DriftRow> drift_estimate(const AffineIsometry& iso, const GridFunction& v, int n_max);
/// Same, at selected positive times only.
std::vector<DriftRow> drift_estimate(const AffineIsometry& iso, const GridFunction& v, std::span<const int> times);

/// Fixed point of I for f = h o R o h^{-1}. With k = h^{-1} linearizing f
/// (k o f = R o k), the fixed point is log Dk = -(log Dh) o h^{-1} on C0 and
/// D^2k/Dk on L1.
/// Throws ValidationError for two-variable spaces.
GridFunction1 fixed_point_from_conjugacy(const SpaceTag& tag, const Diffeo& h, std::size_t n = kDefaultN1);

/// Monotone degree-one map known through node values H(j/N), j = 0..N, and
/// node slopes, interpolated by cubic Hermite pieces. H(0) = 0, H(1) = 1.
class SampledConjugacy {
 public:
  SampledConjugacy(std::vector<double> values, std::vector<double> slopes);

  std::size_t cells() const { return values_.size() - 1; }
  double lift(double x) const;
  double deriv(double x) const;
  /// Solves lift(x) = y; the table is monotone so bisection on cells is exact.
  double inverse_lift(double y) const;

 private:
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// Rebuilds the linearizing map from a fixed point of I = Theta + c:
///   C0:  H(x) = int_0^x e^{phi} / int_0^1 e^{phi}
///   L1:  H(x) = int_0^x e^{Psi} / int_0^1 e^{Psi},  Psi(s) = int_0^s psi
/// by cumulative midpoint quadrature, so that H o f o H^{-1} is a rotation.
/// Throws ValidationError for pair spaces or non-finite data.
SampledConjugacy conjugacy_from_fixed_point(const SpaceTag& tag, const GridFunction1& fp);

/// D(H o f o H^{-1}) at y, from the interpolant's derivative and Df.
double conjugated_derivative(const SampledConjugacy& h, const Diffeo& f, double y);
/// Same quantity by centered differences of the lift of H o f o H^{-1}.
double conjugated_derivative_fd(const SampledConjugacy& h, const Diffeo& f, double y, double step = 1e-5);

/// Isometries driven by f_i = h o R_{rho_i} o h^{-1}; they commute pairwise.
/// Throws ValidationError when rhos repeat.
std::vector<AffineIsometry> commuting_family(const Diffeo& h, std::span<const double> rhos, const SpaceTag& tag);

void write_csv(std::ostream& out, const RecurrenceReport& r);
std::string json_summary(const RecurrenceReport& r);
void write_csv(std::ostream& out, std::span<const DriftRow> rows);

}  // namespace isolab
