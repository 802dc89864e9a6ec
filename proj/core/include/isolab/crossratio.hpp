#pragma once

// Cross-ratios of cyclically ordered quadruples on S^1 = R/Z.
//
// Distances are chordal, dist(x, y) = |sin(pi (x - y))| / pi. With this metric
//
//     log [a,b,c,d] = int_a^b int_c^d dx dy / dist(x, y)^2
//
// holds exactly on the whole circle, and on short arcs the cross-ratio agrees
// with the difference formula (a-c)(b-d) / ((a-d)(b-c)) to second order.

#include <cstdint>
#include <vector>

#include "isolab/circle.hpp"

namespace isolab {

double dist(double x, double y);

/// Four points in strict cyclic order a < b < c < d < a.
class Quadruple {
 public:
  /// Throws ValidationError unless the points are distinct and cyclically ordered.
  Quadruple(double a, double b, double c, double d);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  /// Same quadruple pushed forward by an orientation-preserving map.
  Quadruple image(const Diffeo& f) const;

 private:
  double a_, b_, c_, d_;
};

/// True when a < b < c < d < a cyclically with no coincident points.
bool cyclically_ordered(double a, double b, double c, double d);

/// dist(a,c) dist(b,d) / (dist(a,d) dist(b,c)); always > 1.
double crossratio(const Quadruple& q);

/// The unique d in the arc (c, a) with [a,b,c,d] = 2, by bisection to 1e-12.
double normalize_d(double a, double b, double c);

/// Tensor Gauss-Legendre approximation of the double integral of 1/dist^2
/// over arc [a,b] x arc [c,d].
double crossratio_integral(const Quadruple& q, int n_quad = 64);

struct BlowupRow {
  std::int64_t n = 0;
  double crossratio = 0.0;
};

struct BlowupScan {
  std::vector<BlowupRow> rows;
  /// Set when two image points became indistinguishable in double precision;
  /// rows stop before that iterate.
  bool resolution_limited = false;
  std::int64_t stopped_at = -1;
  double max_crossratio() const;
};

/// Cross-ratios of the images f^n(q) for every n in n_list (non-negative).
/// Throws ValidationError unless q is normalized ([q] = 2 within 1e-9).
BlowupScan blowup_scan(const Diffeo& f, const Quadruple& q, std::vector<std::int64_t> n_list);

struct BlowupExample {
  Diffeo f;
  Quadruple quadruple;
  int period = 0;               // q: f^q fixes every k/(2q)
  double attracting = 0.0;      // a
  double repelling = 0.0;       // c
};

/// f = R_{p/q} o S_{eps,q} with q >= 3 and gcd(p, q) = 1. The quadruple takes
/// a = an attracting fixed point of f^q, c = the repelling one preceding it,
/// b = the fixed point nearest the middle of the arc (a, c), and d from
/// normalize_d, so that f^{nq}(d) -> a. eps = 0 gives the rotation control.
BlowupExample rational_blowup_example(int p, int q, double eps);

struct IncompatibilityBounds {
  double lower = 2.0;
  double upper = 2.0;
};

/// Bounds that a fixed point of norm chi_norm of the L^2 isometry forces on
/// every iterated normalized cross-ratio:
///   upper = exp((sqrt(log 2) + 2 chi)^2),
///   lower = exp(max(0, sqrt(log 2) - 2 chi)^2).
IncompatibilityBounds incompatibility_bounds(double chi_norm);

/// Smallest fixed-point norm compatible with an observed cross-ratio M:
/// (sqrt(log M) - sqrt(log 2)) / 2, clamped at zero.
double implied_fixed_point_norm(double max_crossratio);

}  // namespace isolab
