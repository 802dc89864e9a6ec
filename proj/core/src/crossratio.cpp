#include "isolab/crossratio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "isolab/error.hpp"
#include "isolab/quadrature.hpp"

namespace isolab {

namespace {

constexpr double kPi = std::numbers::pi;

double cr(double a, double b, double c, double d) { return dist(a, c) * dist(b, d) / (dist(a, d) * dist(b, c)); }

}  // namespace

double dist(double x, double y) { return std::abs(std::sin(kPi * (x - y))) / kPi; }

bool cyclically_ordered(double a, double b, double c, double d) {
  const double fb = wrap_unit(b - a);
  const double fc = wrap_unit(c - a);
  const double fd = wrap_unit(d - a);
  if (!(fb > 0.0 && fb < fc && fc < fd && fd < 1.0)) return false;
  return dist(a, b) > 0.0 && dist(b, c) > 0.0 && dist(c, d) > 0.0 && dist(d, a) > 0.0;
}

Quadruple::Quadruple(double a, double b, double c, double d)
    : a_(wrap_unit(a)), b_(wrap_unit(b)), c_(wrap_unit(c)), d_(wrap_unit(d)) {
  if (!cyclically_ordered(a_, b_, c_, d_)) throw ValidationError("quadruple is not strictly cyclically ordered");
}

Quadruple Quadruple::image(const Diffeo& f) const {
  return Quadruple(f.lift(a_), f.lift(b_), f.lift(c_), f.lift(d_));
}

double crossratio(const Quadruple& q) { return cr(q.a(), q.b(), q.c(), q.d()); }

double normalize_d(double a, double b, double c) {
  a = wrap_unit(a);
  b = wrap_unit(b);
  c = wrap_unit(c);
  const double fb = wrap_unit(b - a);
  const double fc = wrap_unit(c - a);
  if (!(fb > 0.0 && fb < fc)) throw ValidationError("normalize_d: a, b, c must be distinct and cyclically ordered");
  const double arc = wrap_unit(a - c);  // length of the arc (c, a)

  // The cross-ratio increases from 1 (d -> c+) to infinity (d -> a-).
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && (hi - lo) * arc > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cr(a, b, c, c + mid * arc) < 2.0) lo = mid;
    else hi = mid;
  }
  const double d = wrap_unit(c + 0.5 * (lo + hi) * arc);
  if (!cyclically_ordered(a, b, c, d) || std::abs(cr(a, b, c, d) - 2.0) > 1e-9)
    throw NumericalError("normalize_d: bracket failed for degenerate points");
  return d;
}

double crossratio_integral(const Quadruple& q, int n_quad) {
  const GaussLegendreRule rule = gauss_legendre(n_quad);
  const double a = q.a();
  const double b = a + wrap_unit(q.b() - a);
  const double c = a + wrap_unit(q.c() - a);
  const double d = a + wrap_unit(q.d() - a);
  const double hx = 0.5 * (b - a), mx = 0.5 * (b + a);
  const double hy = 0.5 * (d - c), my = 0.5 * (d + c);
  double total = 0.0;
  for (int i = 0; i < n_quad; ++i) {
    const double x = mx + hx * rule.nodes[i];
    double row = 0.0;
    for (int j = 0; j < n_quad; ++j) {
      const double y = my + hy * rule.nodes[j];
      const double s = std::sin(kPi * (y - x)) / kPi;
      row += rule.weights[j] / (s * s);
    }
    total += rule.weights[i] * row;
  }
  return total * hx * hy;
}

double BlowupScan::max_crossratio() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.crossratio);
  return m;
}

BlowupScan blowup_scan(const Diffeo& f, const Quadruple& q, std::vector<std::int64_t> n_list) {
  if (std::abs(crossratio(q) - 2.0) > 1e-9) throw ValidationError("blowup_scan: quadruple must have cross-ratio 2");
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  if (!n_list.empty() && n_list.front() < 0) throw ValidationError("blowup_scan: iterates must be non-negative");

  BlowupScan scan;
  double pts[4] = {q.a(), q.b(), q.c(), q.d()};
  std::int64_t current = 0;
  for (const std::int64_t target : n_list) {
    while (current < target) {
      for (double& p : pts) p = wrap_unit(f.lift(p));
      ++current;
      if (!cyclically_ordered(pts[0], pts[1], pts[2], pts[3])) {
        scan.resolution_limited = true;
        scan.stopped_at = current;
        return scan;
      }
    }
    scan.rows.push_back({target, cr(pts[0], pts[1], pts[2], pts[3])});
  }
  return scan;
}

BlowupExample rational_blowup_example(int p, int q, double eps) {
  if (q < 3) throw ValidationError("rational_blowup_example: denominator must be at least 3");
  if (std::gcd(p, q) != 1) throw ValidationError("rational_blowup_example: p and q must be coprime");
  const Diffeo f = compose(Diffeo::rotation(static_cast<double>(p) / q), Diffeo::sine_shear(eps, q));

  // f^q = S^q fixes k/(2q); DS = 1 + eps at even k, 1 - eps at odd k.
  const int count = 2 * q;
  const int a_index = eps >= 0.0 ? 1 : 0;
  const int c_index = (a_index + count - 1) % count;
  const int b_index = (a_index + (count - 1) / 2) % count;
  const double a = static_cast<double>(a_index) / count;
  const double b = static_cast<double>(b_index) / count;
  const double c = static_cast<double>(c_index) / count;
  const double d = normalize_d(a, b, c);
  return BlowupExample{f, Quadruple(a, b, c, d), q, a, c};
}

IncompatibilityBounds incompatibility_bounds(double chi_norm) {
  if (!(chi_norm >= 0.0)) throw ValidationError("incompatibility_bounds: norm must be non-negative");
  const double root = std::sqrt(std::log(2.0));
  const double up = root + 2.0 * chi_norm;
  const double down = std::max(0.0, root - 2.0 * chi_norm);
  return {std::exp(down * down), std::exp(up * up)};
}

double implied_fixed_point_norm(double max_crossratio) {
  if (!(max_crossratio > 2.0)) return 0.0;
  return (std::sqrt(std::log(max_crossratio)) - std::sqrt(std::log(2.0))) / 2.0;
}

}  // namespace isolab
