#pragma once

// Circle diffeomorphisms as closed-form expression trees.
//
// A Diffeo is built from two primitives, rigid rotations and the sine shear
//
//     S_{eps,q}(x) = x + eps / (2 pi q) * sin(2 pi q x),   |eps| < 1,
//
// closed under composition, inversion and integer powers. Every node knows
// its lift F : R -> R (degree one, F(x + 1) = F(x) + 1) together with the
// first three derivatives, so cocycles never have to difference sampled data.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace isolab {

/// Reduces a real number to its representative in [0, 1).
double wrap_unit(double x);

/// A point of S^1 = R/Z stored as its representative in [0, 1).
class CirclePoint {
 public:
  CirclePoint() = default;
  explicit CirclePoint(double x) : value_(wrap_unit(x)) {}

  double value() const { return value_; }

 private:
  double value_ = 0.0;
};

/// Value and derivatives of a lift at one point.
struct Jet {
  double value = 0.0;
  double d1 = 1.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Default tolerance and iteration cap for lift inversion.
inline constexpr double kInverseTolerance = 1e-12;
inline constexpr int kInverseMaxIterations = 200;

class Diffeo {
 public:
  /// The identity map (rotation by zero).
  Diffeo();

  static Diffeo rotation(double rho);
  /// Throws ValidationError unless |eps| < 1 and q >= 1.
  static Diffeo sine_shear(double eps, int q);

  friend Diffeo compose(const Diffeo& outer, const Diffeo& inner);
  friend Diffeo inverse(const Diffeo& f);
  friend Diffeo power(const Diffeo& f, int m);

  double lift(double x) const;
  CirclePoint operator()(CirclePoint x) const { return CirclePoint(lift(x.value())); }

  /// F(x + h) - F(x) without the cancellation of subtracting two lifts, so
  /// that nearby images keep full relative precision.
  double lift_increment(double x, double h) const;

  /// Lift value plus derivatives up to `order` (1..3); higher entries are zero.
  Jet jet(double x, int order = 3) const;

  /// D^order f(x). Throws ValidationError for order outside 1..3.
  double deriv(double x, int order) const;

  /// Solves lift(x) = y to |lift(x) - y| <= tol. Structured nodes provide a
  /// first guess; the answer is always polished by safeguarded Newton on the
  /// full lift. Throws NumericalError if the bracket iteration stalls.
  double inverse_lift(double y, double tol = kInverseTolerance) const;
  CirclePoint inverse_eval(CirclePoint y, double tol = kInverseTolerance) const {
    return CirclePoint(inverse_lift(y.value(), tol));
  }

  /// True when the expression is a single rotation (after folding powers).
  bool is_rotation() const;

  /// Human-readable expression in the CLI grammar.
  std::string describe() const;

  struct Node;

 private:
  explicit Diffeo(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Diffeo compose(const Diffeo& outer, const Diffeo& inner);
Diffeo inverse(const Diffeo& f);
Diffeo power(const Diffeo& f, int m);
/// h o g o h^{-1}.
Diffeo conjugate(const Diffeo& h, const Diffeo& g);

/// Generic lift inversion: bisection on a bracket known to contain the root,
/// accelerated by Newton steps that are rejected when they leave the bracket.
double solve_lift(const Diffeo& f, double y, double guess, double tol = kInverseTolerance,
                  int max_iterations = kInverseMaxIterations);

/// Orbit x, f(x), ..., f^n(x) with the accumulated derivative data
///   log_d[k]  = log Df^k(x)          = sum_{i<k} log Df(f^i x)
///   d[k]      = Df^k(x)              = prod_{i<k} Df(f^i x)
///   affine[k] = D^2 f^k / Df^k (x)   = sum_{i<k} (D^2f/Df)(f^i x) * Df^i(x)
/// For negative n the orbit runs under f^{-1}.
struct OrbitData {
  std::vector<double> points;
  std::vector<double> log_d;
  std::vector<double> d;
  std::vector<double> affine;

  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

OrbitData iterate_orbit(const Diffeo& f, CirclePoint x, int n);

/// One step of the same accumulation, for callers that only keep end points.
struct OrbitState {
  double point = 0.0;
  double log_d = 0.0;
  double d = 1.0;
  double affine = 0.0;
};

OrbitState advance(const Diffeo& step, const OrbitState& s);

/// Birkhoff average (F^n(0) - 0) / n of the lift; error at most 1/n_iter.
double rotation_number(const Diffeo& f, std::int64_t n_iter = 100'000);

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

struct ContinuedFraction {
  double rho = 0.0;
  std::vector<std::int64_t> partial_quotients;
  std::vector<Convergent> convergents;
  bool terminated = false;  // remainder vanished: rho is rational at this depth
};

/// Euclidean expansion of rho in (0, 1). Stops early once a remainder drops
/// below 1e-14.
ContinuedFraction continued_fraction(double rho, int depth);

/// Convergent denominators of the golden mean: 1, 2, 3, 5, 8, ...
std::vector<std::int64_t> fibonacci_denominators(int count);

}  // namespace isolab
