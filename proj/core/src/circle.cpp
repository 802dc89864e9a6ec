#include "isolab/circle.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <variant>

#include "isolab/error.hpp"

namespace isolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

}  // namespace

double wrap_unit(double x) {
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.0
  return r >= 1.0 ? 0.0 : r;
}

struct RotationNode {
  double rho;
};
struct ShearNode {
  double eps;
  int q;
};
struct ComposeNode {
  Diffeo outer;
  Diffeo inner;
};
struct InverseNode {
  Diffeo inner;
};
struct PowerNode {
  Diffeo base;
  int m;  // m >= 2; negative powers are stored as Inverse(Power)
};

struct Diffeo::Node {
  std::variant<RotationNode, ShearNode, ComposeNode, InverseNode, PowerNode> v;
};

namespace {

Jet chain(const Jet& outer, const Jet& inner) {
  const double k1 = inner.d1;
  return {outer.value,
          outer.d1 * k1,
          outer.d2 * k1 * k1 + outer.d1 * inner.d2,
          outer.d3 * k1 * k1 * k1 + 3.0 * outer.d2 * k1 * inner.d2 + outer.d1 * inner.d3};
}

Jet invert_jet(double x, const Jet& j) {
  const double d1 = j.d1;
  const double d1_3 = d1 * d1 * d1;
  return {x, 1.0 / d1, -j.d2 / d1_3, (3.0 * j.d2 * j.d2 - d1 * j.d3) / (d1_3 * d1 * d1)};
}

}  // namespace

Diffeo::Diffeo() : node_(std::make_shared<Node>(Node{RotationNode{0.0}})) {}

Diffeo Diffeo::rotation(double rho) {
  if (!std::isfinite(rho)) throw ValidationError("rotation: angle must be finite");
  return Diffeo(std::make_shared<Node>(Node{RotationNode{rho}}));
}

Diffeo Diffeo::sine_shear(double eps, int q) {
  if (!(std::abs(eps) < 1.0)) throw ValidationError("sine shear: need |eps| < 1, got " + format_real(eps));
  if (q < 1) throw ValidationError("sine shear: need q >= 1, got " + std::to_string(q));
  return Diffeo(std::make_shared<Node>(Node{ShearNode{eps, q}}));
}

Diffeo compose(const Diffeo& outer, const Diffeo& inner) {
  const auto* ro = std::get_if<RotationNode>(&outer.node_->v);
  const auto* ri = std::get_if<RotationNode>(&inner.node_->v);
  if (ro && ri) return Diffeo::rotation(ro->rho + ri->rho);
  if (ro && ro->rho == 0.0) return inner;
  if (ri && ri->rho == 0.0) return outer;
  return Diffeo(std::make_shared<Diffeo::Node>(Diffeo::Node{ComposeNode{outer, inner}}));
}

Diffeo inverse(const Diffeo& f) {
  if (const auto* r = std::get_if<RotationNode>(&f.node_->v)) return Diffeo::rotation(-r->rho);
  if (const auto* i = std::get_if<InverseNode>(&f.node_->v)) return i->inner;
  return Diffeo(std::make_shared<Diffeo::Node>(Diffeo::Node{InverseNode{f}}));
}

Diffeo power(const Diffeo& f, int m) {
  if (m == 0) return Diffeo::rotation(0.0);
  if (const auto* r = std::get_if<RotationNode>(&f.node_->v)) return Diffeo::rotation(m * r->rho);
  if (m == 1) return f;
  if (m == -1) return inverse(f);
  if (m < 0) return inverse(power(f, -m));
  return Diffeo(std::make_shared<Diffeo::Node>(Diffeo::Node{PowerNode{f, m}}));
}

Diffeo conjugate(const Diffeo& h, const Diffeo& g) { return compose(h, compose(g, inverse(h))); }

double Diffeo::lift(double x) const {
  return std::visit(
      [x](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RotationNode>) {
          return x + n.rho;
        } else if constexpr (std::is_same_v<T, ShearNode>) {
          return x + n.eps / (kTwoPi * n.q) * std::sin(kTwoPi * n.q * x);
        } else if constexpr (std::is_same_v<T, ComposeNode>) {
          return n.outer.lift(n.inner.lift(x));
        } else if constexpr (std::is_same_v<T, InverseNode>) {
          return n.inner.inverse_lift(x);
        } else {
          double y = x;
          for (int i = 0; i < n.m; ++i) y = n.base.lift(y);
          return y;
        }
      },
      node_->v);
}

double Diffeo::lift_increment(double x, double h) const {
  if (h == 0.0) return 0.0;
  return std::visit(
      [x, h](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RotationNode>) {
          return h;
        } else if constexpr (std::is_same_v<T, ShearNode>) {
          const double w = kTwoPi * n.q;
          return h + 2.0 * n.eps / w * std::cos(w * (x + 0.5 * h)) * std::sin(0.5 * w * h);
        } else if constexpr (std::is_same_v<T, ComposeNode>) {
          return n.outer.lift_increment(n.inner.lift(x), n.inner.lift_increment(x, h));
        } else if constexpr (std::is_same_v<T, InverseNode>) {
          // Increment d of the preimage with G(x0 + d) - G(x0) = h.
          const Diffeo& g = n.inner;
          const double x0 = g.inverse_lift(x);
          const double sign = h > 0.0 ? 1.0 : -1.0;
          const double target = std::abs(h);
          double lo = 0.0, hi = target / g.deriv(x0, 1);
          while (sign * g.lift_increment(x0, sign * hi) < target) hi *= 2.0;
          double d = 0.5 * (lo + hi);
          for (int it = 0; it < kInverseMaxIterations; ++it) {
            const double r = sign * g.lift_increment(x0, sign * d) - target;
            if (r == 0.0) break;
            if (r > 0.0) hi = d;
            else lo = d;
            double next = d - r / g.deriv(x0 + sign * d, 1);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (next == d || hi - lo <= 4e-16 * hi) break;
            d = next;
          }
          return sign * d;
        } else {
          double y = x, dy = h;
          for (int i = 0; i < n.m; ++i) {
            dy = n.base.lift_increment(y, dy);
            y = n.base.lift(y);
          }
          return dy;
        }
      },
      node_->v);
}

Jet Diffeo::jet(double x, int order) const {
  if (order < 1 || order > 3) throw ValidationError("jet: derivative order must be 1, 2 or 3");
  Jet out = std::visit(
      [x, order](const auto& n) -> Jet {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RotationNode>) {
          return {x + n.rho, 1.0, 0.0, 0.0};
        } else if constexpr (std::is_same_v<T, ShearNode>) {
          const double w = kTwoPi * n.q;
          const double s = std::sin(w * x);
          const double c = std::cos(w * x);
          return {x + n.eps / w * s, 1.0 + n.eps * c, -n.eps * w * s, -n.eps * w * w * c};
        } else if constexpr (std::is_same_v<T, ComposeNode>) {
          const Jet inner = n.inner.jet(x, order);
          return chain(n.outer.jet(inner.value, order), inner);
        } else if constexpr (std::is_same_v<T, InverseNode>) {
          const double pre = n.inner.inverse_lift(x);
          return invert_jet(pre, n.inner.jet(pre, order));
        } else {
          Jet acc{x, 1.0, 0.0, 0.0};
          for (int i = 0; i < n.m; ++i) acc = chain(n.base.jet(acc.value, order), acc);
          return acc;
        }
      },
      node_->v);
  if (order < 3) out.d3 = 0.0;
  if (order < 2) out.d2 = 0.0;
  return out;
}

double Diffeo::deriv(double x, int order) const {
  const Jet j = jet(x, order);
  switch (order) {
    case 1:
      return j.d1;
    case 2:
      return j.d2;
    default:
      return j.d3;
  }
}

double Diffeo::inverse_lift(double y, double tol) const {
  if (!(tol > 0.0)) throw ValidationError("inverse_lift: tolerance must be positive");
  return std::visit(
      [this, y, tol](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RotationNode>) {
          return y - n.rho;
        } else if constexpr (std::is_same_v<T, ShearNode>) {
          return solve_lift(*this, y, y, tol);
        } else if constexpr (std::is_same_v<T, ComposeNode>) {
          const double guess = n.inner.inverse_lift(n.outer.inverse_lift(y, tol), tol);
          return solve_lift(*this, y, guess, tol);
        } else if constexpr (std::is_same_v<T, InverseNode>) {
          return n.inner.lift(y);
        } else {
          double x = y;
          for (int i = 0; i < n.m; ++i) x = n.base.inverse_lift(x, tol);
          return solve_lift(*this, y, x, tol);
        }
      },
      node_->v);
}

bool Diffeo::is_rotation() const { return std::holds_alternative<RotationNode>(node_->v); }

std::string Diffeo::describe() const {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RotationNode>) {
          return "rot:" + format_real(n.rho);
        } else if constexpr (std::is_same_v<T, ShearNode>) {
          return "shear:" + format_real(n.eps) + ":" + std::to_string(n.q);
        } else if constexpr (std::is_same_v<T, ComposeNode>) {
          return "comp(" + n.outer.describe() + "," + n.inner.describe() + ")";
        } else if constexpr (std::is_same_v<T, InverseNode>) {
          return "inv(" + n.inner.describe() + ")";
        } else {
          return "pow(" + n.base.describe() + "," + std::to_string(n.m) + ")";
        }
      },
      node_->v);
}

double solve_lift(const Diffeo& f, double y, double guess, double tol, int max_iterations) {
  if (!(tol > 0.0)) throw ValidationError("solve_lift: tolerance must be positive");
  double x = guess;
  Jet j = f.jet(x, 1);
  double r = j.value - y;
  // Once inside the tolerance, one more Newton step is nearly free and takes
  // the root to rounding level, which keeps composed orbits consistent.
  const auto polish = [&] { return x - r / j.d1; };
  if (std::abs(r) <= tol) return polish();

  // |disp(a) - disp(b)| < 1 for a degree-one lift, so the root lies within
  // one unit of y - disp(y).
  const double centre = 2.0 * y - f.lift(y);
  double lo = centre - 1.0;
  double hi = centre + 1.0;
  if (r > 0.0) hi = std::min(hi, x);
  else lo = std::max(lo, x);

  for (int it = 0; it < max_iterations; ++it) {
    double next = x - r / j.d1;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
    j = f.jet(x, 1);
    r = j.value - y;
    if (std::abs(r) <= tol) return polish();
    if (r > 0.0) hi = x;
    else lo = x;
    if (!(hi > lo)) break;
  }
  throw NumericalError("inverse evaluation did not converge for " + f.describe() + " at y=" + format_real(y));
}

OrbitState advance(const Diffeo& step, const OrbitState& s) {
  const Jet j = step.jet(s.point, 2);
  return {wrap_unit(j.value), s.log_d + std::log(j.d1), s.d * j.d1, s.affine + (j.d2 / j.d1) * s.d};
}

OrbitData iterate_orbit(const Diffeo& f, CirclePoint x, int n) {
  const Diffeo step = n >= 0 ? f : inverse(f);
  const std::size_t count = static_cast<std::size_t>(n >= 0 ? n : -static_cast<long long>(n));
  OrbitData out;
  out.points.reserve(count + 1);
  out.log_d.reserve(count + 1);
  out.d.reserve(count + 1);
  out.affine.reserve(count + 1);
  OrbitState s{x.value()};
  for (std::size_t k = 0;; ++k) {
    out.points.push_back(s.point);
    out.log_d.push_back(s.log_d);
    out.d.push_back(s.d);
    out.affine.push_back(s.affine);
    if (k == count) break;
    s = advance(step, s);
  }
  return out;
}

double rotation_number(const Diffeo& f, std::int64_t n_iter) {
  if (n_iter < 1) throw ValidationError("rotation_number: need n_iter >= 1");
  double x = 0.0;
  double turns = 0.0;
  for (std::int64_t i = 0; i < n_iter; ++i) {
    const double y = f.lift(x);
    const double whole = std::floor(y);
    turns += whole;
    x = y - whole;
  }
  return (turns + x) / static_cast<double>(n_iter);
}

ContinuedFraction continued_fraction(double rho, int depth) {
  if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("continued_fraction: need 0 < rho < 1");
  if (depth < 1) throw ValidationError("continued_fraction: need depth >= 1");
  ContinuedFraction cf;
  cf.rho = rho;
  std::int64_t p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
  std::int64_t p = 0, q = 1;            // p_0, q_0 (a_0 = 0)
  double x = rho;
  for (int k = 0; k < depth; ++k) {
    const double inv = 1.0 / x;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    x = inv - static_cast<double>(a);
    const std::int64_t p_next = a * p + p_prev;
    const std::int64_t q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    cf.partial_quotients.push_back(a);
    cf.convergents.push_back({p, q});
    if (x < 1e-14) {
      cf.terminated = true;
      break;
    }
  }
  return cf;
}

std::vector<std::int64_t> fibonacci_denominators(int count) {
  std::vector<std::int64_t> out;
  std::int64_t a = 1, b = 2;
  for (int i = 0; i < count; ++i) {
    out.push_back(a);
    const std::int64_t c = a + b;
    a = b;
    b = c;
  }
  return out;
}

}  // namespace isolab
