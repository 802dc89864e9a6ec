#include "isolab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isolab/crossratio.hpp"
#include "isolab/error.hpp"

namespace isolab {

CocycleKind CocycleKind::projective(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("projective cocycle: need p >= 1");
  return CocycleKind(CocycleTag::Projective, p);
}

std::string CocycleKind::name() const {
  switch (tag_) {
    case CocycleTag::Log:
      return "log";
    case CocycleTag::Affine:
      return "affine";
    default: {
      std::string s = std::to_string(p_);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return "projective:" + s;
    }
  }
}

double CocycleValue::operator()(double x) const {
  if (!fn1_) throw ValidationError("cocycle " + kind_.name() + " takes two arguments");
  return fn1_(x);
}

double CocycleValue::operator()(double x, double y) const {
  if (!fn2_) throw ValidationError("cocycle " + kind_.name() + " takes one argument");
  return fn2_(x, y);
}

namespace {

// Projective cocycle from the signed gaps x - y and f(x) - f(y).
double projective_from_gaps(double p, double gap, double image_gap, double dfx, double dfy) {
  if (gap == std::round(gap) || image_gap == std::round(image_gap))
    throw ValidationError("projective cocycle evaluated on the diagonal");
  const double before = dist(gap, 0.0);
  const double after = dist(image_gap, 0.0);
  if (p == 2.0) return std::sqrt(dfx * dfy) / after - 1.0 / before;
  const double e = 1.0 / p;
  return std::pow(dfx * dfy / (after * after), e) - std::pow(1.0 / (before * before), e);
}

}  // namespace

double projective_from_images(double p, double x, double y, double fx, double fy, double dfx, double dfy) {
  return projective_from_gaps(p, x - y, fx - fy, dfx, dfy);
}

CocycleValue cocycle(const CocycleKind& kind, const Diffeo& f) {
  switch (kind.tag()) {
    case CocycleTag::Log:
      return CocycleValue(kind, CocycleValue::Fn1([f](double x) { return std::log(f.deriv(x, 1)); }));
    case CocycleTag::Affine:
      return CocycleValue(kind, CocycleValue::Fn1([f](double x) {
                            const Jet j = f.jet(x, 2);
                            return j.d2 / j.d1;
                          }));
    default: {
      const double p = kind.p();
      return CocycleValue(kind, CocycleValue::Fn2([f, p](double x, double y) {
                            // Image of y taken as an increment from f(x), which keeps
                            // the image distance accurate for nearby pairs.
                            const double gap = x - y;
                            return projective_from_gaps(p, gap, -f.lift_increment(x, -gap), f.deriv(x, 1),
                                                        f.deriv(y, 1));
                          }));
    }
  }
}

CocycleValue cocycle_of_iterate(const CocycleKind& kind, const Diffeo& f, int n) {
  switch (kind.tag()) {
    case CocycleTag::Log:
      return CocycleValue(kind, CocycleValue::Fn1([f, n](double x) {
                            return iterate_orbit(f, CirclePoint(x), n).log_d.back();
                          }));
    case CocycleTag::Affine:
      return CocycleValue(kind, CocycleValue::Fn1([f, n](double x) {
                            return iterate_orbit(f, CirclePoint(x), n).affine.back();
                          }));
    default: {
      const double p = kind.p();
      return CocycleValue(kind, CocycleValue::Fn2([f, n, p](double x, double y) {
                            const OrbitData ox = iterate_orbit(f, CirclePoint(x), n);
                            const OrbitData oy = iterate_orbit(f, CirclePoint(y), n);
                            return projective_from_images(p, x, y, ox.points.back(), oy.points.back(), ox.d.back(),
                                                          oy.d.back());
                          }));
    }
  }
}

ChainRuleResidual verify_chain_rule(const CocycleKind& kind, const Diffeo& g1, const Diffeo& g2, int samples) {
  if (samples < 1) throw ValidationError("verify_chain_rule: need samples >= 1");
  const Diffeo composite = compose(g1, g2);
  const CocycleValue c12 = cocycle(kind, composite);
  const CocycleValue c1 = cocycle(kind, g1);
  const CocycleValue c2 = cocycle(kind, g2);

  ChainRuleResidual out;
  auto record = [&out](double lhs, double a, double b) {
    out.max_residual = std::max(out.max_residual, std::abs(lhs - (a + b)));
    out.max_term = std::max({out.max_term, std::abs(lhs), std::abs(a), std::abs(b)});
  };

  for (int k = 0; k < samples; ++k) {
    const double x = (k + 0.5) / samples;
    if (kind.arity() == 1) {
      const Jet j2 = g2.jet(x, 1);
      const double weight = kind.tag() == CocycleTag::Affine ? j2.d1 : 1.0;
      record(c12(x), c2(x), c1(wrap_unit(j2.value)) * weight);
    } else {
      // Offsets in [0.005, 0.995] keep every pair away from the diagonal.
      const double frac = std::fmod((k + 1) * std::numbers::phi, 1.0);
      const double y = wrap_unit(x + 0.005 + 0.99 * frac);
      const Jet jx = g2.jet(x, 1);
      const Jet jy = g2.jet(y, 1);
      const double weight = std::pow(jx.d1 * jy.d1, 1.0 / kind.p());
      record(c12(x, y), c2(x, y), c1(wrap_unit(jx.value), wrap_unit(jy.value)) * weight);
    }
  }
  return out;
}

double schwarzian(const Diffeo& f, double x) {
  const Jet j = f.jet(x, 3);
  const double a = j.d2 / j.d1;
  return j.d3 / j.d1 - 1.5 * a * a;
}

double projective_diagonal_limit(const Diffeo& f, double x) {
  const double d1 = f.deriv(x, 1);
  return schwarzian(f, x) / 6.0 + std::numbers::pi * std::numbers::pi * (d1 * d1 - 1.0) / 3.0;
}

}  // namespace isolab
