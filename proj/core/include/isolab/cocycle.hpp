#pragma once

// Derivative cocycles over the group of circle diffeomorphisms.
//
//   Log          c_f(x)   = log Df(x)                         weight J = 1
//   Affine       c_f(x)   = D^2 f(x) / Df(x)                  weight J = Dg(x)
//   Projective   c_f(x,y) = (Df(x) Df(y) / dist(fx,fy)^2)^{1/p}
//                           - (1 / dist(x,y)^2)^{1/p}          weight J = (Dg(x) Dg(y))^{1/p}
//
// Each satisfies c_{g1 o g2} = c_{g2} + (c_{g1} o g2) * J_{g2}. At p = 2 the
// projective cocycle is sqrt(Df(x)Df(y))/dist(fx,fy) - 1/dist(x,y); at p = 1 it
// has the Schwarzian-type diagonal limit computed by projective_diagonal_limit.

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "isolab/circle.hpp"

namespace isolab {

enum class CocycleTag { Log, Affine, Projective };

class CocycleKind {
 public:
  static CocycleKind log() { return CocycleKind(CocycleTag::Log, 0.0); }
  static CocycleKind affine() { return CocycleKind(CocycleTag::Affine, 0.0); }
  /// Throws ValidationError unless p >= 1.
  static CocycleKind projective(double p = 2.0);

  CocycleTag tag() const { return tag_; }
  double p() const { return p_; }
  int arity() const { return tag_ == CocycleTag::Projective ? 2 : 1; }
  /// p = 1 is accepted, but c_1 is integrable only for maps smoother than C^2.
  bool integrability_guaranteed() const { return tag_ != CocycleTag::Projective || p_ > 1.0; }
  std::string name() const;

 private:
  CocycleKind(CocycleTag tag, double p) : tag_(tag), p_(p) {}
  CocycleTag tag_;
  double p_;
};

/// Pointwise evaluator for a cocycle value. One-variable kinds are called as
/// c(x), the projective kind as c(x, y); calling with the wrong arity throws.
class CocycleValue {
 public:
  using Fn1 = std::function<double(double)>;
  using Fn2 = std::function<double(double, double)>;

  CocycleValue(CocycleKind kind, Fn1 fn) : kind_(kind), fn1_(std::move(fn)) {}
  CocycleValue(CocycleKind kind, Fn2 fn) : kind_(kind), fn2_(std::move(fn)) {}

  const CocycleKind& kind() const { return kind_; }
  int arity() const { return kind_.arity(); }
  double operator()(double x) const;
  double operator()(double x, double y) const;

 private:
  CocycleKind kind_;
  Fn1 fn1_;
  Fn2 fn2_;
};

/// Projective cocycle evaluated from the images and derivatives of a map at
/// x and y. Shared by single maps and iterates. Throws ValidationError when
/// x and y coincide on the circle.
double projective_from_images(double p, double x, double y, double fx, double fy, double dfx, double dfy);

CocycleValue cocycle(const CocycleKind& kind, const Diffeo& f);

/// c_{f^n}, evaluated by accumulating along the orbit (Log, Affine) or from
/// Df^n and the orbit end points (Projective). n may be negative.
CocycleValue cocycle_of_iterate(const CocycleKind& kind, const Diffeo& f, int n);

struct ChainRuleResidual {
  double max_residual = 0.0;  // max |c_{g1 o g2} - (c_{g2} + c_{g1} o g2 * J)|
  double max_term = 0.0;      // largest |term| involved, for relative scaling
};

/// Checks the cocycle identity at `samples` deterministic points (pairs for
/// the projective kind; pairs never meet the diagonal).
ChainRuleResidual verify_chain_rule(const CocycleKind& kind, const Diffeo& g1, const Diffeo& g2, int samples);

/// Sf = D^3f/Df - 3/2 (D^2f/Df)^2.
double schwarzian(const Diffeo& f, double x);

/// lim_{y -> x} of the p = 1 projective cocycle. With the chordal metric
/// dist(x,y) = |sin(pi(x-y))|/pi this is Sf(x)/6 + pi^2 (Df(x)^2 - 1)/3, the
/// Schwarzian relative to the projective structure of the circle.
double projective_diagonal_limit(const Diffeo& f, double x);

}  // namespace isolab
