#pragma once

// Discretized vectors of C^0(S^1), L^1(S^1), L^2(S^1 x S^1) and L^p(S^1 x S^1),
// and the linear isometric representations
//
//   C0      (Theta v)(x)   = v(f x)
//   L1      (Theta v)(x)   = v(f x) Df(x)
//   L2pair  (Theta v)(x,y) = v(f x, f y) (Df(x) Df(y))^{1/2}
//   Lppair  (Theta v)(x,y) = v(f x, f y) (Df(x) Df(y))^{1/p}
//
// One-dimensional grids sample the midpoints (k + 1/2)/N. The two-dimensional
// grid staggers its axes, x_i = (i + 1/4)/N and y_j = (j + 3/4)/N, so no sample
// lies on the diagonal x = y. Vectors carry their closed-form generator when
// one is known; the representations then compose generators exactly and only
// fall back to (bi)linear periodic interpolation for raw samples.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "isolab/circle.hpp"
#include "isolab/cocycle.hpp"

namespace isolab {

enum class Space { C0, L1, L2Pair, LpPair };

class SpaceTag {
 public:
  static SpaceTag c0() { return SpaceTag(Space::C0, 0.0); }
  static SpaceTag l1() { return SpaceTag(Space::L1, 1.0); }
  static SpaceTag l2pair() { return SpaceTag(Space::L2Pair, 2.0); }
  /// Throws ValidationError unless p > 1.
  static SpaceTag lppair(double p);

  Space kind() const { return kind_; }
  /// Integrability exponent (0 for C0).
  double p() const { return p_; }
  int arity() const { return kind_ == Space::C0 || kind_ == Space::L1 ? 1 : 2; }
  /// Cocycle that turns Theta into an affine action on this space.
  CocycleKind cocycle_kind() const;
  std::string name() const;

  bool operator==(const SpaceTag&) const = default;

 private:
  SpaceTag(Space kind, double p) : kind_(kind), p_(p) {}
  Space kind_;
  double p_;
};

/// Closed-form function on S^1 evaluated in batches.
class Generator1 {
 public:
  using Batch = std::function<void(std::span<const double> xs, std::span<double> out)>;

  Generator1(std::string name, Batch batch) : name_(std::move(name)), batch_(std::move(batch)) {}
  static Generator1 pointwise(std::string name, std::function<double(double)> fn);

  const std::string& name() const { return name_; }
  void sample(std::span<const double> xs, std::span<double> out) const { batch_(xs, out); }
  double operator()(double x) const;

 private:
  std::string name_;
  Batch batch_;
};

/// Closed-form function on S^1 x S^1 evaluated on tensor grids;
/// out[i * ys.size() + j] = g(xs[i], ys[j]).
class Generator2 {
 public:
  using Batch =
      std::function<void(std::span<const double> xs, std::span<const double> ys, std::span<double> out)>;

  Generator2(std::string name, Batch batch) : name_(std::move(name)), batch_(std::move(batch)) {}
  static Generator2 pointwise(std::string name, std::function<double(double, double)> fn);
  /// g(x, y) = a(x) b(y).
  static Generator2 separable(std::string name, Generator1 a, Generator1 b);

  const std::string& name() const { return name_; }
  void sample(std::span<const double> xs, std::span<const double> ys, std::span<double> out) const {
    batch_(xs, ys, out);
  }
  double operator()(double x, double y) const;

 private:
  std::string name_;
  Batch batch_;
};

/// Grid axes.
std::vector<double> midpoint_axis(std::size_t n);
std::vector<double> pair_axis_x(std::size_t n);
std::vector<double> pair_axis_y(std::size_t n);

inline constexpr std::size_t kDefaultN1 = 1u << 12;
inline constexpr std::size_t kDefaultN2 = 1u << 8;

class GridFunction1 {
 public:
  /// Throws ValidationError unless samples.size() is a power of two and all finite.
  explicit GridFunction1(std::vector<double> samples, std::optional<Generator1> generator = std::nullopt);
  static GridFunction1 sample(const Generator1& g, std::size_t n);
  static GridFunction1 constant(double value, std::size_t n);

  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  const std::optional<Generator1>& generator() const { return generator_; }

  /// Generator value when known, periodic linear interpolation otherwise.
  void evaluate(std::span<const double> xs, std::span<double> out) const;
  double interpolate(double x) const;

  friend GridFunction1 operator+(const GridFunction1& u, const GridFunction1& v);
  friend GridFunction1 operator-(const GridFunction1& u, const GridFunction1& v);
  friend GridFunction1 operator*(double s, const GridFunction1& v);

 private:
  std::vector<double> samples_;
  std::optional<Generator1> generator_;
};

class GridFunction2 {
 public:
  /// samples is n*n in row-major order (x index major).
  explicit GridFunction2(std::vector<double> samples, std::optional<Generator2> generator = std::nullopt);
  static GridFunction2 sample(const Generator2& g, std::size_t n);
  static GridFunction2 constant(double value, std::size_t n);

  /// Points per axis.
  std::size_t size() const { return n_; }
  std::span<const double> samples() const { return samples_; }
  const std::optional<Generator2>& generator() const { return generator_; }

  void evaluate(std::span<const double> xs, std::span<const double> ys, std::span<double> out) const;
  double interpolate(double x, double y) const;

  friend GridFunction2 operator+(const GridFunction2& u, const GridFunction2& v);
  friend GridFunction2 operator-(const GridFunction2& u, const GridFunction2& v);
  friend GridFunction2 operator*(double s, const GridFunction2& v);

 private:
  std::size_t n_ = 0;
  std::vector<double> samples_;
  std::optional<Generator2> generator_;
};

using GridFunction = std::variant<GridFunction1, GridFunction2>;

int arity(const GridFunction& v);
std::size_t grid_size(const GridFunction& v);
GridFunction operator+(const GridFunction& u, const GridFunction& v);
GridFunction operator-(const GridFunction& u, const GridFunction& v);
GridFunction operator*(double s, const GridFunction& v);

/// C0: max |v|; L1: mean |v|; L2pair: sqrt(mean v^2); Lppair: (mean |v|^p)^{1/p}.
/// Throws ValidationError when the arity of v does not match the tag.
double norm(const SpaceTag& tag, const GridFunction& v);

/// Image of the axis points under f^n together with Df^n and the accumulated
/// log / affine derivative data along each orbit.
struct AxisTransport {
  int n = 0;
  std::vector<double> image;
  std::vector<double> d;
  std::vector<double> log_d;
  std::vector<double> affine;
};

AxisTransport transport_axis(const Diffeo& f, int n, std::span<const double> xs);

/// One orbit pass per point serving every requested time; result[k] belongs
/// to times[k]. Times may repeat and have either sign.
std::vector<AxisTransport> transport_axis(const Diffeo& f, std::span<const int> times, std::span<const double> xs);

/// Theta_f(v) sampled on the grid of v.
GridFunction represent(const SpaceTag& tag, const Diffeo& f, const GridFunction& v);

/// Theta_f^n(v), plus c_{f^n} when with_cocycle is set, for each n in times.
/// Results carry a generator whenever v does, so they can be pushed again
/// without interpolation.
std::vector<GridFunction> push_forward(const SpaceTag& tag, const Diffeo& f, std::span<const int> times,
                                       const GridFunction& v, bool with_cocycle);

/// Sample CSV: "index,sample" with the flattened index i * N + j for pairs.
void write_csv(std::ostream& out, const GridFunction& v);
/// {"tag":..., "N":..., "arity":..., "generator":...}; generator omitted when unknown.
std::string json_header(const SpaceTag& tag, const GridFunction& v);

/// Named vectors used by the tools: "zero", "one", "sin", "cos" on S^1;
/// "zero", "one", "cosdiff" = cos 2pi(x-y), "sinsin" = sin 2pi x sin 2pi y on
/// S^1 x S^1. Throws ValidationError for unknown names.
GridFunction standard_vector(const SpaceTag& tag, const std::string& name, std::size_t n);

}  // namespace isolab
