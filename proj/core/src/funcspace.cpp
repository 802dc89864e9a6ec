#include "isolab/funcspace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "isolab/error.hpp"

namespace isolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_samples(std::span<const double> s) {
  for (double v : s)
    if (!std::isfinite(v)) throw ValidationError("grid function samples must be finite");
}

std::vector<double> axis(std::size_t n, double offset) {
  if (!is_power_of_two(n)) throw ValidationError("grid size must be a power of two");
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = (static_cast<double>(k) + offset) / static_cast<double>(n);
  return xs;
}

// Periodic linear interpolation weights on the axis (k + offset)/n.
struct Stencil {
  std::size_t lo, hi;
  double t;
};

Stencil stencil(double x, std::size_t n, double offset) {
  const double s = wrap_unit(x) * static_cast<double>(n) - offset;
  const double fl = std::floor(s);
  const auto nn = static_cast<long long>(n);
  long long i = static_cast<long long>(fl) % nn;
  if (i < 0) i += nn;
  return {static_cast<std::size_t>(i), static_cast<std::size_t>((i + 1) % nn), s - fl};
}

double jacobian_exponent(const SpaceTag& tag) {
  switch (tag.kind()) {
    case Space::C0:
      return 0.0;
    case Space::L1:
      return 1.0;
    default:
      return 1.0 / tag.p();
  }
}

double weight(double d, double exponent) {
  if (exponent == 0.0) return 1.0;
  if (exponent == 1.0) return d;
  if (exponent == 0.5) return std::sqrt(d);
  return std::pow(d, exponent);
}

template <class Op>
GridFunction1 combine(const GridFunction1& u, const GridFunction1& v, Op op, const char* sym) {
  if (u.size() != v.size()) throw ValidationError("grid sizes differ");
  std::vector<double> s(u.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = op(u.samples()[k], v.samples()[k]);
  std::optional<Generator1> g;
  if (u.generator() && v.generator()) {
    Generator1 a = *u.generator();
    Generator1 b = *v.generator();
    g = Generator1("(" + a.name() + sym + b.name() + ")", [a, b, op](std::span<const double> xs, std::span<double> out) {
      std::vector<double> tmp(xs.size());
      a.sample(xs, out);
      b.sample(xs, tmp);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(out[k], tmp[k]);
    });
  }
  return GridFunction1(std::move(s), std::move(g));
}

template <class Op>
GridFunction2 combine(const GridFunction2& u, const GridFunction2& v, Op op, const char* sym) {
  if (u.size() != v.size()) throw ValidationError("grid sizes differ");
  std::vector<double> s(u.samples().size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = op(u.samples()[k], v.samples()[k]);
  std::optional<Generator2> g;
  if (u.generator() && v.generator()) {
    Generator2 a = *u.generator();
    Generator2 b = *v.generator();
    g = Generator2("(" + a.name() + sym + b.name() + ")",
                   [a, b, op](std::span<const double> xs, std::span<const double> ys, std::span<double> out) {
                     std::vector<double> tmp(out.size());
                     a.sample(xs, ys, out);
                     b.sample(xs, ys, tmp);
                     for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(out[k], tmp[k]);
                   });
  }
  return GridFunction2(std::move(s), std::move(g));
}

std::string scaled_name(double s, const std::string& name) {
  return nlohmann::json(s).dump() + "*" + name;
}

}  // namespace

SpaceTag SpaceTag::lppair(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("Lp pair space: need p > 1");
  if (p == 2.0) return l2pair();
  return SpaceTag(Space::LpPair, p);
}

CocycleKind SpaceTag::cocycle_kind() const {
  switch (kind_) {
    case Space::C0:
      return CocycleKind::log();
    case Space::L1:
      return CocycleKind::affine();
    default:
      return CocycleKind::projective(p_);
  }
}

std::string SpaceTag::name() const {
  switch (kind_) {
    case Space::C0:
      return "c0";
    case Space::L1:
      return "l1";
    case Space::L2Pair:
      return "l2";
    default: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof(buf), p_);
      return "lp:" + std::string(buf, res.ptr);
    }
  }
}

Generator1 Generator1::pointwise(std::string name, std::function<double(double)> fn) {
  return Generator1(std::move(name), [fn = std::move(fn)](std::span<const double> xs, std::span<double> out) {
    for (std::size_t k = 0; k < xs.size(); ++k) out[k] = fn(xs[k]);
  });
}

double Generator1::operator()(double x) const {
  double out = 0.0;
  batch_(std::span<const double>(&x, 1), std::span<double>(&out, 1));
  return out;
}

Generator2 Generator2::pointwise(std::string name, std::function<double(double, double)> fn) {
  return Generator2(std::move(name),
                    [fn = std::move(fn)](std::span<const double> xs, std::span<const double> ys, std::span<double> out) {
                      for (std::size_t i = 0; i < xs.size(); ++i)
                        for (std::size_t j = 0; j < ys.size(); ++j) out[i * ys.size() + j] = fn(xs[i], ys[j]);
                    });
}

Generator2 Generator2::separable(std::string name, Generator1 a, Generator1 b) {
  return Generator2(std::move(name), [a = std::move(a), b = std::move(b)](std::span<const double> xs,
                                                                          std::span<const double> ys,
                                                                          std::span<double> out) {
    std::vector<double> ax(xs.size()), by(ys.size());
    a.sample(xs, ax);
    b.sample(ys, by);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j) out[i * ys.size() + j] = ax[i] * by[j];
  });
}

double Generator2::operator()(double x, double y) const {
  double out = 0.0;
  batch_(std::span<const double>(&x, 1), std::span<const double>(&y, 1), std::span<double>(&out, 1));
  return out;
}

std::vector<double> midpoint_axis(std::size_t n) { return axis(n, 0.5); }
std::vector<double> pair_axis_x(std::size_t n) { return axis(n, 0.25); }
std::vector<double> pair_axis_y(std::size_t n) { return axis(n, 0.75); }

GridFunction1::GridFunction1(std::vector<double> samples, std::optional<Generator1> generator)
    : samples_(std::move(samples)), generator_(std::move(generator)) {
  if (!is_power_of_two(samples_.size())) throw ValidationError("grid size must be a power of two");
  check_samples(samples_);
}

GridFunction1 GridFunction1::sample(const Generator1& g, std::size_t n) {
  const std::vector<double> xs = midpoint_axis(n);
  std::vector<double> s(n);
  g.sample(xs, s);
  return GridFunction1(std::move(s), g);
}

GridFunction1 GridFunction1::constant(double value, std::size_t n) {
  return sample(Generator1(nlohmann::json(value).dump(),
                           [value](std::span<const double>, std::span<double> out) {
                             std::fill(out.begin(), out.end(), value);
                           }),
                n);
}

void GridFunction1::evaluate(std::span<const double> xs, std::span<double> out) const {
  if (generator_) {
    generator_->sample(xs, out);
    return;
  }
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = interpolate(xs[k]);
}

double GridFunction1::interpolate(double x) const {
  const Stencil s = stencil(x, samples_.size(), 0.5);
  return (1.0 - s.t) * samples_[s.lo] + s.t * samples_[s.hi];
}

GridFunction1 operator+(const GridFunction1& u, const GridFunction1& v) {
  return combine(u, v, std::plus<double>(), "+");
}
GridFunction1 operator-(const GridFunction1& u, const GridFunction1& v) {
  return combine(u, v, std::minus<double>(), "-");
}
GridFunction1 operator*(double s, const GridFunction1& v) {
  std::vector<double> out(v.samples().begin(), v.samples().end());
  for (double& x : out) x *= s;
  std::optional<Generator1> g;
  if (v.generator()) {
    Generator1 a = *v.generator();
    g = Generator1(scaled_name(s, a.name()), [a, s](std::span<const double> xs, std::span<double> o) {
      a.sample(xs, o);
      for (double& x : o) x *= s;
    });
  }
  return GridFunction1(std::move(out), std::move(g));
}

GridFunction2::GridFunction2(std::vector<double> samples, std::optional<Generator2> generator)
    : samples_(std::move(samples)), generator_(std::move(generator)) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(samples_.size()))));
  if (n * n != samples_.size() || !is_power_of_two(n))
    throw ValidationError("pair grid must be N x N with N a power of two");
  n_ = n;
  check_samples(samples_);
}

GridFunction2 GridFunction2::sample(const Generator2& g, std::size_t n) {
  const std::vector<double> xs = pair_axis_x(n);
  const std::vector<double> ys = pair_axis_y(n);
  std::vector<double> s(n * n);
  g.sample(xs, ys, s);
  return GridFunction2(std::move(s), g);
}

GridFunction2 GridFunction2::constant(double value, std::size_t n) {
  return sample(Generator2(nlohmann::json(value).dump(),
                           [value](std::span<const double>, std::span<const double>, std::span<double> out) {
                             std::fill(out.begin(), out.end(), value);
                           }),
                n);
}

void GridFunction2::evaluate(std::span<const double> xs, std::span<const double> ys, std::span<double> out) const {
  if (generator_) {
    generator_->sample(xs, ys, out);
    return;
  }
  std::vector<Stencil> sy(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) sy[j] = stencil(ys[j], n_, 0.75);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Stencil sx = stencil(xs[i], n_, 0.25);
    const double* r0 = samples_.data() + sx.lo * n_;
    const double* r1 = samples_.data() + sx.hi * n_;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Stencil& s = sy[j];
      const double a = (1.0 - s.t) * r0[s.lo] + s.t * r0[s.hi];
      const double b = (1.0 - s.t) * r1[s.lo] + s.t * r1[s.hi];
      out[i * ys.size() + j] = (1.0 - sx.t) * a + sx.t * b;
    }
  }
}

double GridFunction2::interpolate(double x, double y) const {
  double out = 0.0;
  if (generator_) {
    // interpolate means the sampled fallback even when a generator exists
    GridFunction2 raw(samples_);
    raw.evaluate(std::span<const double>(&x, 1), std::span<const double>(&y, 1), std::span<double>(&out, 1));
    return out;
  }
  evaluate(std::span<const double>(&x, 1), std::span<const double>(&y, 1), std::span<double>(&out, 1));
  return out;
}

GridFunction2 operator+(const GridFunction2& u, const GridFunction2& v) {
  return combine(u, v, std::plus<double>(), "+");
}
GridFunction2 operator-(const GridFunction2& u, const GridFunction2& v) {
  return combine(u, v, std::minus<double>(), "-");
}
GridFunction2 operator*(double s, const GridFunction2& v) {
  std::vector<double> out(v.samples().begin(), v.samples().end());
  for (double& x : out) x *= s;
  std::optional<Generator2> g;
  if (v.generator()) {
    Generator2 a = *v.generator();
    g = Generator2(scaled_name(s, a.name()),
                   [a, s](std::span<const double> xs, std::span<const double> ys, std::span<double> o) {
                     a.sample(xs, ys, o);
                     for (double& x : o) x *= s;
                   });
  }
  return GridFunction2(std::move(out), std::move(g));
}

int arity(const GridFunction& v) { return std::holds_alternative<GridFunction1>(v) ? 1 : 2; }

std::size_t grid_size(const GridFunction& v) {
  return std::visit([](const auto& g) { return g.size(); }, v);
}

GridFunction operator+(const GridFunction& u, const GridFunction& v) {
  if (arity(u) != arity(v)) throw ValidationError("cannot add grid functions of different arity");
  if (arity(u) == 1) return std::get<GridFunction1>(u) + std::get<GridFunction1>(v);
  return std::get<GridFunction2>(u) + std::get<GridFunction2>(v);
}

GridFunction operator-(const GridFunction& u, const GridFunction& v) {
  if (arity(u) != arity(v)) throw ValidationError("cannot subtract grid functions of different arity");
  if (arity(u) == 1) return std::get<GridFunction1>(u) - std::get<GridFunction1>(v);
  return std::get<GridFunction2>(u) - std::get<GridFunction2>(v);
}

GridFunction operator*(double s, const GridFunction& v) {
  return std::visit([s](const auto& g) { return GridFunction(s * g); }, v);
}

double norm(const SpaceTag& tag, const GridFunction& v) {
  if (tag.arity() != arity(v)) throw ValidationError("norm: space " + tag.name() + " does not match vector arity");
  const std::span<const double> s = std::visit([](const auto& g) { return g.samples(); }, v);
  const auto count = static_cast<double>(s.size());
  switch (tag.kind()) {
    case Space::C0: {
      double m = 0.0;
      for (double x : s) m = std::max(m, std::abs(x));
      return m;
    }
    case Space::L1: {
      double t = 0.0;
      for (double x : s) t += std::abs(x);
      return t / count;
    }
    case Space::L2Pair: {
      double t = 0.0;
      for (double x : s) t += x * x;
      return std::sqrt(t / count);
    }
    default: {
      const double p = tag.p();
      double t = 0.0;
      for (double x : s) t += std::pow(std::abs(x), p);
      return std::pow(t / count, 1.0 / p);
    }
  }
}

AxisTransport transport_axis(const Diffeo& f, int n, std::span<const double> xs) {
  const int times[1] = {n};
  return std::move(transport_axis(f, times, xs).front());
}

std::vector<AxisTransport> transport_axis(const Diffeo& f, std::span<const int> times, std::span<const double> xs) {
  std::vector<AxisTransport> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k].n = times[k];
    out[k].image.resize(xs.size());
    out[k].d.resize(xs.size());
    out[k].log_d.resize(xs.size());
    out[k].affine.resize(xs.size());
  }
  // Visit the times of each sign in order of increasing |n|.
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(static_cast<long long>(times[a])) < std::abs(static_cast<long long>(times[b]));
  });
  const Diffeo back = inverse(f);

  for (int sign : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t k : order)
      if ((sign > 0 && times[k] >= 0) || (sign < 0 && times[k] < 0)) idx.push_back(k);
    if (idx.empty()) continue;
    const Diffeo& step = sign > 0 ? f : back;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      OrbitState s{wrap_unit(xs[i])};
      long long done = 0;
      for (std::size_t k : idx) {
        const long long target = std::abs(static_cast<long long>(times[k]));
        for (; done < target; ++done) s = advance(step, s);
        out[k].image[i] = s.point;
        out[k].d[i] = s.d;
        out[k].log_d[i] = s.log_d;
        out[k].affine[i] = s.affine;
      }
    }
  }
  return out;
}

namespace {

// Theta^n v (+ c_n) at the points described by one axis transport.
void push_values_1(const SpaceTag& tag, const AxisTransport& t, const GridFunction1& v, bool with_cocycle,
                   std::span<double> out) {
  v.evaluate(t.image, out);
  const double e = jacobian_exponent(tag);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] *= weight(t.d[k], e);
    if (with_cocycle) out[k] += tag.kind() == Space::C0 ? t.log_d[k] : t.affine[k];
  }
}

void push_values_2(const SpaceTag& tag, std::span<const double> xs, std::span<const double> ys,
                   const AxisTransport& tx, const AxisTransport& ty, const GridFunction2& v, bool with_cocycle,
                   std::span<double> out) {
  v.evaluate(tx.image, ty.image, out);
  const double e = jacobian_exponent(tag);
  std::vector<double> wy(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) wy[j] = weight(ty.d[j], e);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double wx = weight(tx.d[i], e);
    double* row = out.data() + i * ys.size();
    for (std::size_t j = 0; j < ys.size(); ++j) {
      row[j] *= wx * wy[j];
      if (with_cocycle)
        row[j] += projective_from_images(tag.p(), xs[i], ys[j], tx.image[i], ty.image[j], tx.d[i], ty.d[j]);
    }
  }
}

}  // namespace

std::vector<GridFunction> push_forward(const SpaceTag& tag, const Diffeo& f, std::span<const int> times,
                                       const GridFunction& v, bool with_cocycle) {
  if (tag.arity() != arity(v)) throw ValidationError("space " + tag.name() + " does not match vector arity");
  std::vector<GridFunction> out;
  out.reserve(times.size());
  const std::string prefix = with_cocycle ? "I" : "Theta";

  if (arity(v) == 1) {
    const auto& u = std::get<GridFunction1>(v);
    const std::vector<double> xs = midpoint_axis(u.size());
    const std::vector<AxisTransport> tr = transport_axis(f, times, xs);
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> s(xs.size());
      push_values_1(tag, tr[k], u, with_cocycle, s);
      std::optional<Generator1> g;
      if (u.generator()) {
        const int n = times[k];
        g = Generator1(prefix + "^" + std::to_string(n) + "(" + u.generator()->name() + ")",
                       [tag, f, n, u, with_cocycle](std::span<const double> pts, std::span<double> o) {
                         push_values_1(tag, transport_axis(f, n, pts), u, with_cocycle, o);
                       });
      }
      out.emplace_back(GridFunction1(std::move(s), std::move(g)));
    }
    return out;
  }

  const auto& u = std::get<GridFunction2>(v);
  const std::vector<double> xs = pair_axis_x(u.size());
  const std::vector<double> ys = pair_axis_y(u.size());
  const std::vector<AxisTransport> tx = transport_axis(f, times, xs);
  const std::vector<AxisTransport> ty = transport_axis(f, times, ys);
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> s(xs.size() * ys.size());
    push_values_2(tag, xs, ys, tx[k], ty[k], u, with_cocycle, s);
    std::optional<Generator2> g;
    if (u.generator()) {
      const int n = times[k];
      g = Generator2(prefix + "^" + std::to_string(n) + "(" + u.generator()->name() + ")",
                     [tag, f, n, u, with_cocycle](std::span<const double> px, std::span<const double> py,
                                                  std::span<double> o) {
                       push_values_2(tag, px, py, transport_axis(f, n, px), transport_axis(f, n, py), u,
                                     with_cocycle, o);
                     });
    }
    out.emplace_back(GridFunction2(std::move(s), std::move(g)));
  }
  return out;
}

GridFunction represent(const SpaceTag& tag, const Diffeo& f, const GridFunction& v) {
  const int one[1] = {1};
  return std::move(push_forward(tag, f, one, v, false).front());
}

void write_csv(std::ostream& out, const GridFunction& v) {
  out << "index,sample\n";
  const std::span<const double> s = std::visit([](const auto& g) { return g.samples(); }, v);
  for (std::size_t k = 0; k < s.size(); ++k) out << k << ',' << nlohmann::json(s[k]).dump() << '\n';
}

std::string json_header(const SpaceTag& tag, const GridFunction& v) {
  nlohmann::json j;
  j["tag"] = tag.name();
  j["N"] = grid_size(v);
  j["arity"] = arity(v);
  const std::string gen = std::visit(
      [](const auto& g) { return g.generator() ? g.generator()->name() : std::string(); }, v);
  if (!gen.empty()) j["generator"] = gen;
  return j.dump();
}

GridFunction standard_vector(const SpaceTag& tag, const std::string& name, std::size_t n) {
  if (tag.arity() == 1) {
    if (name == "zero") return GridFunction1::constant(0.0, n);
    if (name == "one") return GridFunction1::constant(1.0, n);
    if (name == "sin") return GridFunction1::sample(Generator1::pointwise("sin", [](double x) { return std::sin(kTwoPi * x); }), n);
    if (name == "cos") return GridFunction1::sample(Generator1::pointwise("cos", [](double x) { return std::cos(kTwoPi * x); }), n);
  } else {
    if (name == "zero") return GridFunction2::constant(0.0, n);
    if (name == "one") return GridFunction2::constant(1.0, n);
    if (name == "cosdiff")
      return GridFunction2::sample(
          Generator2::pointwise("cosdiff", [](double x, double y) { return std::cos(kTwoPi * (x - y)); }), n);
    if (name == "sinsin") {
      const Generator1 s = Generator1::pointwise("sin", [](double x) { return std::sin(kTwoPi * x); });
      return GridFunction2::sample(Generator2::separable("sinsin", s, s), n);
    }
  }
  throw ValidationError("unknown vector '" + name + "' for space " + tag.name());
}

}  // namespace isolab
