#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "isolab/circle.hpp"
#include "isolab/error.hpp"
#include "isolab/funcspace.hpp"
#include "isolab/isometry.hpp"
#include "oracles.hpp"

using namespace isolab;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
const Diffeo kH = Diffeo::sine_shear(0.5, 1);

Diffeo driving() { return conjugate(kH, Diffeo::rotation(kGolden)); }

std::vector<int> fib(int count) {
  std::vector<int> out;
  for (std::int64_t q : fibonacci_denominators(count)) out.push_back(static_cast<int>(q));
  return out;
}

double sup_diff(const GridFunction& a, const GridFunction& b) { return norm(SpaceTag::c0(), a - b); }

double sup2(const GridFunction& a, const GridFunction& b) {
  const GridFunction d = a - b;
  double m = 0;
  for (double s : std::get<GridFunction2>(d).samples()) m = std::max(m, std::abs(s));
  return m;
}

double sup_any(const GridFunction& a, const GridFunction& b) {
  return arity(a) == 1 ? sup_diff(a, b) : sup2(a, b);
}

struct SpaceCase {
  SpaceTag tag;
  const char* vec;
  std::size_t n;
};

const std::vector<SpaceCase>& spaces() {
  static const std::vector<SpaceCase> all{{SpaceTag::c0(), "sin", 1024},
                                          {SpaceTag::l1(), "cos", 1024},
                                          {SpaceTag::l2pair(), "cosdiff", 64},
                                          {SpaceTag::lppair(3), "sinsin", 64}};
  return all;
}

}  // namespace

TEST_CASE("apply_power examples") {
  const AffineIsometry iso{SpaceTag::c0(), driving()};
  const GridFunction v = standard_vector(SpaceTag::c0(), "sin", 256);
  const GridFunction same = apply_power(iso, 0, v);
  for (std::size_t k = 0; k < 256; ++k)
    CHECK(std::get<GridFunction1>(same).samples()[k] == std::get<GridFunction1>(v).samples()[k]);

  const AffineIsometry rot{SpaceTag::c0(), Diffeo::rotation(0.3)};
  const GridFunction koop = apply_power(rot, 4, v);
  const auto xs = midpoint_axis(256);
  for (std::size_t k = 0; k < 256; k += 17)
    CHECK(std::get<GridFunction1>(koop).samples()[k] == doctest::Approx(std::sin(2 * oracle::kPi * (xs[k] + 1.2))).scale(1.0));
}

TEST_CASE("powers obey the group law on every space") {
  const Diffeo f = driving();
  for (const SpaceCase& c : spaces()) {
    const AffineIsometry iso{c.tag, f};
    const GridFunction v = standard_vector(c.tag, c.vec, c.n);
    for (auto [m, n] : {std::pair{3, 5}, std::pair{-2, 7}, std::pair{4, -4}}) {
      const GridFunction once = apply_power(iso, m + n, v);
      const GridFunction twice = apply_power(iso, m, apply_power(iso, n, v));
      CHECK(sup_any(once, twice) <= 1e-8);
    }
  }
}

TEST_CASE("affine isometries preserve distances") {
  const Diffeo f = driving();
  for (const SpaceCase& c : spaces()) {
    const AffineIsometry iso{c.tag, f};
    auto gap = [&](std::size_t n) {
      const GridFunction u = standard_vector(c.tag, c.vec, n);
      const GridFunction v = 0.5 * standard_vector(c.tag, "one", n);
      const double before = norm(c.tag, u - v);
      return std::abs(norm(c.tag, apply_once(iso, u) - apply_once(iso, v)) - before) / before;
    };
    const std::size_t n = c.tag.arity() == 1 ? kDefaultN1 : kDefaultN2;
    const double coarse = gap(n);
    CHECK(coarse <= 5e-3);
    CHECK(gap(2 * n) <= std::max(0.5 * coarse, 1e-12));
  }
}

TEST_CASE("recurrence_scan examples") {
  const GridFunction v = standard_vector(SpaceTag::c0(), "sin", 4096);
  const std::vector<int> q = fib(10);

  const RecurrenceReport rot = recurrence_scan(AffineIsometry{SpaceTag::c0(), Diffeo::rotation(kGolden)}, v, q);
  for (std::size_t k = 0; k + 1 < q.size(); ++k) CHECK(rot.residuals[k + 1] < rot.residuals[k]);

  const RecurrenceReport conj = recurrence_scan(AffineIsometry{SpaceTag::c0(), driving()}, v, q);
  CHECK(conj.residuals[7] <= 0.1 * conj.residuals[1]);
  for (std::size_t k = 2; k + 1 < q.size(); ++k) CHECK(conj.residuals[k + 1] < conj.residuals[k]);

  const int zero[] = {0};
  CHECK(recurrence_scan(AffineIsometry{SpaceTag::c0(), driving()}, v, zero).residuals[0] == 0.0);
  CHECK_THROWS_AS(recurrence_scan(AffineIsometry{SpaceTag::c0(), driving()}, v, std::span<const int>{}), ValidationError);
}

TEST_CASE("recurrence transfers to powers") {
  const Diffeo f = driving();
  const std::vector<int> q = fib(10);
  for (const SpaceCase& c : spaces()) {
    const GridFunction v = standard_vector(c.tag, c.vec, c.n);
    const AffineIsometry iso{c.tag, f};
    for (int m : {2, 3, 5}) {
      const AffineIsometry pm{c.tag, power(f, m)};
      std::vector<int> mq;
      for (int t : q) mq.push_back(m * t);
      const RecurrenceReport a = recurrence_scan(pm, v, q);
      const RecurrenceReport b = recurrence_scan(iso, v, mq);
      const RecurrenceReport base = recurrence_scan(iso, v, q);
      for (std::size_t k = 0; k < q.size(); ++k) {
        CHECK(a.residuals[k] == doctest::Approx(b.residuals[k]).epsilon(1e-6).scale(1.0));
        CHECK(a.residuals[k] <= m * base.residuals[k] * (1 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST_CASE("drift_estimate examples") {
  const GridFunction v = standard_vector(SpaceTag::c0(), "sin", 512);
  for (const DriftRow& r : drift_estimate(AffineIsometry{SpaceTag::c0(), Diffeo::rotation(0.0)}, GridFunction1::constant(0.0, 512), 20))
    CHECK(r.value == 0.0);

  const Diffeo f = driving();
  const AffineIsometry iso{SpaceTag::c0(), f};
  // sup_n ||log Df^n|| <= 2 sup ||log Dh|| for f = h R h^{-1}.
  const double bound = 1.0 + 2.0 * std::log(1.5 / 0.5);
  const std::vector<DriftRow> rows = drift_estimate(iso, v, 200);
  CHECK(rows.size() == 200);
  for (const DriftRow& r : rows) CHECK(r.value <= bound / r.n);

  // n * drift stays bounded: a fitted C is stable over [10, 500].
  const int times[] = {10, 50, 100, 250, 500};
  const std::vector<DriftRow> sparse = drift_estimate(iso, v, times);
  double lo = 1e300, hi = 0;
  for (const DriftRow& r : sparse) {
    lo = std::min(lo, r.value * r.n);
    hi = std::max(hi, r.value * r.n);
  }
  CHECK(hi <= bound);
  CHECK(sparse.back().value <= sparse.front().value / 10);

  CHECK_THROWS_AS(drift_estimate(iso, v, 0), ValidationError);
  const int bad[] = {0, 3};
  CHECK_THROWS_AS(drift_estimate(iso, v, bad), ValidationError);
}

TEST_CASE("fixed_point_from_conjugacy examples") {
  const GridFunction1 z = fixed_point_from_conjugacy(SpaceTag::c0(), Diffeo::rotation(0.2), 64);
  for (double s : z.samples()) CHECK(std::abs(s) <= 1e-15);

  const Diffeo f = driving();
  const GridFunction c0 = fixed_point_from_conjugacy(SpaceTag::c0(), kH);
  CHECK(norm(SpaceTag::c0(), apply_once(AffineIsometry{SpaceTag::c0(), f}, c0) - c0) <= 1e-6);
  const GridFunction l1 = fixed_point_from_conjugacy(SpaceTag::l1(), kH);
  CHECK(norm(SpaceTag::l1(), apply_once(AffineIsometry{SpaceTag::l1(), f}, l1) - l1) <= 1e-5);

  // The fixed point is log D(h^{-1}); its negative is not fixed.
  const GridFunction wrong = -1.0 * c0;
  CHECK(norm(SpaceTag::c0(), apply_once(AffineIsometry{SpaceTag::c0(), f}, wrong) - wrong) > 0.1);

  CHECK_THROWS_AS(fixed_point_from_conjugacy(SpaceTag::l2pair(), kH), ValidationError);
}

TEST_CASE("conjugacy_from_fixed_point examples") {
  const SampledConjugacy id = conjugacy_from_fixed_point(SpaceTag::c0(), GridFunction1::constant(0.0, 256));
  for (double x : {0.0, 0.1, 0.55, 0.9}) {
    CHECK(id.lift(x) == doctest::Approx(x).scale(1.0));
    CHECK(id.inverse_lift(x) == doctest::Approx(x).scale(1.0));
  }

  // Round trip: the recovered map is h^{-1} up to a rotation.
  const Diffeo k = inverse(kH);
  for (const SpaceTag& tag : {SpaceTag::c0(), SpaceTag::l1()}) {
    const SampledConjugacy H = conjugacy_from_fixed_point(tag, fixed_point_from_conjugacy(tag, kH));
    const double shift = H.lift(0.0) - k.lift(0.0);
    double err = 0;
    for (int j = 0; j < 1000; ++j) {
      const double x = (j + 0.37) / 1000.0;
      err = std::max(err, std::abs(H.lift(x) - k.lift(x) - shift));
    }
    CHECK(err <= 1e-4);
  }

  // D(H f H^{-1}) is identically one, by the interpolant and by differences.
  const Diffeo f = driving();
  for (const SpaceTag& tag : {SpaceTag::c0(), SpaceTag::l1()}) {
    const SampledConjugacy H = conjugacy_from_fixed_point(tag, fixed_point_from_conjugacy(tag, kH));
    double worst = 0, worst_fd = 0;
    for (int j = 0; j < 1000; ++j) {
      const double y = (j + 0.5) / 1000.0;
      worst = std::max(worst, std::abs(conjugated_derivative(H, f, y) - 1.0));
      worst_fd = std::max(worst_fd, std::abs(conjugated_derivative_fd(H, f, y) - 1.0));
    }
    CHECK(worst <= 1e-3);
    CHECK(worst_fd <= 1e-3);
  }

  CHECK_THROWS_AS(conjugacy_from_fixed_point(SpaceTag::l2pair(), GridFunction1::constant(0.0, 8)), ValidationError);
}

TEST_CASE("sampled conjugacy inverts its lift") {
  const SampledConjugacy H = conjugacy_from_fixed_point(SpaceTag::c0(), fixed_point_from_conjugacy(SpaceTag::c0(), kH, 512));
  for (double y : {-0.3, 0.0, 0.25, 0.999, 1.7}) CHECK(H.lift(H.inverse_lift(y)) == doctest::Approx(y).epsilon(1e-13).scale(1.0));
  CHECK(H.lift(1.0) == doctest::Approx(1.0 + H.lift(0.0)));
  CHECK_THROWS_AS(SampledConjugacy({0.0, 0.6, 0.5}, {1.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(SampledConjugacy({0.0, 1.0}, {1.0, -1.0}), ValidationError);
}

TEST_CASE("commuting_family examples") {
  const std::vector<double> rhos{kGolden, std::sqrt(2.0) - 1.0};
  const auto plain = commuting_family(Diffeo::rotation(0.0), rhos, SpaceTag::c0());
  CHECK(plain[0].f.is_rotation());

  for (const SpaceCase& c : spaces()) {
    const auto fam = commuting_family(kH, rhos, c.tag);
    const GridFunction v = standard_vector(c.tag, c.vec, c.n);
    const GridFunction ab = apply_once(fam[0], apply_once(fam[1], v));
    const GridFunction ba = apply_once(fam[1], apply_once(fam[0], v));
    CHECK(norm(c.tag, ab - ba) <= 1e-7);

    const AffineIsometry sq{c.tag, compose(fam[0].f, fam[0].f)};
    CHECK(norm(c.tag, apply_once(sq, v) - apply_once(fam[0], apply_once(fam[0], v))) <= 1e-8);

    // Mixed composition follows the right action I_f I_g = I_{g o f}.
    const AffineIsometry gf{c.tag, compose(fam[1].f, fam[0].f)};
    CHECK(norm(c.tag, apply_once(gf, v) - ab) <= 1e-7);
  }
  const double rep[] = {0.3, 0.3};
  CHECK_THROWS_AS(commuting_family(kH, rep, SpaceTag::c0()), ValidationError);
}

TEST_CASE("reports serialize") {
  const GridFunction v = standard_vector(SpaceTag::c0(), "sin", 64);
  const int times[] = {1, 2};
  const RecurrenceReport r = recurrence_scan(AffineIsometry{SpaceTag::c0(), driving()}, v, times);
  std::ostringstream os;
  write_csv(os, r);
  CHECK(os.str().rfind("time,residual\n1,", 0) == 0);
  const auto j = nlohmann::json::parse(json_summary(r));
  CHECK(j["tag"] == "c0");
  CHECK(j["times"].size() == 2);

  std::ostringstream ds;
  write_csv(ds, drift_estimate(AffineIsometry{SpaceTag::c0(), driving()}, v, 3));
  CHECK(ds.str().rfind("n,drift\n1,", 0) == 0);
}
