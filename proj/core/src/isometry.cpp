#include "isolab/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "isolab/error.hpp"

namespace isolab {

GridFunction apply_once(const AffineIsometry& iso, const GridFunction& v) { return apply_power(iso, 1, v); }

GridFunction apply_power(const AffineIsometry& iso, int n, const GridFunction& v) {
  const int times[1] = {n};
  return std::move(apply_powers(iso, times, v).front());
}

std::vector<GridFunction> apply_powers(const AffineIsometry& iso, std::span<const int> times, const GridFunction& v) {
  return push_forward(iso.tag, iso.f, times, v, true);
}

RecurrenceReport recurrence_scan(const AffineIsometry& iso, const GridFunction& v, std::span<const int> times) {
  if (times.empty()) throw ValidationError("recurrence_scan: times must be nonempty");
  const std::vector<GridFunction> images = apply_powers(iso, times, v);
  RecurrenceReport r;
  r.tag = iso.tag;
  for (std::size_t k = 0; k < times.size(); ++k) {
    r.times.push_back(times[k]);
    r.residuals.push_back(norm(iso.tag, images[k] - v));
  }
  return r;
}

std::vector<DriftRow> drift_estimate(const AffineIsometry& iso, const GridFunction& v, int n_max) {
  if (n_max < 1) throw ValidationError("drift_estimate: need n_max >= 1");
  std::vector<int> times(static_cast<std::size_t>(n_max));
  std::iota(times.begin(), times.end(), 1);
  return drift_estimate(iso, v, times);
}

std::vector<DriftRow> drift_estimate(const AffineIsometry& iso, const GridFunction& v, std::span<const int> times) {
  for (int t : times)
    if (t < 1) throw ValidationError("drift_estimate: times must be positive");
  const std::vector<GridFunction> images = apply_powers(iso, times, v);
  std::vector<DriftRow> rows;
  for (std::size_t k = 0; k < times.size(); ++k) rows.push_back({times[k], norm(iso.tag, images[k]) / times[k]});
  return rows;
}

GridFunction1 fixed_point_from_conjugacy(const SpaceTag& tag, const Diffeo& h, std::size_t n) {
  const Diffeo k = inverse(h);
  if (tag.kind() == Space::C0) {
    return GridFunction1::sample(
        Generator1::pointwise("log D(" + k.describe() + ")", [k](double x) { return std::log(k.deriv(x, 1)); }), n);
  }
  if (tag.kind() == Space::L1) {
    return GridFunction1::sample(Generator1::pointwise("D2/D(" + k.describe() + ")",
                                                       [k](double x) {
                                                         const Jet j = k.jet(x, 2);
                                                         return j.d2 / j.d1;
                                                       }),
                                 n);
  }
  throw ValidationError("fixed_point_from_conjugacy: only c0 and l1 have one-variable fixed points");
}

SampledConjugacy::SampledConjugacy(std::vector<double> values, std::vector<double> slopes)
    : values_(std::move(values)), slopes_(std::move(slopes)) {
  if (values_.size() < 2 || values_.size() != slopes_.size())
    throw ValidationError("sampled conjugacy: need matching node tables");
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j]) || !(slopes_[j] > 0.0) || !std::isfinite(slopes_[j]))
      throw ValidationError("sampled conjugacy: non-finite or non-positive data");
    if (j > 0 && !(values_[j] > values_[j - 1])) throw ValidationError("sampled conjugacy: values must increase");
  }
}

double SampledConjugacy::lift(double x) const {
  const double whole = std::floor(x);
  const auto n = static_cast<double>(cells());
  const double s = (x - whole) * n;
  const auto j = std::min(static_cast<std::size_t>(s), cells() - 1);
  const double t = s - static_cast<double>(j);
  const double h = 1.0 / n;
  const double t2 = t * t, t3 = t2 * t;
  return whole + (2 * t3 - 3 * t2 + 1) * values_[j] + (t3 - 2 * t2 + t) * h * slopes_[j] +
         (-2 * t3 + 3 * t2) * values_[j + 1] + (t3 - t2) * h * slopes_[j + 1];
}

double SampledConjugacy::deriv(double x) const {
  const auto n = static_cast<double>(cells());
  const double s = (x - std::floor(x)) * n;
  const auto j = std::min(static_cast<std::size_t>(s), cells() - 1);
  const double t = s - static_cast<double>(j);
  const double t2 = t * t;
  return (6 * t2 - 6 * t) * n * (values_[j] - values_[j + 1]) + (3 * t2 - 4 * t + 1) * slopes_[j] +
         (3 * t2 - 2 * t) * slopes_[j + 1];
}

double SampledConjugacy::inverse_lift(double y) const {
  const double whole = std::floor(y);
  const double r = y - whole;
  auto it = std::upper_bound(values_.begin(), values_.end(), r);
  std::size_t j = it == values_.begin() ? 0 : static_cast<std::size_t>(it - values_.begin()) - 1;
  j = std::min(j, cells() - 1);
  const double n = static_cast<double>(cells());
  double lo = static_cast<double>(j) / n;
  double hi = static_cast<double>(j + 1) / n;
  double x = lo + (r - values_[j]) / (values_[j + 1] - values_[j]) / n;
  for (int iter = 0; iter < 100; ++iter) {
    const double g = lift(x) - r;
    if (std::abs(g) <= 1e-15) break;
    if (g > 0.0) hi = x;
    else lo = x;
    double next = x - g / deriv(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return whole + x;
}

SampledConjugacy conjugacy_from_fixed_point(const SpaceTag& tag, const GridFunction1& fp) {
  if (tag.kind() != Space::C0 && tag.kind() != Space::L1)
    throw ValidationError("conjugacy_from_fixed_point: only c0 and l1 fixed points define a conjugacy");
  const std::size_t n = fp.size();
  const std::span<const double> s = fp.samples();
  const double h = 1.0 / static_cast<double>(n);

  // Exponent of the density at midpoints and at nodes.
  std::vector<double> mid(n), node(n + 1);
  if (tag.kind() == Space::C0) {
    for (std::size_t k = 0; k < n; ++k) mid[k] = s[k];
    for (std::size_t j = 0; j <= n; ++j) node[j] = 0.5 * (s[(j + n - 1) % n] + s[j % n]);
  } else {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) * h;
    node[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) node[k + 1] = node[k] + (s[k] - mean) * h;
    for (std::size_t k = 0; k < n; ++k) mid[k] = 0.5 * (node[k] + node[k + 1]);
  }
  if (fp.generator() && tag.kind() == Space::C0) {
    std::vector<double> xs(n + 1), gv(n + 1);
    for (std::size_t j = 0; j <= n; ++j) xs[j] = static_cast<double>(j) * h;
    fp.generator()->sample(xs, gv);
    for (std::size_t j = 0; j <= n; ++j) node[j] = gv[j];
  }
  const double shift = *std::max_element(mid.begin(), mid.end());

  std::vector<double> values(n + 1), slopes(n + 1);
  values[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) values[k + 1] = values[k] + std::exp(mid[k] - shift) * h;
  const double total = values[n];
  if (!(total > 0.0) || !std::isfinite(total)) throw ValidationError("conjugacy_from_fixed_point: density not integrable");
  for (std::size_t j = 0; j <= n; ++j) {
    values[j] /= total;
    slopes[j] = std::exp(node[j] - shift) / total;
  }
  values[n] = 1.0;
  return SampledConjugacy(std::move(values), std::move(slopes));
}

double conjugated_derivative(const SampledConjugacy& h, const Diffeo& f, double y) {
  const double x = h.inverse_lift(y);
  const Jet j = f.jet(x, 1);
  return h.deriv(j.value) * j.d1 / h.deriv(x);
}

double conjugated_derivative_fd(const SampledConjugacy& h, const Diffeo& f, double y, double step) {
  auto g = [&](double t) { return h.lift(f.lift(h.inverse_lift(t))); };
  return (g(y + step) - g(y - step)) / (2.0 * step);
}

std::vector<AffineIsometry> commuting_family(const Diffeo& h, std::span<const double> rhos, const SpaceTag& tag) {
  std::vector<AffineIsometry> out;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (rhos[i] == rhos[j]) throw ValidationError("commuting_family: rotation numbers must be distinct");
    out.push_back({tag, conjugate(h, Diffeo::rotation(rhos[i]))});
  }
  return out;
}

void write_csv(std::ostream& out, const RecurrenceReport& r) {
  out << "time,residual\n";
  for (std::size_t k = 0; k < r.times.size(); ++k)
    out << r.times[k] << ',' << nlohmann::json(r.residuals[k]).dump() << '\n';
}

std::string json_summary(const RecurrenceReport& r) {
  nlohmann::json j;
  j["tag"] = r.tag.name();
  j["times"] = r.times;
  j["residuals"] = r.residuals;
  if (!r.residuals.empty()) {
    j["first"] = r.residuals.front();
    j["last"] = r.residuals.back();
  }
  return j.dump();
}

void write_csv(std::ostream& out, std::span<const DriftRow> rows) {
  out << "n,drift\n";
  for (const DriftRow& r : rows) out << r.n << ',' << nlohmann::json(r.value).dump() << '\n';
}

}  // namespace isolab
