#include "isolab/edelstein.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include <json.hpp>

#include "isolab/error.hpp"

namespace isolab {

namespace {

void check_dim(int dim) {
  if (dim < 1) throw ValidationError("edelstein: dimension must be at least 1");
}

void check_vector(const EdelsteinIsometry& e, const SeqVector& v) {
  if (static_cast<int>(v.size()) != e.dim()) throw ValidationError("edelstein: vector length differs from dimension");
}

SeqVector rotate(const EdelsteinIsometry& e, std::int64_t m, int n, const SeqVector& v) {
  check_vector(e, v);
  SeqVector out = v;
  for (int k = 1; k <= e.dim(); ++k) {
    if (!e.active(k)) continue;
    const double t = turn_fraction(m, n, k);
    if (t == 0.0) continue;
    out[k - 1] = unit_phase(t) * (v[k - 1] - 1.0) + 1.0;
  }
  return out;
}

}  // namespace

EdelsteinIsometry EdelsteinIsometry::full(int dim) {
  check_dim(dim);
  return EdelsteinIsometry(std::vector<bool>(static_cast<std::size_t>(dim), true), true);
}

EdelsteinIsometry EdelsteinIsometry::on_subset(int dim, const std::vector<int>& coords, bool infinite_pattern) {
  check_dim(dim);
  std::vector<bool> a(static_cast<std::size_t>(dim), false);
  for (int k : coords) {
    if (k < 1 || k > dim) throw ValidationError("edelstein: coordinate out of range");
    a[static_cast<std::size_t>(k - 1)] = true;
  }
  return EdelsteinIsometry(std::move(a), infinite_pattern);
}

std::vector<int> EdelsteinIsometry::coordinates() const {
  std::vector<int> out;
  for (int k = 1; k <= dim(); ++k)
    if (active(k)) out.push_back(k);
  return out;
}

double turn_fraction(std::int64_t m, int n, int k) {
  if (n < 0 || k < 1) throw ValidationError("turn_fraction: need n >= 0 and k >= 1");
  if (m == 0 || k <= n) return 0.0;  // m n!/k! is an integer
  // m n!/k! = m / P with P = (n+1)...k
  std::uint64_t p = 1;
  bool exact = true;
  for (int j = n + 1; j <= k; ++j) {
    if (p > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(j)) {
      exact = false;
      break;
    }
    p *= static_cast<std::uint64_t>(j);
  }
  const std::uint64_t mag = m < 0 ? 0 - static_cast<std::uint64_t>(m) : static_cast<std::uint64_t>(m);
  long double frac;
  if (exact) {
    const std::uint64_t r = mag % p;
    if (r == 0) return 0.0;
    frac = static_cast<long double>(r) / static_cast<long double>(p);
  } else {
    // P exceeds 2^64 > |m|, so m/P is already reduced.
    frac = static_cast<long double>(mag);
    for (int j = n + 1; j <= k && frac != 0.0L; ++j) frac /= j;
    if (frac == 0.0L) return 0.0;
  }
  if (m < 0) frac = 1.0L - frac;
  const auto t = static_cast<double>(frac);
  return t >= 1.0 ? 0.0 : t;
}

std::complex<double> unit_phase(double t) {
  if (t == 0.0) return {1.0, 0.0};
  if (t == 0.25) return {0.0, 1.0};
  if (t == 0.5) return {-1.0, 0.0};
  if (t == 0.75) return {0.0, -1.0};
  const double a = 2.0 * std::numbers::pi * t;
  return {std::cos(a), std::sin(a)};
}

SeqVector apply_power(const EdelsteinIsometry& e, std::int64_t m, const SeqVector& v) { return rotate(e, m, 0, v); }

SeqVector apply_factorial_power(const EdelsteinIsometry& e, std::int64_t m, int n, const SeqVector& v) {
  return rotate(e, m, n, v);
}

double l2_norm(const SeqVector& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double l2_distance(const SeqVector& u, const SeqVector& v) {
  if (u.size() != v.size()) throw ValidationError("edelstein: vectors of different length");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += std::norm(u[k] - v[k]);
  return std::sqrt(s);
}

double isometry_check(const EdelsteinIsometry& e, const SeqVector& u, const SeqVector& v) {
  return std::abs(l2_distance(apply_power(e, 1, u), apply_power(e, 1, v)) - l2_distance(u, v));
}

double tail_norm_bound(int n) {
  if (n < 0) throw ValidationError("tail_norm_bound: need n >= 0");
  double f = 1.0;
  for (int j = 2; j <= n; ++j) f *= j;
  return 4.0 * std::numbers::pi / f;
}

std::vector<EdelsteinRecurrenceRow> recurrence_scan(const EdelsteinIsometry& e, const SeqVector& v,
                                                    const std::vector<int>& n_list, std::int64_t m) {
  std::vector<EdelsteinRecurrenceRow> rows;
  for (int n : n_list) {
    if (n < 0) throw ValidationError("edelstein recurrence: need n >= 0");
    double f = 1.0;
    for (int j = 2; j <= n; ++j) f *= j;
    rows.push_back({n, f, l2_distance(apply_factorial_power(e, m, n, v), v)});
  }
  return rows;
}

double residual_bound(int n, double v_norm) {
  double sum = 0.0;
  double prod = 1.0;
  for (int k = 1; k < 200; ++k) {
    prod *= n + k;
    const double term = 1.0 / (prod * prod);
    sum += term;
    if (term < 1e-34 * sum) break;
  }
  return (v_norm + 1.0) * 4.0 * std::numbers::pi * std::sqrt(sum);
}

FixedPointAnalysis fixed_point_analysis(const EdelsteinIsometry& e) {
  FixedPointAnalysis out;
  out.forced.resize(static_cast<std::size_t>(e.dim()));
  for (int k = 1; k <= e.dim(); ++k) {
    if (!e.active(k)) continue;
    // x = a (x - 1) + 1  <=>  (1 - a) x = 1 - a, with a = e^{2 pi i / k!}.
    // a != 1 exactly for every k >= 2 even when the phase rounds to 1 in
    // floating point, so the decision is made on k, not on a.
    if (k < 2) continue;
    out.forced[static_cast<std::size_t>(k - 1)] = std::complex<double>(1.0, 0.0);
    ++out.forced_count;
  }
  out.candidate_norm_lower = std::sqrt(static_cast<double>(out.forced_count));
  return out;
}

std::string EdelsteinFamily::json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["dim"] = members.empty() ? 0 : members.front().dim();
  nlohmann::json subsets = nlohmann::json::array();
  for (const auto& m : members) subsets.push_back(m.coordinates());
  j["subsets"] = subsets;
  return j.dump();
}

EdelsteinFamily random_family(std::uint64_t seed, int k, int dim) {
  if (k < 2) throw ValidationError("random_family: need at least two members");
  if (dim < 2) throw ValidationError("random_family: need dimension at least 2");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  EdelsteinFamily fam;
  fam.seed = seed;
  for (int i = 0; i < k; ++i) {
    std::vector<int> coords;
    while (true) {
      coords.clear();
      for (int c = 1; c <= dim; ++c)
        if (coin(rng)) coords.push_back(c);
      if (!coords.empty() && coords.back() >= 2) break;
    }
    fam.members.push_back(EdelsteinIsometry::on_subset(dim, coords, true));
  }
  return fam;
}

double zero_drift(const EdelsteinIsometry& e, std::int64_t n) {
  if (n < 1) throw ValidationError("zero_drift: need n >= 1");
  const SeqVector zero(static_cast<std::size_t>(e.dim()));
  return l2_norm(apply_power(e, n, zero)) / static_cast<double>(n);
}

double zero_drift_bound(const EdelsteinIsometry& e, std::int64_t n) {
  if (n < 1) throw ValidationError("zero_drift_bound: need n >= 1");
  double s = 0.0;
  for (int k = 1; k <= e.dim(); ++k)
    if (e.active(k)) s += tail_norm_bound(k);
  return s / static_cast<double>(n);
}

void write_csv(std::ostream& out, const std::vector<EdelsteinRecurrenceRow>& rows) {
  out << "n,factorial,residual\n";
  for (const auto& r : rows)
    out << r.n << ',' << nlohmann::json(r.factorial).dump() << ',' << nlohmann::json(r.residual).dump() << '\n';
}

}  // namespace isolab
