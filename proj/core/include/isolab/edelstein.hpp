#pragma once

// Edelstein's isometry of l^2: coordinate k is rotated about 1 by 2 pi / k!,
//
//   E(x)_k = e^{2 pi i / k!} (x_k - 1) + 1.
//
// Vectors are truncated to D coordinates with an implicit zero tail. Angles of
// E^m are kept as the exact fraction m / k! mod 1 until the phase is formed,
// so E^{n!} is the identity on the first n coordinates without rounding.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace isolab {

using SeqVector = std::vector<std::complex<double>>;  // entry k-1 holds x_k

class EdelsteinIsometry {
 public:
  /// The full example: every coordinate 1..dim active.
  static EdelsteinIsometry full(int dim);
  /// Only the listed coordinates (1-based) rotate. Throws ValidationError for
  /// indices outside 1..dim.
  static EdelsteinIsometry on_subset(int dim, const std::vector<int>& coords, bool infinite_pattern = true);

  int dim() const { return static_cast<int>(active_.size()); }
  bool active(int k) const { return active_[static_cast<std::size_t>(k - 1)]; }
  std::vector<int> coordinates() const;
  /// The subset is a truncation of an infinite one.
  bool infinite_pattern() const { return infinite_; }

 private:
  EdelsteinIsometry(std::vector<bool> active, bool infinite) : active_(std::move(active)), infinite_(infinite) {}
  std::vector<bool> active_;
  bool infinite_;
};

/// Fraction of a full turn, in [0, 1), of m * n! / k!, i.e. the angle of
/// coordinate k under E^{m n!}.
double turn_fraction(std::int64_t m, int n, int k);

/// e^{2 pi i t}, exact at quarter turns.
std::complex<double> unit_phase(double t);

/// E^m(v), any integer m.
SeqVector apply_power(const EdelsteinIsometry& e, std::int64_t m, const SeqVector& v);
/// E^{m n!}(v), for times too large for 64-bit integers.
SeqVector apply_factorial_power(const EdelsteinIsometry& e, std::int64_t m, int n, const SeqVector& v);

double l2_norm(const SeqVector& v);
double l2_distance(const SeqVector& u, const SeqVector& v);

/// | ||E u - E v|| - ||u - v|| |.
double isometry_check(const EdelsteinIsometry& e, const SeqVector& u, const SeqVector& v);

/// 4 pi / n!.
double tail_norm_bound(int n);

struct EdelsteinRecurrenceRow {
  int n = 0;
  double factorial = 0.0;  // n!, exact while n <= 18
  double residual = 0.0;   // ||E^{m n!}(v) - v||
};

/// Residuals of E^{m n!} for each n in n_list (m = 1 by default).
std::vector<EdelsteinRecurrenceRow> recurrence_scan(const EdelsteinIsometry& e, const SeqVector& v,
                                                    const std::vector<int>& n_list, std::int64_t m = 1);

/// (||v|| + 1) 4 pi sqrt(sum_{k>=1} ((n+1)...(n+k))^{-2}).
double residual_bound(int n, double v_norm);

struct FixedPointAnalysis {
  /// forced[k-1] is set to 1 when the fixed-point equation pins x_k, and left
  /// empty where it is vacuous (k = 1 or inactive coordinates).
  std::vector<std::optional<std::complex<double>>> forced;
  int forced_count = 0;
  double candidate_norm_lower = 0.0;  // sqrt(forced_count)
};

FixedPointAnalysis fixed_point_analysis(const EdelsteinIsometry& e);

struct EdelsteinFamily {
  std::uint64_t seed = 0;
  std::vector<EdelsteinIsometry> members;
  std::string json() const;
};

/// k members on independent random subsets of 1..dim (each coordinate kept
/// with probability 1/2, at least one coordinate >= 2 per member).
EdelsteinFamily random_family(std::uint64_t seed, int k, int dim);

/// ||E^n(0)|| / n.
double zero_drift(const EdelsteinIsometry& e, std::int64_t n);
/// (sum_k 4 pi / k!) / n over the stored coordinates.
double zero_drift_bound(const EdelsteinIsometry& e, std::int64_t n);

void write_csv(std::ostream& out, const std::vector<EdelsteinRecurrenceRow>& rows);

}  // namespace isolab
