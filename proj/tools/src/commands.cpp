#include "isolab_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "isolab/circle.hpp"
#include "isolab/cocycle.hpp"
#include "isolab/crossratio.hpp"
#include "isolab/edelstein.hpp"
#include "isolab/error.hpp"
#include "isolab/euclid.hpp"
#include "isolab/funcspace.hpp"
#include "isolab/isometry.hpp"
#include "isolab_cli/parse.hpp"

namespace isolab::cli {

namespace {

using nlohmann::json;

std::string num(double x) { return json(x).dump(); }

// A result is a CSV table plus a JSON summary; --format picks one.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void row(std::vector<std::string> r) { rows.push_back(std::move(r)); }
  void write(std::ostream& out) const {
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
      out << '\n';
    }
  }
};

struct Output {
  std::string format = "csv";
  std::string path;
};

void emit(const Output& o, const Table& t, const json& summary, std::ostream& out) {
  std::ofstream file;
  std::ostream* dst = &out;
  if (!o.path.empty()) {
    file.open(o.path);
    if (!file) throw ValidationError("cannot open output file " + o.path);
    dst = &file;
  }
  if (o.format == "json") *dst << summary.dump(2) << '\n';
  else t.write(*dst);
}

void add_output(CLI::App* sub, Output& o) {
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.path, "write to this file instead of stdout");
}

SpaceTag parse_space(const std::string& s) {
  if (s == "c0") return SpaceTag::c0();
  if (s == "l1") return SpaceTag::l1();
  if (s == "l2") return SpaceTag::l2pair();
  if (s.rfind("lp:", 0) == 0) {
    try {
      return SpaceTag::lppair(std::stod(s.substr(3)));
    } catch (const std::invalid_argument&) {
    }
  }
  throw ValidationError("unknown space '" + s + "' (c0, l1, l2, lp:<p>)");
}

CocycleKind parse_kind(const std::string& s, double p) {
  if (s == "log") return CocycleKind::log();
  if (s == "affine") return CocycleKind::affine();
  if (s == "projective") return CocycleKind::projective(p);
  throw ValidationError("unknown cocycle kind '" + s + "' (log, affine, projective)");
}

void check_grid(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) throw ValidationError("--n must be a power of two");
}

std::vector<int> resolve_times(const std::string& spec, const Diffeo& f, int cf_depth) {
  if (spec != "cf") return parse_times(spec);
  double rho = rotation_number(f);
  rho -= std::floor(rho);
  if (rho == 0.0) throw ValidationError("--times cf: measured rotation number is an integer");
  std::vector<int> out;
  for (const Convergent& c : continued_fraction(rho, cf_depth).convergents) {
    if (c.q > std::numeric_limits<int>::max()) break;
    if (out.empty() || out.back() != c.q) out.push_back(static_cast<int>(c.q));
  }
  return out;
}

json config_of(const std::string& command, const std::vector<std::string>& args) {
  return json{{"command", command}, {"args", args}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affine isometries built from circle diffeomorphism cocycles", "isolab"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  std::function<void()> action;
  Output o;

  // rotnum
  std::string diffeo_spec;
  std::int64_t iters = 100000;
  {
    auto* s = app.add_subcommand("rotnum", "rotation number by Birkhoff averaging");
    s->add_option("--diffeo", diffeo_spec, "diffeomorphism spec")->required();
    s->add_option("--iters", iters, "iterations");
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const Diffeo f = parse_diffeo_spec(diffeo_spec);
        const double rho = rotation_number(f, iters);
        Table t{{"diffeo", "iters", "rho", "error_bound"}, {}};
        t.row({"\"" + f.describe() + "\"", std::to_string(iters), num(rho), num(1.0 / static_cast<double>(iters))});
        emit(o, t, {{"config", config_of("rotnum", args)}, {"rho", rho}, {"error_bound", 1.0 / iters}}, out);
      };
    });
  }

  // cf
  double rho_arg = std::numeric_limits<double>::quiet_NaN();
  int depth = 10;
  {
    auto* s = app.add_subcommand("cf", "continued fraction expansion");
    auto* r = s->add_option("--rho", rho_arg, "number in (0,1)");
    auto* d = s->add_option("--diffeo", diffeo_spec, "use the measured rotation number instead");
    r->excludes(d);
    s->add_option("--depth", depth, "number of partial quotients");
    add_output(s, o);
    s->callback([&, r, d] {
      action = [&, r, d] {
        if (r->count() == 0 && d->count() == 0) throw ValidationError("cf needs --rho or --diffeo");
        double rho = rho_arg;
        if (d->count() > 0) {
          rho = rotation_number(parse_diffeo_spec(diffeo_spec));
          rho -= std::floor(rho);
        }
        const ContinuedFraction cf = continued_fraction(rho, depth);
        Table t{{"index", "a", "p", "q"}, {}};
        json conv = json::array();
        for (std::size_t k = 0; k < cf.partial_quotients.size(); ++k) {
          t.row({std::to_string(k + 1), std::to_string(cf.partial_quotients[k]), std::to_string(cf.convergents[k].p),
                 std::to_string(cf.convergents[k].q)});
          conv.push_back({cf.convergents[k].p, cf.convergents[k].q});
        }
        emit(o, t,
             {{"config", config_of("cf", args)},
              {"rho", rho},
              {"partial_quotients", cf.partial_quotients},
              {"convergents", conv},
              {"terminated", cf.terminated}},
             out);
      };
    });
  }

  // cocycle-check
  std::string g1_spec, g2_spec, kind_name = "log";
  double p_arg = 2.0;
  int samples = 1000;
  {
    auto* s = app.add_subcommand("cocycle-check", "chain-rule residual of a cocycle");
    s->add_option("--g1", g1_spec)->required();
    s->add_option("--g2", g2_spec)->required();
    s->add_option("--kind", kind_name, "log, affine or projective");
    s->add_option("--p", p_arg, "exponent of the projective cocycle");
    s->add_option("--samples", samples);
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const CocycleKind kind = parse_kind(kind_name, p_arg);
        const ChainRuleResidual r =
            verify_chain_rule(kind, parse_diffeo_spec(g1_spec), parse_diffeo_spec(g2_spec), samples);
        Table t{{"kind", "samples", "max_residual", "max_term"}, {}};
        t.row({kind.name(), std::to_string(samples), num(r.max_residual), num(r.max_term)});
        emit(o, t,
             {{"config", config_of("cocycle-check", args)},
              {"kind", kind.name()},
              {"max_residual", r.max_residual},
              {"max_term", r.max_term},
              {"integrability_guaranteed", kind.integrability_guaranteed()}},
             out);
      };
    });
  }

  // recur / drift share diffeo, space, vector, grid
  std::string space_name = "c0", vector_name, times_spec = "fib:10";
  std::size_t grid_n = 0;
  int cf_depth = 10;
  int nmax = 500;
  auto grid_for = [&](const SpaceTag& tag) {
    const std::size_t n = grid_n ? grid_n : (tag.arity() == 1 ? kDefaultN1 : kDefaultN2);
    check_grid(n);
    return n;
  };
  auto default_vector = [&](const SpaceTag& tag, const char* one, const char* two) {
    return vector_name.empty() ? std::string(tag.arity() == 1 ? one : two) : vector_name;
  };
  {
    auto* s = app.add_subcommand("recur", "recurrence residuals ||I^t(v) - v||");
    s->add_option("--diffeo", diffeo_spec)->required();
    s->add_option("--space", space_name, "c0, l1, l2 or lp:<p>");
    s->add_option("--times", times_spec, "fib:k, cf, a..b[:step] or a comma list");
    s->add_option("--cf-depth", cf_depth, "depth used by --times cf");
    s->add_option("--vector", vector_name, "sin, cos, one, zero (pairs: cosdiff, sinsin, one, zero)");
    s->add_option("--n", grid_n, "grid size (per axis for pairs)");
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const Diffeo f = parse_diffeo_spec(diffeo_spec);
        const SpaceTag tag = parse_space(space_name);
        const std::size_t n = grid_for(tag);
        const std::vector<int> times = resolve_times(times_spec, f, cf_depth);
        const GridFunction v = standard_vector(tag, default_vector(tag, "sin", "cosdiff"), n);
        const RecurrenceReport r = recurrence_scan({tag, f}, v, times);
        Table t{{"time", "residual"}, {}};
        for (std::size_t k = 0; k < r.times.size(); ++k) t.row({std::to_string(r.times[k]), num(r.residuals[k])});
        json summary = json::parse(json_summary(r));
        summary["config"] = config_of("recur", args);
        summary["vector"] = json::parse(json_header(tag, v));
        emit(o, t, summary, out);
      };
    });
  }
  {
    auto* s = app.add_subcommand("drift", "drift sequence ||I^n(v)||/n");
    s->add_option("--diffeo", diffeo_spec)->required();
    s->add_option("--space", space_name);
    s->add_option("--nmax", nmax);
    s->add_option("--vector", vector_name, "default zero");
    s->add_option("--n", grid_n);
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const Diffeo f = parse_diffeo_spec(diffeo_spec);
        const SpaceTag tag = parse_space(space_name);
        const GridFunction v = standard_vector(tag, default_vector(tag, "zero", "zero"), grid_for(tag));
        const std::vector<DriftRow> rows = drift_estimate({tag, f}, v, nmax);
        Table t{{"n", "drift"}, {}};
        for (const auto& r : rows) t.row({std::to_string(r.n), num(r.value)});
        emit(o, t,
             {{"config", config_of("drift", args)},
              {"first", rows.front().value},
              {"last", rows.back().value},
              {"ratio_last_first", rows.front().value > 0 ? rows.back().value / rows.front().value : 0.0}},
             out);
      };
    });
  }

  // fixedpoint / conjugacy
  std::string h_spec;
  double rho_fp = (std::sqrt(5.0) - 1.0) / 2.0;
  int points = 1000;
  {
    auto* s = app.add_subcommand("fixedpoint", "fixed point of I for f = h R h^-1");
    s->add_option("--h", h_spec)->required();
    s->add_option("--rho", rho_fp);
    s->add_option("--space", space_name, "c0 or l1");
    s->add_option("--n", grid_n);
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const Diffeo h = parse_diffeo_spec(h_spec);
        const SpaceTag tag = parse_space(space_name);
        const Diffeo f = conjugate(h, Diffeo::rotation(rho_fp));
        const GridFunction1 fp = fixed_point_from_conjugacy(tag, h, grid_for(tag));
        const double residual = norm(tag, apply_once({tag, f}, fp) - GridFunction(fp));
        Table t{{"index", "sample"}, {}};
        for (std::size_t k = 0; k < fp.size(); ++k) t.row({std::to_string(k), num(fp.samples()[k])});
        emit(o, t,
             {{"config", config_of("fixedpoint", args)},
              {"header", json::parse(json_header(tag, fp))},
              {"residual", residual},
              {"norm", norm(tag, fp)}},
             out);
      };
    });
  }
  {
    auto* s = app.add_subcommand("conjugacy", "rebuild the conjugacy from the fixed point and test D(HfH^-1) = 1");
    s->add_option("--h", h_spec)->required();
    s->add_option("--rho", rho_fp);
    s->add_option("--space", space_name, "c0 or l1");
    s->add_option("--n", grid_n);
    s->add_option("--points", points);
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const Diffeo h = parse_diffeo_spec(h_spec);
        const SpaceTag tag = parse_space(space_name);
        const Diffeo f = conjugate(h, Diffeo::rotation(rho_fp));
        const SampledConjugacy hs = conjugacy_from_fixed_point(tag, fixed_point_from_conjugacy(tag, h, grid_for(tag)));
        if (points < 1) throw ValidationError("--points must be positive");
        Table t{{"y", "dconj"}, {}};
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int k = 0; k < points; ++k) {
          const double y = (k + 0.5) / points;
          const double d = conjugated_derivative(hs, f, y);
          lo = std::min(lo, d);
          hi = std::max(hi, d);
          t.row({num(y), num(d)});
        }
        emit(o, t, {{"config", config_of("conjugacy", args)}, {"min", lo}, {"max", hi}}, out);
      };
    });
  }

  // euclid
  int dim = 3, fix_dim = 1;
  unsigned long long seed = 1;
  double v_scale = 1.0;
  std::string preset;
  {
    auto* s = app.add_subcommand("euclid", "drift decomposition and telescopic bound in R^n");
    s->add_option("--preset", preset, "rot90, translation or block")->check(CLI::IsMember({"rot90", "translation", "block"}));
    s->add_option("--dim", dim);
    s->add_option("--fix-dim", fix_dim);
    s->add_option("--seed", seed);
    s->add_option("--v-scale", v_scale, "norm scale of the start vector");
    s->add_option("--nmax", nmax);
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        Eigen::MatrixXd theta;
        Eigen::VectorXd c, v;
        if (preset == "rot90") {
          theta = Eigen::MatrixXd{{0, -1}, {1, 0}};
          c = Eigen::VectorXd{{1, 0}};
          v = Eigen::VectorXd{{5, 0}};
        } else if (preset == "translation") {
          theta = Eigen::MatrixXd::Identity(2, 2);
          c = Eigen::VectorXd{{1, 0}};
          v = Eigen::VectorXd::Zero(2);
        } else if (preset == "block") {
          theta = Eigen::MatrixXd{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}};
          c = Eigen::VectorXd{{1, 0, 3}};
          v = Eigen::VectorXd::Zero(3);
        } else {
          if (dim < 1 || fix_dim < 0 || fix_dim > dim) throw ValidationError("need 0 <= fix-dim <= dim");
          theta = random_orthogonal(dim, fix_dim, seed);
          std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
          std::normal_distribution<double> g;
          c.resize(dim);
          v.resize(dim);
          for (int k = 0; k < dim; ++k) c(k) = g(rng);
          for (int k = 0; k < dim; ++k) v(k) = v_scale * g(rng);
        }
        const EuclideanIsometry iso(theta, c);
        const FixedPointOrAxis fa = fixed_point_or_axis(iso);
        const auto rows = convergence_check(iso, v, nmax);
        Table t{{"n", "deviation", "bound"}, {}};
        bool holds = true;
        for (const auto& r : rows) {
          t.row({std::to_string(r.n), num(r.deviation), num(r.bound)});
          holds = holds && r.deviation <= r.bound + 1e-9;
        }
        json summary{{"config", config_of("euclid", args)},
                     {"dim", iso.dim()},
                     {"drift", fa.c_star.norm()},
                     {"w_norm", fa.w.norm()},
                     {"bound_holds", holds}};
        if (fa.fixed_point) {
          summary["fixed_point"] = std::vector<double>(fa.fixed_point->data(), fa.fixed_point->data() + fa.fixed_point->size());
          summary["fixed_point_residual"] = (iso(*fa.fixed_point) - *fa.fixed_point).norm();
        }
        emit(o, t, summary, out);
      };
    });
  }

  // edelstein
  std::string scan_spec = "2..10";
  int edim = 50;
  double vnorm = 0.0;
  {
    auto* s = app.add_subcommand("edelstein", "recurrence of Edelstein's l^2 isometry along n!");
    s->add_option("--dim", edim);
    s->add_option("--scan", scan_spec, "values of n");
    s->add_option("--vnorm", vnorm, "norm of a random start vector (0 gives v = 0)");
    s->add_option("--seed", seed);
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const EdelsteinIsometry e = EdelsteinIsometry::full(edim);
        SeqVector v(static_cast<std::size_t>(edim));
        if (vnorm > 0.0) {
          std::mt19937_64 rng(seed);
          std::normal_distribution<double> g;
          for (auto& z : v) z = {g(rng), g(rng)};
          const double s0 = l2_norm(v);
          for (auto& z : v) z *= vnorm / s0;
        }
        const auto rows = recurrence_scan(e, v, parse_times(scan_spec));
        Table t{{"n", "factorial", "residual", "bound"}, {}};
        for (const auto& r : rows) t.row({std::to_string(r.n), num(r.factorial), num(r.residual), num(residual_bound(r.n, l2_norm(v)))});
        const FixedPointAnalysis fpa = fixed_point_analysis(e);
        emit(o, t,
             {{"config", config_of("edelstein", args)},
              {"forced_coordinates", fpa.forced_count},
              {"candidate_norm_lower", fpa.candidate_norm_lower}},
             out);
      };
    });
  }

  // crossratio-scan
  double qa = 0.0, qb = 0.25, qc = 0.5;
  {
    auto* s = app.add_subcommand("crossratio-scan", "cross-ratios of iterated normalized quadruples");
    s->add_option("--diffeo", diffeo_spec)->required();
    s->add_option("--a", qa);
    s->add_option("--b", qb);
    s->add_option("--c", qc);
    s->add_option("--times", times_spec, "iterates (non-negative)");
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const Diffeo f = parse_diffeo_spec(diffeo_spec);
        const Quadruple q(qa, qb, qc, normalize_d(qa, qb, qc));
        const std::vector<int> ts = parse_times(times_spec);
        const BlowupScan scan = blowup_scan(f, q, std::vector<std::int64_t>(ts.begin(), ts.end()));
        Table t{{"n", "crossratio"}, {}};
        for (const auto& r : scan.rows) t.row({std::to_string(r.n), num(r.crossratio)});
        emit(o, t,
             {{"config", config_of("crossratio-scan", args)},
              {"d", q.d()},
              {"max", scan.max_crossratio()},
              {"resolution_limited", scan.resolution_limited}},
             out);
      };
    });
  }

  // blowup-demo
  int bp = 1, bq = 3;
  double beps = 0.1;
  {
    auto* s = app.add_subcommand("blowup-demo", "cross-ratio blowup for R_{p/q} o S_{eps,q}");
    s->add_option("--p", bp);
    s->add_option("--q", bq);
    s->add_option("--eps", beps);
    s->add_option("--nmax", nmax, "largest iterate of f; multiples of q up to it are scanned");
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const BlowupExample ex = rational_blowup_example(bp, bq, beps);
        if (nmax < ex.period) throw ValidationError("--nmax must be at least q");
        std::vector<std::int64_t> ns;
        for (int n = ex.period; n <= nmax; n += ex.period) ns.push_back(n);
        const BlowupScan scan = blowup_scan(ex.f, ex.quadruple, ns);
        Table t{{"n", "crossratio", "implied_chi_lower"}, {}};
        double running = 0.0;
        for (const auto& r : scan.rows) {
          running = std::max(running, r.crossratio);
          t.row({std::to_string(r.n), num(r.crossratio), num(implied_fixed_point_norm(running))});
        }
        const double m = scan.max_crossratio();
        const IncompatibilityBounds b1 = incompatibility_bounds(1.0);
        emit(o, t,
             {{"config", config_of("blowup-demo", args)},
              {"diffeo", ex.f.describe()},
              {"quadruple", {ex.quadruple.a(), ex.quadruple.b(), ex.quadruple.c(), ex.quadruple.d()}},
              {"max_crossratio", m},
              {"implied_chi_lower", implied_fixed_point_norm(m)},
              {"upper_bound_chi_1", b1.upper},
              {"exceeds_chi_1", m > b1.upper},
              {"resolution_limited", scan.resolution_limited}},
             out);
      };
    });
  }

  // commute
  std::vector<double> rhos;
  {
    auto* s = app.add_subcommand("commute", "commutation and action-law residuals of a conjugated family");
    s->add_option("--h", h_spec)->required();
    s->add_option("--rho", rhos, "rotation numbers")->required()->delimiter(',');
    s->add_option("--space", space_name);
    s->add_option("--vector", vector_name);
    s->add_option("--n", grid_n);
    add_output(s, o);
    s->callback([&] {
      action = [&] {
        const SpaceTag tag = parse_space(space_name);
        const auto fam = commuting_family(parse_diffeo_spec(h_spec), rhos, tag);
        const GridFunction v = standard_vector(tag, default_vector(tag, "sin", "cosdiff"), grid_for(tag));
        Table t{{"i", "j", "commutator", "action_law"}, {}};
        double worst_c = 0.0, worst_a = 0.0;
        for (std::size_t i = 0; i < fam.size(); ++i)
          for (std::size_t j = i + 1; j < fam.size(); ++j) {
            const GridFunction ij = apply_once(fam[i], apply_once(fam[j], v));
            const GridFunction ji = apply_once(fam[j], apply_once(fam[i], v));
            const AffineIsometry composed{tag, compose(fam[i].f, fam[j].f)};
            const double c = norm(tag, ij - ji);
            const double a = norm(tag, apply_once(composed, v) - ij);
            worst_c = std::max(worst_c, c);
            worst_a = std::max(worst_a, a);
            t.row({std::to_string(i), std::to_string(j), num(c), num(a)});
          }
        emit(o, t, {{"config", config_of("commute", args)}, {"max_commutator", worst_c}, {"max_action_law", worst_a}},
             out);
      };
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace isolab::cli
