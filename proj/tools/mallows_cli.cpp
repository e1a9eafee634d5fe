// Command-line surface for the Mallows pattern-avoidance library: exact
// probabilities, recurrence series, certified limit bounds, sampling,
// Monte Carlo estimation, the bounds table, plot data, and a self-check.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mallows/bounds.hpp"
#include "mallows/distribution.hpp"
#include "mallows/errors.hpp"
#include "mallows/exact.hpp"
#include "mallows/montecarlo.hpp"
#include "mallows/permutation.hpp"
#include "mallows/qpolynomial.hpp"
#include "mallows/rng.hpp"
#include "verify.hpp"

using nlohmann::json;
using namespace mallows;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitResourceLimit = 3;

int env_depth_cap() {
  if (const char* env = std::getenv("MALLOWS_DEPTH_CAP")) {
    const int v = std::atoi(env);
    if (v >= 8) return v;
  }
  return kDefaultDepthCap;
}

std::vector<double> parse_grid(const std::string& text) {
  // "start:stop:step" inclusive of stop up to rounding
  double start = 0, stop = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !is.eof())
    throw CLI::ValidationError("--q-grid", "expected start:stop:step");
  if (step <= 0) throw CLI::ValidationError("--q-grid", "step must be positive");
  if (stop < start) throw CLI::ValidationError("--q-grid", "stop must be >= start");
  std::vector<double> grid;
  for (double q = start; q <= stop + 1e-12; q += step) grid.push_back(q);
  if (grid.empty()) throw CLI::ValidationError("--q-grid", "grid is empty");
  return grid;
}

void require_q_open_unit(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw CLI::ValidationError("--q", "this command needs q in (0,1)");
}

Pattern parse_pattern_arg(const std::string& text) {
  auto p = Pattern::parse(text);
  if (!p) throw CLI::ValidationError("--pattern", "not a pattern: " + text);
  return *p;
}

// Effective (q, pattern) after the q > 1 duality for avoidance queries:
// P_n^q(S_n(tau)) = P_n^{1/q}(S_n(tau reversed)).
struct EffectiveQuery {
  double q;
  Pattern pattern;
  bool duality_applied;
};

EffectiveQuery reduce_query(double q_raw, const Pattern& t) {
  const MallowsParam par = MallowsParam::reduce(q_raw);
  if (par.reversed) return {par.q, t.reversed(), true};
  return {par.q, t, false};
}

std::string fmt(double v, int prec = 12) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// exact
// ---------------------------------------------------------------------------

struct ExactOpts {
  int n = 5;
  std::string pattern = "312";
  double q = 0.5;
  bool rational = false;
  bool polynomial = false;
  bool as_json = false;
  int threads = 0;
};

int cmd_exact(const ExactOpts& o) {
  const EffectiveQuery eff = reduce_query(o.q, parse_pattern_arg(o.pattern));
  const QPolynomial num = brute_force_numerator(o.n, eff.pattern, o.threads);
  const QPolynomial den = normalizer_polynomial(o.n);

  json out;
  out["schema"] = "mallows.exact.v1";
  out["n"] = o.n;
  out["pattern"] = o.pattern;
  out["q"] = o.q;
  out["duality_applied"] = eff.duality_applied;
  if (eff.duality_applied) {
    out["effective_q"] = eff.q;
    out["effective_pattern"] = eff.pattern.name();
  }
  const mpq_class qr = mpq_from_double_decimal(eff.q);
  mpq_class prob_exact = num.evaluate(qr) / den.evaluate(qr);
  prob_exact.canonicalize();
  out["probability"] = prob_exact.get_d();
  if (o.rational) out["probability_rational"] = prob_exact.get_str();
  if (o.polynomial) out["numerator_coefficients"] = num.to_decimal_strings();

  if (o.as_json) {
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "P_" << o.n << "^q(avoid " << o.pattern << ") at q=" << fmt(o.q) << " = "
            << fmt(prob_exact.get_d());
  if (o.rational) std::cout << " = " << prob_exact.get_str();
  std::cout << '\n';
  if (eff.duality_applied)
    std::cout << "# duality: evaluated at q=" << fmt(eff.q) << " with pattern "
              << eff.pattern.name() << '\n';
  if (o.polynomial) {
    std::cout << "numerator:";
    for (const auto& c : num.to_decimal_strings()) std::cout << ' ' << c;
    std::cout << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// recur
// ---------------------------------------------------------------------------

struct RecurOpts {
  int n = 50;
  std::string pattern = "312";
  double q = 0.5;
};

int cmd_recur(const RecurOpts& o) {
  const EffectiveQuery eff = reduce_query(o.q, parse_pattern_arg(o.pattern));
  if (!eff.pattern.is_tag() ||
      (eff.pattern.tag() == PatternTag::P123 || eff.pattern.tag() == PatternTag::P321))
    throw CLI::ValidationError(
        "--pattern", "no recurrence for this pattern (supported: 312, 231, 213, 132)");
  require_q_open_unit(eff.q);
  const AvoidanceSeries s = avoidance_series(o.n, eff.q, eff.pattern.tag());
  std::cout << "# schema: mallows.recur.v1\n";
  if (eff.duality_applied)
    std::cout << "# duality: q=" << fmt(o.q) << " pattern=" << o.pattern
              << " evaluated at q=" << fmt(eff.q) << " pattern=" << eff.pattern.name() << '\n';
  std::cout << "n,d_n,log_d_n,d_n_nth_root\n";
  for (int n = 1; n <= o.n; ++n)
    std::cout << n << ',' << fmt(s.value(n)) << ',' << fmt(s.log_value(n)) << ','
              << fmt(s.nth_root(n)) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds / limit
// ---------------------------------------------------------------------------

struct BoundsOpts {
  std::optional<double> q;
  std::string grid;
  double eps = 0.01;
  int depth_cap = 0;
  bool as_json = false;
};

int cmd_bounds(const BoundsOpts& o) {
  const int cap = o.depth_cap > 0 ? o.depth_cap : env_depth_cap();
  std::vector<double> qs;
  if (o.q) qs.push_back(*o.q);
  if (!o.grid.empty()) {
    const auto g = parse_grid(o.grid);
    qs.insert(qs.end(), g.begin(), g.end());
  }
  if (qs.empty()) qs = parse_grid("0.1:0.9:0.1");
  for (double q : qs) require_q_open_unit(q);

  json rows = json::array();
  for (double q : qs) {
    const BoundReport r = bound_report(q, o.eps, cap);
    json row;
    row["q"] = r.q;
    row["lb"] = r.lb_closed;
    row["ub"] = r.ub_closed;
    row["hugo"] = r.hugo;
    row["bisect_lo"] = r.interval.lo;
    row["bisect_hi"] = r.interval.hi;
    row["depth_used"] = r.interval.depth_used;
    row["flagged"] = r.interval.flagged;
    rows.push_back(row);
  }
  if (o.as_json) {
    json out;
    out["schema"] = "mallows.bounds.v1";
    out["eps"] = o.eps;
    out["depth_cap"] = cap;
    out["rows"] = rows;
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "# schema: mallows.bounds.v1\n";
  std::cout << "q,LB,UB,hugo,bisect_lo,bisect_hi,depth_used,flagged\n";
  for (const auto& row : rows)
    std::cout << fmt(row["q"].get<double>(), 6) << ',' << fmt(row["lb"].get<double>()) << ','
              << fmt(row["ub"].get<double>()) << ',' << fmt(row["hugo"].get<double>()) << ','
              << fmt(row["bisect_lo"].get<double>()) << ',' << fmt(row["bisect_hi"].get<double>())
              << ',' << row["depth_used"].get<int>() << ',' << (row["flagged"].get<bool>() ? 1 : 0)
              << '\n';
  return kExitOk;
}

struct LimitOpts {
  double q = 0.5;
  double eps = 0.01;
  int depth_cap = 0;
  bool as_json = false;
};

int cmd_limit(const LimitOpts& o) {
  require_q_open_unit(o.q);
  const int cap = o.depth_cap > 0 ? o.depth_cap : env_depth_cap();
  const LimitInterval iv = certified_limit_312(o.q, o.eps, cap);
  if (o.as_json) {
    json out;
    out["schema"] = "mallows.limit.v1";
    out["q"] = o.q;
    out["eps"] = o.eps;
    out["lo"] = iv.lo;
    out["hi"] = iv.hi;
    out["depth_used"] = iv.depth_used;
    out["flagged"] = iv.flagged;
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "limit for 312/231 at q=" << fmt(o.q) << ": [" << fmt(iv.lo) << ", " << fmt(iv.hi)
            << "] width=" << fmt(iv.width(), 3) << " depth_used=" << iv.depth_used
            << (iv.flagged ? " FLAGGED (depth cap reached)" : "") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sample / estimate
// ---------------------------------------------------------------------------

struct SampleOpts {
  int n = 10;
  double q = 0.5;
  std::uint64_t count = 10;
  std::uint64_t seed = 0;
  bool as_json = false;
};

int cmd_sample(const SampleOpts& o) {
  SplitRng rng(o.seed);
  MallowsSampler sampler(o.n, o.q);
  std::vector<int> word;
  if (o.as_json) {
    json out;
    out["schema"] = "mallows.sample.v1";
    out["seed"] = o.seed;
    out["q"] = o.q;
    out["n"] = o.n;
    out["rng_id"] = SplitRng::kAlgorithmId;
    json samples = json::array();
    for (std::uint64_t i = 0; i < o.count; ++i) {
      sampler.sample_into(rng, word);
      samples.push_back(format_permutation(Permutation(word)));
    }
    out["samples"] = samples;
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }
  for (std::uint64_t i = 0; i < o.count; ++i) {
    sampler.sample_into(rng, word);
    std::cout << format_permutation(Permutation(word)) << '\n';
  }
  return kExitOk;
}

struct EstimateOpts {
  int n = 20;
  double q = 0.5;
  std::string pattern = "321";
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  int shards = kDefaultShards;
  int threads = 0;
  bool as_json = false;
};

int cmd_estimate(const EstimateOpts& o) {
  const Pattern t = parse_pattern_arg(o.pattern);
  const Estimate e = estimate_avoidance(o.n, o.q, t, o.samples, o.seed, o.shards, o.threads);
  if (o.as_json) {
    json out;
    out["schema"] = "mallows.estimate.v1";
    out["n"] = o.n;
    out["q"] = o.q;
    out["pattern"] = o.pattern;
    out["samples"] = e.samples;
    out["seed"] = e.seed;
    out["mean"] = e.mean;
    out["stderr"] = e.std_error;
    out["ci95"] = json::array({e.ci95.first, e.ci95.second});
    out["flagged_rare"] = e.flagged_rare;
    out["hits"] = e.hits;
    out["shards"] = e.shards;
    out["rng_id"] = SplitRng::kAlgorithmId;
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "avoid " << o.pattern << " on S_" << o.n << " at q=" << fmt(o.q) << ": mean="
            << fmt(e.mean) << " stderr=" << fmt(e.std_error) << " ci95=[" << fmt(e.ci95.first)
            << ", " << fmt(e.ci95.second) << "] hits=" << e.hits << "/" << e.samples
            << (e.flagged_rare ? " UNRELIABLE (fewer than 10 hits)" : "") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// table / plotdata
// ---------------------------------------------------------------------------

struct TableOpts {
  double eps = 0.01;
  int depth_cap = 0;
};

int cmd_table(const TableOpts& o) {
  const int cap = o.depth_cap > 0 ? o.depth_cap : env_depth_cap();
  const auto qs = parse_grid("0.1:0.9:0.1");
  std::vector<BoundReport> reports;
  for (double q : qs) reports.push_back(bound_report(q, o.eps, cap));

  auto cell = [](double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
  };
  std::cout << std::left << std::setw(20) << "q";
  for (const auto& r : reports) std::cout << std::setw(14) << cell(r.q);
  std::cout << '\n' << std::setw(20) << "UB(q)";
  for (const auto& r : reports) std::cout << std::setw(14) << cell(r.ub_closed);
  std::cout << '\n' << std::setw(20) << "LB(q)";
  for (const auto& r : reports) std::cout << std::setw(14) << cell(r.lb_closed);
  std::cout << '\n' << std::setw(20) << "true value (+-eps)";
  for (const auto& r : reports) {
    std::ostringstream os;
    os << cell(r.interval.mid()) << "+-" << cell(0.5 * r.interval.width())
       << (r.interval.flagged ? "*" : "");
    std::cout << std::setw(14) << os.str();
  }
  std::cout << '\n';
  return kExitOk;
}

struct PlotOpts {
  double step = 0.01;
  double eps = 0.01;
  int depth_cap = 0;
};

int cmd_plotdata(const PlotOpts& o) {
  const int cap = o.depth_cap > 0 ? o.depth_cap : env_depth_cap();
  if (!(o.step > 0 && o.step < 1)) throw CLI::ValidationError("--step", "step in (0,1)");
  std::cout << "# schema: mallows.plotdata.v1\n";
  std::cout << "curve,q,value\n";
  std::vector<std::pair<double, BoundReport>> rows;
  for (double q = o.step; q < 1.0 - 1e-12; q += o.step)
    rows.emplace_back(q, bound_report(q, o.eps, cap));
  for (const auto& [q, r] : rows) std::cout << "LB," << fmt(q, 6) << ',' << fmt(r.lb_closed) << '\n';
  for (const auto& [q, r] : rows) std::cout << "UB," << fmt(q, 6) << ',' << fmt(r.ub_closed) << '\n';
  for (const auto& [q, r] : rows)
    std::cout << "bisect_mid," << fmt(q, 6) << ',' << fmt(r.interval.mid()) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mallows: pattern avoidance probabilities for length-3 patterns under "
      "Mallows(q) distributions"};
  app.footer(
      "Environment:\n"
      "  MALLOWS_THREADS    worker threads for enumeration and sampling (default: hardware)\n"
      "  MALLOWS_DEPTH_CAP  default certificate depth cap (default: 65536)\n"
      "Exit codes: 0 ok, 1 usage error, 2 verification failure, 3 resource limit.");
  app.require_subcommand(1);

  ExactOpts exact_opts;
  auto* exact = app.add_subcommand("exact", "brute-force avoidance probability / polynomial");
  exact->add_option("--n", exact_opts.n, "permutation length (<= 12)")->required();
  exact->add_option("--pattern", exact_opts.pattern, "pattern, e.g. 312")->required();
  exact->add_option("--q", exact_opts.q, "Mallows parameter (q > 1 uses the duality)");
  exact->add_flag("--rational", exact_opts.rational, "also print the exact fraction");
  exact->add_flag("--polynomial", exact_opts.polynomial, "also print numerator coefficients");
  exact->add_flag("--json", exact_opts.as_json, "JSON output");
  exact->add_option("--threads", exact_opts.threads, "enumeration threads (0 = auto)");

  RecurOpts recur_opts;
  auto* recur = app.add_subcommand("recur", "avoidance series d_n by the exact recurrence");
  recur->add_option("--n", recur_opts.n, "series length")->required();
  recur->add_option("--pattern", recur_opts.pattern, "one of 312, 231, 213, 132");
  recur->add_option("--q", recur_opts.q, "Mallows parameter");

  BoundsOpts bounds_opts;
  auto* bounds = app.add_subcommand("bounds", "closed-form and certified bounds per q");
  bounds->add_option("--q", bounds_opts.q, "single q in (0,1)");
  bounds->add_option("--q-grid", bounds_opts.grid, "grid start:stop:step");
  bounds->add_option("--eps", bounds_opts.eps, "bisection target width");
  bounds->add_option("--depth-cap", bounds_opts.depth_cap, "certificate depth cap");
  bounds->add_flag("--json", bounds_opts.as_json, "JSON output");

  LimitOpts limit_opts;
  auto* limit = app.add_subcommand("limit", "certified interval for the 312/231 limit");
  limit->add_option("--q", limit_opts.q, "q in (0,1)")->required();
  limit->add_option("--eps", limit_opts.eps, "target interval width");
  limit->add_option("--depth-cap", limit_opts.depth_cap, "certificate depth cap");
  limit->add_flag("--json", limit_opts.as_json, "JSON output");

  SampleOpts sample_opts;
  auto* sample = app.add_subcommand("sample", "draw Mallows(q) permutations");
  sample->add_option("--n", sample_opts.n, "permutation length")->required();
  sample->add_option("--q", sample_opts.q, "Mallows parameter (any q > 0)");
  sample->add_option("--count", sample_opts.count, "number of samples");
  sample->add_option("--seed", sample_opts.seed, "64-bit seed");
  sample->add_flag("--json", sample_opts.as_json, "JSON output");

  EstimateOpts estimate_opts;
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo avoidance estimate");
  estimate->add_option("--n", estimate_opts.n, "permutation length")->required();
  estimate->add_option("--pattern", estimate_opts.pattern, "pattern (all six, incl. 321)")
      ->required();
  estimate->add_option("--q", estimate_opts.q, "Mallows parameter (any q > 0)");
  estimate->add_option("--samples", estimate_opts.samples, "sample count");
  estimate->add_option("--seed", estimate_opts.seed, "64-bit seed");
  estimate->add_option("--shards", estimate_opts.shards, "RNG shards (reproducibility key)");
  estimate->add_option("--threads", estimate_opts.threads, "worker threads (0 = auto)");
  estimate->add_flag("--json", estimate_opts.as_json, "JSON output");

  TableOpts table_opts;
  auto* table = app.add_subcommand("table", "bounds table on the q = 0.1..0.9 grid");
  table->add_option("--eps", table_opts.eps, "true-value interval width");
  table->add_option("--depth-cap", table_opts.depth_cap, "certificate depth cap");

  PlotOpts plot_opts;
  auto* plotdata = app.add_subcommand("plotdata", "LB/UB/bisect-mid curves as CSV");
  plotdata->add_option("--step", plot_opts.step, "q grid step");
  plotdata->add_option("--eps", plot_opts.eps, "bisection width");
  plotdata->add_option("--depth-cap", plot_opts.depth_cap, "certificate depth cap");

  auto* verify = app.add_subcommand("verify", "run the library invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (exact->parsed()) return cmd_exact(exact_opts);
    if (recur->parsed()) return cmd_recur(recur_opts);
    if (bounds->parsed()) return cmd_bounds(bounds_opts);
    if (limit->parsed()) return cmd_limit(limit_opts);
    if (sample->parsed()) return cmd_sample(sample_opts);
    if (estimate->parsed()) return cmd_estimate(estimate_opts);
    if (table->parsed()) return cmd_table(table_opts);
    if (plotdata->parsed()) return cmd_plotdata(plot_opts);
    if (verify->parsed())
      return mallows::cli::run_verification(std::cout) == 0 ? kExitOk : kExitVerifyFailed;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResourceLimit;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
