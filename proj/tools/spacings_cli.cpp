// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line calculator for the order statistics of uniform spacings:
// exact distribution values, expectations, critical values, significance
// p-values, and the Monte Carlo / exact cross-check harness.

#include "spacings/exact_dist.hpp"
#include "spacings/geometry.hpp"
#include "spacings/moments.hpp"
#include "spacings/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using spacings::BandQuery;
using spacings::EvalPolicy;
using spacings::FloatEval;
using spacings::GapSpec;
using spacings::Rational;
using spacings::Scalar;
using spacings::TailQuery;

struct GlobalOpts {
  std::string format = "plain";
  int digits = 15;
  bool force_float = false;
  bool strict = false;
  bool no_fallback = false;
  double cond_threshold = 1e12;
  std::string grid;     // "a:b:step", exact rationals
  std::string out_file;

  EvalPolicy policy() const { return EvalPolicy{cond_threshold, !no_fallback}; }
  bool exact_inputs() const { return !force_float; }
};

// One computed value with its query echo.  k, m and ell are all echoed,
// related by m = n+1-k and ell = n+2-k, so the three index conventions are
// always visible side by side.
struct Record {
  std::string op;
  long n = 0;
  std::optional<long> k, m, ell;
  std::optional<Scalar> x;
  std::optional<Scalar> p;
  Scalar result;
  std::string mode;  // exact | float | float-fallback-exact
  std::optional<FloatEval> diag;
  std::optional<int> evaluations;  // quantile only
};

std::string mode_of(const Scalar& result, const std::optional<FloatEval>& diag) {
  if (result.is_exact()) return "exact";
  if (diag.has_value() && diag->fell_back) return "float-fallback-exact";
  return "float";
}

nlohmann::json record_json(const Record& r, int digits) {
  nlohmann::json query{{"op", r.op}, {"n", r.n}};
  if (r.k) query["k"] = *r.k;
  if (r.m) query["m"] = *r.m;
  if (r.ell) query["ell"] = *r.ell;
  if (r.x) query["x"] = r.x->str(17);
  if (r.p) query["p"] = r.p->str(17);
  nlohmann::json result{{"decimal", r.result.decimal(digits)}, {"mode", r.mode}};
  if (r.result.is_exact()) result["exact"] = r.result.rational().str();
  nlohmann::json diagnostics = nlohmann::json::object();
  if (r.diag) {
    diagnostics["error_bound"] = r.diag->error_bound;
    diagnostics["condition"] = r.diag->condition;
    diagnostics["fallback"] = r.diag->fell_back;
  }
  if (r.evaluations) diagnostics["evaluations"] = *r.evaluations;
  return nlohmann::json{{"query", std::move(query)},
                        {"result", std::move(result)},
                        {"diagnostics", std::move(diagnostics)}};
}

std::string csv_header() {
  return "op,n,k,m,ell,x,p,result_exact,result_decimal,mode,error_bound,condition,fallback";
}

std::string csv_row(const Record& r, int digits) {
  auto opt_str = [](const std::optional<long>& v) { return v ? std::to_string(*v) : ""; };
  std::ostringstream os;
  os << r.op << ',' << r.n << ',' << opt_str(r.k) << ',' << opt_str(r.m) << ',' << opt_str(r.ell)
     << ',' << (r.x ? r.x->str(17) : "") << ',' << (r.p ? r.p->str(17) : "") << ','
     << (r.result.is_exact() ? r.result.rational().str() : "") << ',' << r.result.decimal(digits)
     << ',' << r.mode << ',';
  if (r.diag) {
    os << r.diag->error_bound << ',' << r.diag->condition << ','
       << (r.diag->fell_back ? "true" : "false");
  } else {
    os << ",,";
  }
  return os.str();
}

std::string plain_value(const Record& r, int digits) {
  if (r.result.is_exact()) return r.result.rational().str() + " = " + r.result.decimal(digits);
  return r.result.decimal(digits);
}

void render(const std::vector<Record>& records, const GlobalOpts& g, std::ostream& out) {
  if (g.format == "json") {
    if (records.size() == 1) {
      out << record_json(records[0], g.digits).dump(2) << '\n';
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const Record& r : records) arr.push_back(record_json(r, g.digits));
      out << arr.dump(2) << '\n';
    }
    return;
  }
  if (g.format == "csv") {
    out << csv_header() << '\n';
    for (const Record& r : records) out << csv_row(r, g.digits) << '\n';
    return;
  }
  // plain
  const bool sweep = records.size() > 1;
  for (const Record& r : records) {
    if (sweep && r.x) out << "x=" << r.x->str(17) << "  ";
    if (sweep && !r.x && r.p) out << "p=" << r.p->str(17) << "  ";
    out << plain_value(r, g.digits) << '\n';
  }
}

std::vector<Scalar> threshold_list(const GlobalOpts& g, const std::string& x_text,
                                   bool x_required) {
  std::vector<Scalar> xs;
  if (!g.grid.empty()) {
    std::istringstream is(g.grid);
    std::string a, b, step;
    if (!std::getline(is, a, ':') || !std::getline(is, b, ':') || !std::getline(is, step))
      throw CLI::ValidationError("--grid", "expected \"a:b:step\"");
    Rational lo = Rational::parse(a), hi = Rational::parse(b), inc = Rational::parse(step);
    if (inc.sign() <= 0) throw CLI::ValidationError("--grid", "step must be > 0");
    if (lo > hi) throw CLI::ValidationError("--grid", "needs a <= b");
    for (Rational x = lo; x <= hi; x += inc) {
      xs.push_back(g.exact_inputs() ? Scalar::exact(x) : Scalar::floating(x.to_double()));
    }
    return xs;
  }
  if (x_text.empty()) {
    if (x_required) throw CLI::RequiredError("--x (or --grid)");
    return xs;
  }
  xs.push_back(Scalar::parse(x_text, g.exact_inputs()));
  return xs;
}

int finish(const std::vector<Record>& records, const GlobalOpts& g) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!g.out_file.empty()) {
    file.open(g.out_file);
    if (!file) throw std::runtime_error("cannot open --out file: " + g.out_file);
    out = &file;
  }
  render(records, g, *out);
  bool fell_back = false;
  for (const Record& r : records) fell_back |= r.diag.has_value() && r.diag->fell_back;
  if (fell_back) std::cerr << "note: ill-conditioned sum, exact fallback used\n";
  if (g.strict && g.force_float && fell_back) return 3;
  return 0;
}

// ---------------------------------------------------------------------------
// compute subcommands

int run_x_op(const std::string& op, long n, std::optional<long> k_in, std::optional<long> m_in,
             std::optional<long> ell_in, const std::string& x_text, const GlobalOpts& g) {
  std::vector<Record> records;
  for (const Scalar& x : threshold_list(g, x_text, true)) {
    Record rec;
    rec.op = op;
    rec.n = n;
    rec.x = x;
    FloatEval diag;
    bool want_diag = !x.is_exact();
    long k = 0;
    if (op == "sf" || op == "cdf") {
      k = k_in.value();
    } else if (op == "band") {
      k = n + 1 - m_in.value();
    } else if (op == "maxsf") {
      k = n + 1;
    } else {  // pvalue
      k = n + 2 - ell_in.value();
    }
    rec.k = k;
    rec.m = n + 1 - k;
    rec.ell = n + 2 - k;
    if (op == "sf") {
      rec.result = spacings::survival(GapSpec{n, k}, x, g.policy(), &diag);
    } else if (op == "cdf") {
      rec.result = spacings::cdf(GapSpec{n, k}, x, g.policy(), &diag);
    } else if (op == "band") {
      rec.result = spacings::band_probability(BandQuery{n, m_in.value(), x}, g.policy(), &diag);
    } else if (op == "maxsf") {
      rec.result = spacings::max_gap_survival(n, x, g.policy(), &diag);
    } else {
      rec.result = spacings::tail_pvalue(TailQuery{n, ell_in.value(), x}, g.policy(), &diag);
    }
    if (want_diag) rec.diag = diag;
    rec.mode = mode_of(rec.result, rec.diag);
    records.push_back(std::move(rec));
  }
  return finish(records, g);
}

int run_mean(long n, long k, const GlobalOpts& g) {
  Record rec;
  rec.op = "mean";
  rec.n = n;
  rec.k = k;
  rec.m = n + 1 - k;
  rec.ell = n + 2 - k;
  rec.result = Scalar::exact(spacings::expected_gap(GapSpec{n, k}));
  rec.mode = "exact";
  return finish({rec}, g);
}

int run_quantile(long n, long k, const std::string& p_text, double tol, const GlobalOpts& g) {
  Record rec;
  rec.op = "quantile";
  rec.n = n;
  rec.k = k;
  rec.m = n + 1 - k;
  rec.ell = n + 2 - k;
  Scalar p = Scalar::parse(p_text, g.exact_inputs());
  rec.p = p;
  spacings::QuantileResult res = spacings::quantile(GapSpec{n, k}, p.value(), tol, g.policy());
  // exact inputs additionally get one exact-arithmetic confirmation of the root
  rec.result = spacings::quantile(GapSpec{n, k}, p, tol, g.policy());
  FloatEval diag;
  diag.value = res.x;
  diag.error_bound = tol;
  diag.condition = 0.0;
  rec.diag = diag;
  rec.evaluations = res.evaluations;
  rec.mode = "float";
  return finish({rec}, g);
}

// ---------------------------------------------------------------------------
// simulation subcommands

void render_sim_plain(const spacings::SimReport& report, int digits, std::ostream& out) {
  for (const auto& e : report.entries) {
    out << e.query.label() << ": ";
    if (e.error) {
      out << "error: " << *e.error << '\n';
      continue;
    }
    out << "estimate " << e.estimate.value << " se " << e.estimate.se;
    if (e.exact) out << " exact " << e.exact->str() << " (" << e.exact->decimal(digits) << ")";
    if (e.z) out << " z " << *e.z << (e.alarm ? " ALARM" : "");
    out << '\n';
  }
}

void render_sim_csv(const spacings::SimReport& report, int digits, std::ostream& out) {
  out << "kind,n,index,x,estimate,se,exact,exact_decimal,z,alarm,error\n";
  for (const auto& e : report.entries) {
    const char* kind = e.query.kind == spacings::Query::Kind::Survival
                           ? "survival"
                           : (e.query.kind == spacings::Query::Kind::Band ? "band" : "mean");
    out << kind << ',' << report.config.n << ',' << e.query.index << ','
        << (e.query.x ? e.query.x->str() : "") << ',';
    if (e.error) {
      out << ",,,,,," << '"' << *e.error << '"' << '\n';
      continue;
    }
    out << e.estimate.value << ',' << e.estimate.se << ',' << (e.exact ? e.exact->str() : "")
        << ',' << (e.exact ? e.exact->decimal(digits) : "") << ',';
    if (e.z) out << *e.z;
    out << ',' << (e.alarm ? "true" : "false") << ",\n";
  }
}

int emit_sim(const std::vector<spacings::SimReport>& reports, const GlobalOpts& g) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!g.out_file.empty()) {
    file.open(g.out_file);
    if (!file) throw std::runtime_error("cannot open --out file: " + g.out_file);
    out = &file;
  }
  if (g.format == "json") {
    if (reports.size() == 1) {
      *out << reports[0].to_json(g.digits).dump(2) << '\n';
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) arr.push_back(r.to_json(g.digits));
      *out << arr.dump(2) << '\n';
    }
  } else if (g.format == "csv") {
    for (const auto& r : reports) render_sim_csv(r, g.digits, *out);
  } else {
    for (const auto& r : reports) {
      *out << "# n=" << r.config.n << " rep=" << to_string(r.config.representation)
           << " samples=" << r.config.samples << " seed=" << r.config.seed << '\n';
      render_sim_plain(r, g.digits, *out);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"order statistics of uniform spacings: exact distributions, expectations,\n"
               "critical values, p-values, and Monte Carlo cross-checks"};
  app.require_subcommand(1);
  // global options may appear after the subcommand
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"plain", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--digits", g.digits, "decimal digits in rendered output")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  auto* flag_float = app.add_flag("--float", g.force_float,
                                  "evaluate in double precision (with exact fallback)");
  app.add_flag("--exact", "evaluate in exact rational arithmetic (default)")
      ->excludes(flag_float);
  app.add_flag("--strict", g.strict, "with --float: exit 3 if the exact fallback was used");
  app.add_flag("--no-fallback", g.no_fallback,
               "with --float: never fall back, report the conditioning instead");
  app.add_option("--cond-threshold", g.cond_threshold,
                 "condition number above which --float falls back to exact")
      ->capture_default_str();
  app.add_option("--grid", g.grid, "sweep x over \"a:b:step\" instead of --x");
  app.add_option("--out", g.out_file, "write output to a file instead of stdout");

  long n = 1, k = 1, m = 0, ell = 1;
  std::string x_text, p_text;
  double tol = 1e-12;

  auto add_n = [&](CLI::App* cmd) {
    cmd->add_option("--n", n, "number of uniform points")->required();
  };

  CLI::App* sf =
      app.add_subcommand("sf", "P(G_(k) > x), survival function of the k-th smallest spacing");
  add_n(sf);
  sf->add_option("--k", k, "rank, 0..n+2")->required();
  sf->add_option("--x", x_text, "threshold in [0,1]");

  CLI::App* cdfc = app.add_subcommand("cdf", "P(G_(k) <= x)");
  add_n(cdfc);
  cdfc->add_option("--k", k, "rank, 0..n+2")->required();
  cdfc->add_option("--x", x_text, "threshold in [0,1]");

  CLI::App* band = app.add_subcommand("band", "P(exactly m of the n+1 spacings exceed x)");
  add_n(band);
  band->add_option("--m", m, "count, 0..n+1")->required();
  band->add_option("--x", x_text, "threshold in [0,1]");

  CLI::App* maxsf = app.add_subcommand("maxsf", "P(max spacing > x)");
  add_n(maxsf);
  maxsf->add_option("--x", x_text, "threshold in [0,1]");

  CLI::App* pv = app.add_subcommand(
      "pvalue", "P(at least ell normalized statistics exceed x): significance p-value");
  add_n(pv);
  pv->add_option("--ell", ell, "minimum count, 1..n+1")->required();
  pv->add_option("--x", x_text, "critical value in [0,1]");

  CLI::App* mean = app.add_subcommand("mean", "E G_(k), exact");
  add_n(mean);
  mean->add_option("--k", k, "rank, 0..n+1")->required();

  CLI::App* quant = app.add_subcommand("quantile", "critical value x with P(G_(k) > x) = p");
  add_n(quant);
  quant->add_option("--k", k, "rank, 1..n+1")->required();
  quant->add_option("--p", p_text, "upper-tail probability in (0,1)")->required();
  quant->add_option("--tol", tol, "tolerance on the probability scale")->capture_default_str();

  std::uint64_t samples = 1'000'000, seed = 0;
  unsigned streams = 1;
  std::string rep_text = "uniform";
  std::vector<long> sf_ks, band_ms, mean_ks;
  std::vector<std::string> x_texts;
  bool with_exact = false;
  double alarm_z = 4.0;

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimates from seeded sampling");
  add_n(sim);
  sim->add_option("--samples", samples, "")->capture_default_str();
  sim->add_option("--seed", seed, "")->capture_default_str();
  sim->add_option("--rep", rep_text, "uniform | expratio")->capture_default_str();
  sim->add_option("--streams", streams, "worker threads; estimates do not depend on it")
      ->capture_default_str();
  sim->add_option("--sf-k", sf_ks, "estimate P(G_(k) > x) for these ranks");
  sim->add_option("--band-m", band_ms, "estimate band probabilities for these counts");
  sim->add_option("--mean-k", mean_ks, "estimate E G_(k) for these ranks");
  sim->add_option("--x", x_texts, "threshold(s) for --sf-k / --band-m");
  sim->add_flag("--with-exact", with_exact, "attach exact values and z-scores");
  sim->add_option("--alarm-z", alarm_z, "|z| flagged in the report")->capture_default_str();

  long nmax = 8;
  std::string verify_rep = "both";
  double max_alarm_frac = 0.005, max_abs_z = 6.0;
  CLI::App* ver = app.add_subcommand(
      "verify", "cross-check Monte Carlo against exact values over a standard grid");
  ver->add_option("--nmax", nmax, "run n = 1..nmax")->capture_default_str();
  ver->add_option("--samples", samples, "")->capture_default_str();
  ver->add_option("--seed", seed, "")->capture_default_str();
  ver->add_option("--rep", verify_rep, "uniform | expratio | both")->capture_default_str();
  ver->add_option("--streams", streams, "")->capture_default_str();
  ver->add_option("--alarm-z", alarm_z, "")->capture_default_str();
  ver->add_option("--max-alarm-frac", max_alarm_frac, "failing alarm fraction")
      ->capture_default_str();
  ver->add_option("--max-abs-z", max_abs_z, "failing |z|")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    if (sf->parsed()) return run_x_op("sf", n, k, std::nullopt, std::nullopt, x_text, g);
    if (cdfc->parsed()) return run_x_op("cdf", n, k, std::nullopt, std::nullopt, x_text, g);
    if (band->parsed()) return run_x_op("band", n, std::nullopt, m, std::nullopt, x_text, g);
    if (maxsf->parsed())
      return run_x_op("maxsf", n, std::nullopt, std::nullopt, std::nullopt, x_text, g);
    if (pv->parsed()) return run_x_op("pvalue", n, std::nullopt, std::nullopt, ell, x_text, g);
    if (mean->parsed()) return run_mean(n, k, g);
    if (quant->parsed()) return run_quantile(n, k, p_text, tol, g);

    if (sim->parsed()) {
      spacings::SimConfig cfg{n, samples, seed, spacings::representation_from_string(rep_text),
                              streams};
      std::vector<Rational> xs;
      for (const auto& t : x_texts) xs.push_back(Rational::parse(t));
      std::vector<spacings::Query> queries;
      if (sf_ks.empty() && band_ms.empty() && mean_ks.empty()) {
        if (xs.empty()) {
          for (long kk = 1; kk <= n + 1; ++kk)
            queries.push_back({spacings::Query::Kind::Mean, kk, std::nullopt});
        } else {
          queries = spacings::standard_query_grid(n, xs);
        }
      } else {
        if (xs.empty() && (!sf_ks.empty() || !band_ms.empty()))
          throw CLI::RequiredError("--x (thresholds for --sf-k/--band-m)");
        for (const Rational& x : xs) {
          for (long kk : sf_ks) queries.push_back({spacings::Query::Kind::Survival, kk, x});
          for (long mm : band_ms) queries.push_back({spacings::Query::Kind::Band, mm, x});
        }
        for (long kk : mean_ks) queries.push_back({spacings::Query::Kind::Mean, kk, std::nullopt});
      }
      auto report = spacings::run_queries(cfg, queries, with_exact, alarm_z);
      return emit_sim({report}, g);
    }

    if (ver->parsed()) {
      std::vector<spacings::Representation> reps;
      if (verify_rep == "both") {
        reps = {spacings::Representation::UniformSort,
                spacings::Representation::ExponentialRatio};
      } else {
        reps = {spacings::representation_from_string(verify_rep)};
      }
      std::vector<spacings::SimReport> reports;
      std::size_t total = 0, alarms = 0;
      double worst = 0.0;
      for (spacings::Representation rep : reps) {
        for (long nn = 1; nn <= nmax; ++nn) {
          spacings::SimConfig cfg{nn, samples, seed, rep, streams};
          auto report = spacings::verify(
              cfg, spacings::standard_query_grid(nn, spacings::default_threshold_grid()),
              alarm_z);
          for (const auto& e : report.entries) {
            if (e.z) {
              ++total;
              if (std::isfinite(*e.z)) worst = std::max(worst, std::fabs(*e.z));
              else worst = std::numeric_limits<double>::infinity();
            }
            if (e.alarm) ++alarms;
          }
          reports.push_back(std::move(report));
        }
      }
      int rc = emit_sim(reports, g);
      double frac = total > 0 ? static_cast<double>(alarms) / static_cast<double>(total) : 0.0;
      std::cerr << "verify: " << total << " queries, " << alarms << " alarms (frac " << frac
                << "), max |z| " << worst << '\n';
      if (rc == 0 && (frac > max_alarm_frac || worst > max_abs_z)) rc = 4;
      return rc;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
