#include "chiral/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "chiral/errors.hpp"
#include "chiral/maxdist.hpp"
#include "chiral/metrics.hpp"
#include "chiral/montecarlo.hpp"
#include "chiral/parallel.hpp"
#include "chiral/radial.hpp"
#include "chiral/scaling.hpp"
#include "chiral/specfun.hpp"
#include "output.hpp"

namespace chiral::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  int workers = 1;
  std::string format;
  std::string output;
  std::string config;
};

struct Opts {
  std::string n = "100";
  std::int64_t v = 0;
  std::string engine = "auto";
  std::string j;
  double t_min = std::nan("");
  double t_max = std::nan("");
  double x_min = std::nan("");
  double x_max = std::nan("");
  int points = 0;
  double trunc_eps = 1e-12;
  std::string n_grid = "1e4,1e6,1e8,1e10,1e12";
  std::int64_t count = 1000;
  std::uint64_t seed = 1;
  std::string source = "radial";
  std::string scale = "radius_sq";
  std::string variance = "half";
  std::string svg;
};

std::int64_t parse_count(const std::string& s, const char* what) {
  double d = 0;
  try {
    std::size_t pos = 0;
    d = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + ": cannot parse '" + s + "' as a number");
  }
  if (!(d >= 1.0 && d <= 9.0e15) || std::floor(d) != d) {
    throw UsageError(std::string(what) + ": need an integer in [1, 9e15] (got '" + s + "')");
  }
  return static_cast<std::int64_t>(d);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<Engine> engine_opt(const std::string& s) {
  if (s == "auto") return std::nullopt;
  return parse_engine(s);
}

Engine law_engine(const EnsembleParams& p, std::int64_t j, const std::string& s) {
  if (s != "auto") return parse_engine(s);
  if (j <= kExactMaxJ && 2 * j + p.v <= kExactMaxOrder) return Engine::exact_bessel;
  if (p.v <= kVGammaMax) return Engine::gamma_approx;
  return Engine::large_v;
}

json params_json(const EnsembleParams& p) { return {{"n", p.n}, {"v", p.v}}; }

// --- subcommands -------------------------------------------------------------

void cmd_constants(const Opts& o, const std::string& fmt, std::ostream& out) {
  const EnsembleParams p{parse_count(o.n, "--n"), o.v};
  const auto c = scaling_constants(p);
  const std::vector<std::pair<std::string, double>> rows = {
      {"s", c.s},           {"log_s", c.log_s},         {"a", c.a},
      {"b", c.b},           {"alpha", c.alpha},         {"ell1", c.ell1},
      {"ell2", c.ell2},     {"x0_left", c.x0_left},     {"x0_closed", c.x0_closed},
      {"center", c.center}, {"width", c.width},
  };
  if (fmt == "json") {
    json j = params_json(p);
    for (const auto& [k, v] : rows) j[k] = v;
    j["ell1_applicable"] = c.ell1_applicable;
    j["min_admissible_n"] = min_admissible_n(p.v);
    out << j.dump(2) << "\n";
    return;
  }
  CsvWriter w(out);
  std::vector<std::string> head{"n", "v"};
  for (const auto& r : rows) head.push_back(r.first);
  head.push_back("ell1_applicable");
  head.push_back("min_admissible_n");
  w.header(head);
  w.field(static_cast<long long>(p.n)).field(static_cast<long long>(p.v));
  for (const auto& r : rows) w.field(r.second);
  w.field(static_cast<long long>(c.ell1_applicable)).field(static_cast<long long>(min_admissible_n(p.v)));
  w.end_row();
}

void cmd_tail(const Opts& o, const Global& g, const std::string& fmt, std::ostream& out) {
  const EnsembleParams p{parse_count(o.n, "--n"), o.v};
  p.validate();
  std::vector<std::int64_t> js;
  if (o.j.empty()) {
    js.push_back(p.n);
  } else {
    for (const auto& s : split_list(o.j)) js.push_back(parse_count(s, "--j"));
  }
  const int points = o.points > 0 ? o.points : 101;
  if (points < 2) throw UsageError("--points: need at least 2");
  struct Row {
    std::int64_t j;
    double t;
    TailSplit s;
    Engine e;
  };
  std::vector<Row> rows;
  for (std::int64_t j : js) {
    RadialLaw law;
    law.params = p;
    law.j = j;
    law.engine = law_engine(p, j, o.engine);
    law.validate();
    const double m = 2.0 * static_cast<double>(j) + static_cast<double>(p.v);
    const double lo = std::isnan(o.t_min) ? std::max(0.0, m - 6.0 * std::sqrt(m)) : o.t_min;
    const double hi = std::isnan(o.t_max) ? m + 6.0 * std::sqrt(m) : o.t_max;
    if (!(lo >= 0.0 && hi > lo)) throw UsageError("tail: need 0 <= t-min < t-max");
    for (int i = 0; i < points; ++i) {
      rows.push_back({j, lo + (hi - lo) * i / (points - 1), {}, law.engine});
    }
  }
  parallel_for(rows.size(), g.workers, [&](std::size_t i) {
    RadialLaw law;
    law.params = p;
    law.j = rows[i].j;
    law.engine = rows[i].e;
    rows[i].s = tail_split(law, rows[i].t);
  });
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"j", r.j}, {"t", r.t}, {"le", r.s.le}, {"gt", r.s.gt},
                     {"engine", std::string(engine_name(r.e))}});
    }
    out << json{{"params", params_json(p)}, {"scale", "2nY"}, {"rows", arr}}.dump(2) << "\n";
    return;
  }
  CsvWriter w(out);
  w.header({"j", "t", "le", "gt", "engine"});
  for (const auto& r : rows) {
    w.field(static_cast<long long>(r.j)).field(r.t).field(r.s.le).field(r.s.gt).field(engine_name(r.e));
    w.end_row();
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

void cmd_cdf(const Opts& o, const Global& g, const std::string& fmt, std::ostream& out) {
  const EnsembleParams p{parse_count(o.n, "--n"), o.v};
  const auto curve = make_curve(p, engine_opt(o.engine), o.trunc_eps);
  const auto& c = curve.constants;
  const double lo = std::isnan(o.x_min) ? (c.ell1_applicable ? -c.ell1 : 0.0) - 2.0 : o.x_min;
  const double hi = std::isnan(o.x_max) ? c.ell2 + 6.0 : o.x_max;
  const int points = o.points > 0 ? o.points : 201;
  if (points < 2 || !(hi > lo)) throw UsageError("cdf: need x-min < x-max and points >= 2");
  std::vector<EvalPoint> pts(points);
  parallel_for(pts.size(), g.workers, [&](std::size_t i) {
    pts[i] = cdf(curve, i + 1 == pts.size() ? hi : lo + (hi - lo) * i / (points - 1));
  });
  auto gap = [](const EvalPoint& e) { return e.cdf - specfun::gumbel_cdf(e.x); };
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& e : pts) {
      arr.push_back({{"x", e.x}, {"cdf", e.cdf}, {"gap", gap(e)}, {"trunc_bound", e.trunc_bound},
                     {"terms_used", e.terms_used}});
    }
    out << json{{"params", params_json(p)},
                {"engine", std::string(engine_name(curve.engine))},
                {"trunc_eps", curve.trunc_eps},
                {"scale", "X_n"},
                {"rows", arr}}
                   .dump(2)
        << "\n";
  } else {
    CsvWriter w(out);
    w.header({"x", "cdf", "gap", "trunc_bound", "terms_used"});
    for (const auto& e : pts) {
      w.field(e.x).field(e.cdf).field(gap(e)).field(e.trunc_bound).field(static_cast<long long>(e.terms_used));
      w.end_row();
    }
  }
  if (!o.svg.empty()) {
    Series f{"F_n", {}, {}};
    Series l{"Gumbel", {}, {}};
    for (const auto& e : pts) {
      f.x.push_back(e.x);
      f.y.push_back(e.cdf);
      l.x.push_back(e.x);
      l.y.push_back(specfun::gumbel_cdf(e.x));
    }
    write_file(o.svg, svg_chart("F_n(x), n = " + std::to_string(p.n) + ", v = " + std::to_string(p.v),
                                "x", "P(X_n <= x)", {f, l}));
  }
}

const std::vector<std::string> kReportColumns = {
    "n",           "v",          "engine",       "w1",           "w1_err",
    "ks",          "x_at_sup",   "scaled_w1",    "scaled_ks",    "predicted_w1",
    "predicted_ks", "ratio_w1",  "ratio_ks",     "ks_upper",     "predicted_sup_max",
    "x_star"};

void report_csv(CsvWriter& w, const DistanceReport& r) {
  w.field(static_cast<long long>(r.params.n)).field(static_cast<long long>(r.params.v));
  w.field(engine_name(r.engine));
  for (double x : {r.w1, r.w1_err, r.ks, r.x_at_sup, r.scaled_w1, r.scaled_ks, r.predicted_w1,
                   r.predicted_ks, r.ratio_w1, r.ratio_ks, r.ks_upper, r.predicted_sup_max,
                   r.x_star}) {
    w.field(x);
  }
  w.end_row();
}

json report_json(const DistanceReport& r) {
  return {{"n", r.params.n},
          {"v", r.params.v},
          {"engine", std::string(engine_name(r.engine))},
          {"w1", r.w1},
          {"w1_err", r.w1_err},
          {"ks", r.ks},
          {"x_at_sup", r.x_at_sup},
          {"scaled_w1", r.scaled_w1},
          {"scaled_ks", r.scaled_ks},
          {"predicted_w1", r.predicted_w1},
          {"predicted_ks", r.predicted_ks},
          {"ratio_w1", r.ratio_w1},
          {"ratio_ks", r.ratio_ks},
          {"ks_upper", r.ks_upper},
          {"predicted_sup_max", r.predicted_sup_max},
          {"x_star", r.x_star}};
}

void cmd_dist(const Opts& o, const Global& g, const std::string& fmt, std::ostream& out) {
  const EnsembleParams p{parse_count(o.n, "--n"), o.v};
  const auto curve = make_curve(p, engine_opt(o.engine), o.trunc_eps);
  MetricsOptions mo;
  mo.workers = g.workers;
  const auto r = scaled_report(curve, mo);
  if (fmt == "json") {
    out << report_json(r).dump(2) << "\n";
    return;
  }
  CsvWriter w(out);
  w.header(kReportColumns);
  report_csv(w, r);
}

void cmd_sweep(const Opts& o, const Global& g, const std::string& fmt, std::ostream& out) {
  std::vector<EnsembleParams> ps;
  for (const auto& s : split_list(o.n_grid)) ps.push_back({parse_count(s, "--n-grid"), o.v});
  if (ps.empty()) throw UsageError("--n-grid: empty list");
  // Validate every grid point before computing anything.
  std::vector<CdfCurve> curves;
  for (const auto& p : ps) curves.push_back(make_curve(p, engine_opt(o.engine), o.trunc_eps));
  MetricsOptions mo;
  mo.workers = g.workers;
  std::vector<DistanceReport> rs;
  for (const auto& c : curves) rs.push_back(scaled_report(c, mo));
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(report_json(r));
    out << json{{"rows", arr}}.dump(2) << "\n";
  } else {
    CsvWriter w(out);
    w.header(kReportColumns);
    for (const auto& r : rs) report_csv(w, r);
  }
  if (!o.svg.empty()) {
    Series ks{"scaled_ks", {}, {}}, w1{"scaled_w1", {}, {}};
    Series lk{"1/(2e)", {}, {}}, lw{"1/2", {}, {}};
    for (const auto& r : rs) {
      const double x = std::log10(static_cast<double>(r.params.n));
      ks.x.push_back(x);
      ks.y.push_back(r.scaled_ks);
      w1.x.push_back(x);
      w1.y.push_back(r.scaled_w1);
      lk.x.push_back(x);
      lk.y.push_back(1.0 / (2.0 * std::numbers::e));
      lw.x.push_back(x);
      lw.y.push_back(0.5);
    }
    write_file(o.svg, svg_chart("scaled distances, v = " + std::to_string(o.v), "log10 n",
                                "distance * log s_n / (log log s_n)^2", {ks, w1, lk, lw}));
  }
}

EntryVariance parse_variance(const std::string& s) {
  return s == "quarter" ? EntryVariance::quarter_over_n : EntryVariance::half_over_n;
}

json meta_json(const SampleMeta& m, const std::string& variance) {
  json j = {{"params", params_json(m.params)},
            {"source", std::string(source_name(m.source))},
            {"scale", std::string(scale_name(m.scale))},
            {"seed", m.seed},
            {"count", m.count}};
  if (m.source == SampleSource::matrix) {
    j["variance"] = variance;
    j["retries"] = m.retries;
  }
  return j;
}

void cmd_sample(const Opts& o, const Global& g, const std::string& fmt, std::ostream& out) {
  const EnsembleParams p{parse_count(o.n, "--n"), o.v};
  if (o.count < 1) throw UsageError("--count: need >= 1");
  SamplerOptions so;
  so.workers = g.workers;
  so.variance = parse_variance(o.variance);
  auto b = o.source == "matrix" ? sample_dirac_spectrum_max(p, o.count, o.seed, so)
                                : sample_radial_max(p, o.count, o.seed, so);
  if (o.scale == "x_n") b = empirical_rescale(b);
  const json meta = meta_json(b.meta, o.variance);
  if (fmt == "json") {
    out << json{{"meta", meta}, {"values", b.values}}.dump(2) << "\n";
    return;
  }
  CsvWriter w(out);
  w.header({"value"});
  for (double x : b.values) {
    w.field(x);
    w.end_row();
  }
  if (!g.output.empty()) write_file(g.output + ".json", meta.dump(2) + "\n");
}

int cmd_validate(const Opts& o, const Global& g, const std::string& fmt, std::ostream& out) {
  const EnsembleParams p{parse_count(o.n, "--n"), o.v};
  if (o.count < 25) throw UsageError("--count: need >= 25 for the KS test");
  SamplerOptions so;
  so.workers = g.workers;
  so.variance = parse_variance(o.variance);
  const auto m = sample_dirac_spectrum_max(p, o.count, o.seed, so);
  const auto r = sample_radial_max(p, o.count, o.seed, so);
  const auto ks = two_sample_ks(m, r);
  const double alpha = 0.01;
  const bool passed = ks.p_value >= alpha;
  if (fmt == "csv") {
    CsvWriter w(out);
    w.header({"n", "v", "count", "seed", "variance", "statistic", "p_value", "alpha", "passed"});
    w.field(static_cast<long long>(p.n)).field(static_cast<long long>(p.v));
    w.field(static_cast<long long>(o.count)).field(std::to_string(o.seed)).field(o.variance);
    w.field(ks.statistic).field(ks.p_value).field(alpha).field(passed ? "true" : "false");
    w.end_row();
  } else {
    out << json{{"params", params_json(p)},
                {"count", o.count},
                {"seed", o.seed},
                {"variance", o.variance},
                {"statistic", ks.statistic},
                {"p_value", ks.p_value},
                {"n1", ks.n1},
                {"n2", ks.n2},
                {"alpha", alpha},
                {"passed", passed},
                {"matrix_retries", m.meta.retries}}
                   .dump(2)
        << "\n";
  }
  return passed ? kExitOk : kExitInvalid;
}

int cmd_specfun_check(const std::string& fmt, std::ostream& out) {
  struct Row {
    std::string name, args;
    double value, reference, tol;
  };
  const double pi = std::numbers::pi;
  std::vector<Row> rows = {
      {"bessel_k_scaled", "v=0.5 x=2", specfun::bessel_k_scaled(0.5, 2.0), std::sqrt(pi / 4.0), 1e-13},
      {"bessel_k_scaled", "v=1.5 x=3", specfun::bessel_k_scaled(1.5, 3.0),
       std::sqrt(pi / 6.0) * (1.0 + 1.0 / 3.0), 1e-13},
      {"bessel_k_scaled", "v=2.5 x=0.7", specfun::bessel_k_scaled(2.5, 0.7),
       std::sqrt(pi / 1.4) * (1.0 + 3.0 / 0.7 + 3.0 / 0.49), 1e-13},
      {"bessel_k_uniform", "v=100 x=1", specfun::bessel_k_uniform(100.0, 1.0),
       std::exp(specfun::log_bessel_k_scaled(100.0, 100.0) - 100.0), 5e-2},
      {"log_gamma", "z=0.5", specfun::log_gamma(0.5), 0.5 * std::log(pi), 1e-13},
      {"log_gamma", "z=10", specfun::log_gamma(10.0), std::log(362880.0), 1e-13},
      {"reg_gamma_q", "a=1 x=2", specfun::reg_gamma_q(1.0, 2.0), std::exp(-2.0), 1e-12},
      {"reg_gamma_q", "a=1.5 x=3", specfun::reg_gamma_q(1.5, 3.0),
       std::erfc(std::sqrt(3.0)) + 2.0 * std::sqrt(3.0 / pi) * std::exp(-3.0), 1e-12},
      {"normal_sf", "t=3", specfun::normal_sf(3.0), 0.5 * std::erfc(3.0 / std::numbers::sqrt2), 1e-15},
      {"gumbel_cdf", "x=0", specfun::gumbel_cdf(0.0), std::exp(-1.0), 1e-15},
  };
  bool ok = true;
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      const double rel = std::abs(r.value / r.reference - 1.0);
      ok = ok && rel <= r.tol;
      arr.push_back({{"function", r.name}, {"args", r.args}, {"value", r.value},
                     {"reference", r.reference}, {"rel_err", rel}, {"tolerance", r.tol},
                     {"passed", rel <= r.tol}});
    }
    out << json{{"rows", arr}, {"passed", ok}}.dump(2) << "\n";
  } else {
    CsvWriter w(out);
    w.header({"function", "args", "value", "reference", "rel_err", "tolerance", "passed"});
    for (const auto& r : rows) {
      const double rel = std::abs(r.value / r.reference - 1.0);
      ok = ok && rel <= r.tol;
      w.field(r.name).field(r.args).field(r.value).field(r.reference).field(rel).field(r.tol);
      w.field(rel <= r.tol ? "true" : "false");
      w.end_row();
    }
  }
  return ok ? kExitOk : kExitInvalid;
}

// --- config file -------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  int line_no = 0;
  for (std::string line; std::getline(f, line);) {
    ++line_no;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    kv.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-n spectral-radius statistics of the chiral (tau = 0) Dirac ensemble.\n"
               "Scales: thresholds t are on the 2nY scale (t = 2n |zeta|^2); x is on the\n"
               "X_n scale, t = u_n(x) = 2 sqrt(n(n+v)) + sqrt(2n+v) (a(s_n) + b(s_n) x).",
               "chiral-gumbel"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  g.workers = default_workers();
  Opts o;
  app.add_option("--workers", g.workers, "worker threads (default: CHIRAL_GUMBEL_WORKERS or CPU count)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", g.output, "output file (default: stdout)");
  app.add_option("--config", g.config, "key = value file; command-line flags take precedence");

  const std::vector<std::string> engines = {"auto",         "exact",  "exact_bessel",
                                            "gamma",        "gamma_approx", "large_v"};
  auto add_nv = [&](CLI::App* s) {
    s->add_option("--n", o.n, "matrix half-size n (reals such as 1e12 accepted)");
    s->add_option("--v", o.v, "rectangularity index v >= 0");
  };
  auto add_engine = [&](CLI::App* s) {
    s->add_option("--engine", o.engine, "tail engine (auto picks by n and v)")
        ->check(CLI::IsMember(engines));
  };
  auto add_sampling = [&](CLI::App* s) {
    s->add_option("--count", o.count, "number of draws");
    s->add_option("--seed", o.seed, "64-bit seed");
    s->add_option("--variance", o.variance,
                  "entry convention: half (E|entry|^2 = 1/(2n)) or quarter (1/(4n))")
        ->check(CLI::IsMember({"half", "quarter"}));
  };

  auto* constants = app.add_subcommand("constants", "scaling constants s_n, a, b, ell1, ell2, x0");
  add_nv(constants);

  auto* tail = app.add_subcommand(
      "tail", "P(2nY_j <= t) and P(2nY_j > t) on a grid of t (2nY scale, independent of n)");
  add_nv(tail);
  add_engine(tail);
  tail->add_option("--j", o.j, "comma-separated indices 1 <= j <= n (default n)");
  tail->add_option("--t-min", o.t_min, "grid start on the 2nY scale (default 2j+v - 6 sqrt(2j+v))");
  tail->add_option("--t-max", o.t_max, "grid end on the 2nY scale (default 2j+v + 6 sqrt(2j+v))");
  tail->add_option("--points", o.points, "grid points (default 101)");

  auto* cdf_cmd = app.add_subcommand("cdf", "F_n(x) = P(X_n <= x) on a grid of x (X_n scale)");
  add_nv(cdf_cmd);
  add_engine(cdf_cmd);
  cdf_cmd->add_option("--x-min", o.x_min, "grid start, X_n scale (default -ell1 - 2)");
  cdf_cmd->add_option("--x-max", o.x_max, "grid end, X_n scale (default ell2 + 6)");
  cdf_cmd->add_option("--points", o.points, "grid points (default 201)");
  cdf_cmd->add_option("--trunc-eps", o.trunc_eps, "certified truncation budget in log F_n");
  cdf_cmd->add_option("--svg", o.svg, "also write a line chart of F_n and the Gumbel law");

  auto* dist = app.add_subcommand("dist", "W1 and Kolmogorov distances of F_n to the Gumbel law");
  add_nv(dist);
  add_engine(dist);
  dist->add_option("--trunc-eps", o.trunc_eps, "certified truncation budget in log F_n");

  auto* sweep = app.add_subcommand("sweep", "distance reports over a grid of n (X_n scale)");
  sweep->add_option("--v", o.v, "rectangularity index v >= 0");
  sweep->add_option("--n-grid", o.n_grid, "comma-separated n values, e.g. 1e4,1e6,1e8");
  add_engine(sweep);
  sweep->add_option("--trunc-eps", o.trunc_eps, "certified truncation budget in log F_n");
  sweep->add_option("--svg", o.svg, "also write a chart of the scaled distances");

  auto* sample = app.add_subcommand(
      "sample", "draws of max |zeta|^2 (radius_sq scale) or of X_n (x_n scale)");
  add_nv(sample);
  add_sampling(sample);
  sample->add_option("--source", o.source, "matrix or radial")
      ->check(CLI::IsMember({"matrix", "radial"}));
  sample->add_option("--scale", o.scale, "radius_sq (max |zeta|^2) or x_n")
      ->check(CLI::IsMember({"radius_sq", "x_n"}));

  auto* validate = app.add_subcommand(
      "validate", "two-sample KS test of matrix max |zeta|^2 against independent radial maxima");
  add_nv(validate);
  add_sampling(validate);

  auto* check = app.add_subcommand("specfun-check", "spot accuracy table of the special functions");

  std::vector<std::string> args = raw_args;
  try {
    // Pull out --config and splice its entries right after the subcommand
    // name, so later command-line flags override them.
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_path = args[i + 1];
        args.erase(args.begin() + i, args.begin() + i + 2);
        break;
      }
      if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
        args.erase(args.begin() + i);
        break;
      }
    }
    if (!config_path.empty()) {
      const auto kv = read_config(config_path);
      auto sub_it = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return app.get_subcommand_no_throw(a) != nullptr;
      });
      if (sub_it == args.end()) throw UsageError("a subcommand is required");
      const CLI::App* sub = app.get_subcommand_no_throw(*sub_it);
      std::vector<std::string> inject;
      for (const auto& [k, v] : kv) {
        const std::string flag = "--" + k;
        if (sub->get_option_no_throw(flag) == nullptr && app.get_option_no_throw(flag) == nullptr) {
          throw UsageError("config key '" + k + "' is not an option of '" + sub->get_name() + "'");
        }
        inject.push_back(flag + "=" + v);
      }
      args.insert(sub_it + 1, inject.begin(), inject.end());
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostringstream buf;
  int code = kExitOk;
  try {
    auto fmt_or = [&](const char* d) { return g.format.empty() ? std::string(d) : g.format; };
    if (constants->parsed()) cmd_constants(o, fmt_or("csv"), buf);
    if (tail->parsed()) cmd_tail(o, g, fmt_or("csv"), buf);
    if (cdf_cmd->parsed()) cmd_cdf(o, g, fmt_or("csv"), buf);
    if (dist->parsed()) cmd_dist(o, g, fmt_or("csv"), buf);
    if (sweep->parsed()) cmd_sweep(o, g, fmt_or("csv"), buf);
    if (sample->parsed()) cmd_sample(o, g, fmt_or("csv"), buf);
    if (validate->parsed()) code = cmd_validate(o, g, fmt_or("json"), buf);
    if (check->parsed()) code = cmd_specfun_check(fmt_or("csv"), buf);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    // Diagnostics from the numerical modules are passed through verbatim.
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  if (g.output.empty()) {
    out << buf.str();
  } else {
    std::ofstream f(g.output, std::ios::binary);
    if (!f) {
      err << "usage error: cannot write '" << g.output << "'\n";
      return kExitUsage;
    }
    f << buf.str();
  }
  return code;
}

}  // namespace chiral::cli
