#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "autorb/errors.hpp"
#include "autorb/polynomial.hpp"

namespace autorb::cli {

namespace {

using nlohmann::json;

std::string decimal(double x) { return format_real(x); }

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::precondition, "not a number: '" + s + "'");
  }
  if (used != s.size()) fail(ErrorCode::precondition, "not a number: '" + s + "'");
  return v;
}

json error_json(const std::string& code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}};
}

std::string code_name(ErrorCode c) { return std::string(to_string(c)); }

ContourConfig contour_config(const RunConfig& cfg) {
  ContourConfig c;
  c.nodes_initial = cfg.nodes_initial;
  c.tol_abs = cfg.tol_abs;
  c.tol_rel = cfg.tol_rel;
  c.validate();
  return c;
}

// ---------------------------------------------------------------- suites

struct SuiteItem {
  std::string suite;
  bool xfail = false;
  std::function<IdentityReport()> run;
};

struct Skipped {
  std::string suite;
  std::string reason;
};

const std::vector<std::string> kSuites{"vieta",  "jensen",  "derivsum", "vanishing", "density",
                                       "fixedpoints", "reconstruction", "expg", "tshift", "nesting",
                                       "fiber",  "cycle",   "folner",   "metric"};

// Counterexamples of order outside (0, 1/2) kept as expected failures.
bool vanishing_xfail(const std::string& function) { return function == "exp" || function == "cossqrt"; }

double default_radius(const RunConfig& cfg, const std::string& suite) {
  if (cfg.radius) return *cfg.radius;
  const std::string& f = cfg.function;
  if (suite == "vieta" || suite == "reconstruction") return f == "quarter" ? 1e6 : 1e4;
  if (suite == "fixedpoints") return f == "cossqrt" ? 100.0 : 20.0;
  if (f == "exp") return 10.0;
  if (f == "cossqrt") return 200.0;
  return 5.0;
}

bool periodic_2pi_i(const EntireFunction& f) {
  for (const Complex w : {Complex{0.3, 0.1}, Complex{-0.7, 0.4}, Complex{0.2, -1.1}}) {
    const Complex a = f.eval(w);
    if (std::abs(a - f.eval(w + Complex{0.0, kTwoPi})) > 1e-10 * (1.0 + std::abs(a))) return false;
  }
  return true;
}

std::vector<Complex> random_points(const RunConfig& cfg, int count, double radius) {
  std::mt19937_64 gen(cfg.seed.value_or(0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) out.push_back(std::polar(radius * std::sqrt(u(gen)), kTwoPi * u(gen)));
  return out;
}

void build_suite(const std::string& name, const RunConfig& cfg, const EntireFunction& f, const ContourConfig& cc,
                 std::vector<SuiteItem>& items, std::vector<Skipped>& skipped) {
  const Complex z = cfg.z ? parse_complex(*cfg.z) : Complex{1.0, 0.0};
  const auto coeffs = f.polynomial_coefficients();
  const auto order = f.known_order();
  auto add = [&](std::function<IdentityReport()> fn, bool xfail = false) {
    items.push_back({name, xfail, std::move(fn)});
  };
  auto skip = [&](std::string reason) { skipped.push_back({name, std::move(reason)}); };

  if (name == "vieta") {
    if (coeffs) {
      add([=] { return verify_poly_vieta(f, z, cc); });
    } else if (order && *order < 1.0 && f.coefficient(1)) {
      const double R = default_radius(cfg, name);
      add([=] { return verify_vieta_coefficients(f, z, 1, R, std::nullopt, cc); });
      if (f.family() == Family::cos_sqrt)
        add([=] { return verify_vieta_coefficients(f, Complex{kPi * kPi, 0.0}, 1, R, 10000, cc); });
    } else {
      skip("needs a polynomial or order below 1 with known coefficients");
    }
  } else if (name == "jensen") {
    const int n_cut = coeffs ? static_cast<int>(coeffs->size()) - 1 : 3;
    add([=] { return verify_jensen(f, z, n_cut, cc); });
  } else if (name == "derivsum") {
    const double R = default_radius(cfg, name);
    std::vector<Complex> zs{z};
    if (cfg.random > 0) zs = random_points(cfg, cfg.random, std::min(2.0, 0.3 * R));
    for (const Complex zz : zs)
      for (int k = 1; k <= 3; ++k) add([=] { return verify_derivative_sums(f, zz, R, k, cc); });
  } else if (name == "vanishing") {
    const bool xf = vanishing_xfail(cfg.function);
    if (order && *order > 0.0 && *order < 0.5) {
      const double rho = cfg.rho.value_or(*order);
      const RunConfig c = cfg;
      add([=] {
        const WimanRadii wr = wiman_search(f, rho, c.eps, c.rlo, c.rhi, z, cc);
        return verify_vanishing_sums(f, z, wr, 1, cc);
      }, xf);
    } else if (!xf) {
      skip("needs order in (0, 1/2)");
    } else {
      std::vector<double> radii = cfg.rgrid ? parse_grid(*cfg.rgrid)
                                            : (cfg.function == "cossqrt" ? std::vector<double>{1e2, 1e3, 1e4, 1e5}
                                                                         : std::vector<double>{10, 20, 40, 80, 160});
      WimanRadii wr{order.value_or(0.0), 0.0, {}, false};
      for (const double r : radii) wr.radii.push_back({r, 0.0, 0.0});
      add([=] { return verify_vanishing_sums(f, z, wr, 1, cc); }, xf);
    }
  } else if (name == "density") {
    if (!(order && *order > 0.0 && *order < 0.5)) return skip("needs order in (0, 1/2)");
    const double rho = cfg.rho.value_or(*order);
    const RunConfig c = cfg;
    add([=] {
      const WimanRadii wr = wiman_search(f, rho, c.eps, c.rlo, c.rhi, z, cc);
      return verify_circular_density(f, z, wr, rho, cc);
    });
  } else if (name == "fixedpoints") {
    const double R = default_radius(cfg, name);
    add([=] { return verify_fixed_points(f, R, cc); });
  } else if (name == "reconstruction") {
    const Complex w = cfg.w ? parse_complex(*cfg.w) : Complex{1.0, 0.0};
    if (f.coefficient(1)) {
      std::vector<int> degs;
      if (cfg.degrees) {
        for (const double d : parse_grid(*cfg.degrees)) degs.push_back(static_cast<int>(d));
      } else if (coeffs) {
        degs = {static_cast<int>(coeffs->size()) - 1};
      } else {
        degs = {10, 20, 30};
      }
      const Complex zp = cfg.z ? z : Complex{0.5, 0.0};
      add([=] { return verify_reconstruction_partial_sums(f, w, zp, degs); });
    }
    if (order && *order < 1.0) {
      // The engine reconstruction needs w off the orbit of z.
      const Complex zr = cfg.z ? z : Complex{4.0, 0.0};
      const Complex wr = cfg.w ? w : Complex{1.0, 0.0};
      const double R = coeffs ? 2.0 * (1.0 + std::abs(zr)) * 8.0 : default_radius(cfg, name);
      add([=] { return reconstruct_low_order(f, zr, wr, R, cc); });
    }
    if (items.empty() || items.back().suite != name) skip("needs Maclaurin coefficients or order below 1");
  } else if (name == "expg") {
    std::vector<std::pair<Complex, Complex>> pts{{1.0, 0.7}, {1.0, Complex{0.0, kPi}}, {0.0, 0.7}};
    if (cfg.w && cfg.z) pts.emplace_back(parse_complex(*cfg.w), z);
    for (const auto& [w, zz] : pts) add([=] { return verify_exp_g_closed_form(w, zz, 100000); });
  } else if (name == "tshift") {
    std::vector<std::pair<Complex, Complex>> pts{{Complex{0.4, 0.3}, Complex{0.8, -0.5}},
                                                 {Complex{-0.2, 0.6}, Complex{-0.9, 1.3}}};
    if (cfg.w && cfg.z) pts.emplace_back(parse_complex(*cfg.w), z);
    for (const auto& [w, zz] : pts) add([=] { return verify_shift_homomorphism(w, zz); });
  } else if (name == "nesting") {
    const double R = default_radius(cfg, name);
    const EntireFunction h = EntireFunction::monomial(2);
    add([=] { return verify_orbit_nesting(f, h, z, R, cc); });
  } else if (name == "fiber") {
    std::vector<Complex> p{2.0, -3.0, 1.0};
    std::vector<Complex> g{0.0, 1.0};
    if (cfg.function == "polyexp") {
      p = parse_complex_list(cfg.coeffs);
      g = parse_complex_list(cfg.gcoeffs);
    }
    const std::vector<double> grid = cfg.rgrid ? parse_grid(*cfg.rgrid) : std::vector<double>{5.0, 10.0, 50.0};
    add([=] { return verify_fiber_stability(p, g, grid, cc); });
  } else if (name == "cycle") {
    std::vector<Complex> zs{z, Complex{0.0, 2.0}, Complex{-0.5, 0.0}};
    if (cfg.random >= 3) zs = random_points(cfg, cfg.random, 2.0);
    add([=] { return verify_cycle_chain(f, zs); });
  } else if (name == "folner") {
    std::vector<double> R;
    std::vector<int> d;
    if (coeffs) {
      d = {static_cast<int>(coeffs->size()) - 1};
      double bound = 0.0;
      for (const Complex a : *coeffs) bound = std::max(bound, std::abs(a / coeffs->back()));
      R = {4.0 * (1.0 + bound + std::abs(z))};
    } else if (f.coefficient(1)) {
      d = {10, 20, 30};
      if (cfg.degrees) {
        d.clear();
        for (const double x : parse_grid(*cfg.degrees)) d.push_back(static_cast<int>(x));
      }
      for (const int n : d) R.push_back(cfg.radius.value_or(2.0 * n));
    } else {
      return skip("needs Maclaurin coefficients");
    }
    add([=] { return folner_ratios(f, z, R, d, cc); });
  } else if (name == "metric") {
    if (!periodic_2pi_i(f)) return skip("needs a 2 pi i periodic function");
    const std::vector<Complex> path{0.0, Complex{1.0, 1.0}, Complex{-0.5, 2.0}};
    for (const int k : {1, -2, 3}) add([=] { return verify_path_invariance(f, path, Complex{0.0, kTwoPi * k}); });
  }
}

// ---------------------------------------------------------------- commands

json base_file(const RunConfig& cfg) {
  return json{{"schema_version", kSchemaVersion}, {"tool_version", kToolVersion}, {"command", cfg.command},
              {"config", config_json(cfg)}};
}

int emit(const json& file, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string text = cfg.format == "csv" ? to_csv(file) : file.dump(2) + "\n";
  if (cfg.output.empty()) {
    out << text;
    return 0;
  }
  std::ofstream os(cfg.output, std::ios::binary);
  if (!os) {
    err << error_json("Io", "cannot open " + cfg.output).dump() << "\n";
    return 2;
  }
  os << text;
  return 0;
}

int cmd_orbit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.z || !cfg.radius) fail(ErrorCode::precondition, "orbit needs --z and --radius");
  const auto t0 = std::chrono::steady_clock::now();
  const EntireFunction f = make_function(cfg);
  const Complex z = parse_complex(*cfg.z);
  const ContourConfig cc = contour_config(cfg);
  const bool excluded = std::abs(f.eval(z) - f.eval(Complex{0.0, 0.0})) <= 1e-14 * (1.0 + std::abs(f.eval(z)));
  const OrbitSample s = orbit(f, z, *cfg.radius, cc);

  json file = base_file(cfg);
  file["orbit"] = orbit_json(s);
  if (f.has_orbit_oracle()) {
    const auto want = f.orbit_oracle(z, s.contour_radius);
    double worst = 0.0;
    bool mult_ok = want.size() == s.points.size();
    for (const auto& p : s.points) {
      double best = std::numeric_limits<double>::infinity();
      int m = 0;
      for (const auto& q : want) {
        const double d = std::abs(p.location - q.location);
        if (d < best) {
          best = d;
          m = q.multiplicity;
        }
      }
      worst = std::max(worst, best);
      mult_ok = mult_ok && m == p.multiplicity;
    }
    file["oracle"] = {{"count", want.size()}, {"max_distance", number(worst)}, {"multiplicities_match", mult_ok}};
  }
  file["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (excluded) {
    file["status"] = "rejected";
    const int emitted = emit(file, cfg, out, err);
    err << error_json("Precondition", "z lies in the excluded fiber f^-1(f(0)); the orbit is reported with its "
                                      "multiplicities only")
               .dump()
        << "\n";
    return emitted == 0 ? 2 : emitted;
  }
  file["status"] = "ok";
  return emit(file, cfg, out, err);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const EntireFunction f = make_function(cfg);
  const ContourConfig cc = contour_config(cfg);
  std::vector<std::string> names;
  if (cfg.suite == "all") names = kSuites;
  else if (std::find(kSuites.begin(), kSuites.end(), cfg.suite) != kSuites.end()) names = {cfg.suite};
  else fail(ErrorCode::precondition, "unknown suite '" + cfg.suite + "'");

  std::vector<SuiteItem> items;
  std::vector<Skipped> skipped;
  for (const auto& n : names) build_suite(n, cfg, f, cc, items, skipped);

  json reports = json::array();
  json summary{{"pass", 0}, {"fail", 0}, {"xfail", 0}, {"xpass", 0}, {"inconclusive", 0},
               {"diagnostic", 0}, {"error", 0}, {"skipped", skipped.size()}};
  bool failed = false;
  for (const auto& item : items) {
    json entry;
    std::string verdict;
    try {
      IdentityReport r = item.run();
      if (item.xfail) {
        if (r.verdict == Verdict::fail) r.verdict = Verdict::xfail;
        r.notes += r.notes.empty() ? "" : "; ";
        r.notes += "expected failure";
      }
      entry = report_json(r);
      verdict = std::string(to_string(r.verdict));
      if (item.xfail && r.pass) verdict = "xpass";
    } catch (const Error& e) {
      entry = {{"identity_id", item.suite}, {"error", {{"code", code_name(e.code())}, {"message", e.what()}}}};
      verdict = item.xfail ? "xfail" : "error";
    }
    entry["suite"] = item.suite;
    entry["expected"] = item.xfail ? "fail" : "pass";
    entry["verdict"] = verdict;
    summary[verdict] = summary[verdict].get<int>() + 1;
    if (verdict == "fail" || verdict == "error") failed = true;
    reports.push_back(std::move(entry));
  }
  json skip = json::array();
  for (const auto& s : skipped) skip.push_back({{"suite", s.suite}, {"reason", s.reason}});

  json file = base_file(cfg);
  file["reports"] = std::move(reports);
  file["skipped"] = std::move(skip);
  file["summary"] = std::move(summary);
  file["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const int e = emit(file, cfg, out, err);
  if (e != 0) return e;
  return failed ? 1 : 0;
}

int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const EntireFunction f = make_function(cfg);
  const ContourConfig cc = contour_config(cfg);
  json file = base_file(cfg);
  json rows = json::array();
  const std::optional<Complex> z = cfg.z ? std::optional<Complex>(parse_complex(*cfg.z)) : std::nullopt;

  if (!cfg.wiman || cfg.rgrid) {
    const std::vector<double> grid = parse_grid(cfg.rgrid.value_or("10:1e4:log"));
    const CountingProfile p = counting_profile(f, z.value_or(Complex{1.0, 0.0}), grid, cfg.rho, cc);
    json samples = json::array();
    for (const auto& s : p.samples) {
      samples.push_back({{"r_requested", decimal(s.r_requested)}, {"r_used", decimal(s.r_used)}, {"n", s.n}});
      const auto ex = modulus_extrema(f, s.r_used);
      rows.push_back({{"kind", "profile"}, {"r", decimal(s.r_used)}, {"n", s.n}, {"log_m", number(ex.log_m)},
                      {"log_M", number(ex.log_M)}});
    }
    file["profile"] = {{"z", complex_json(p.z)},           {"samples", samples},
                       {"rho_hat", number(p.rho_hat)},     {"rho_used", number(p.rho_used)},
                       {"upper_density", number(p.upper_density)}, {"lower_density", number(p.lower_density)},
                       {"degenerate", p.degenerate}};
    if (p.degenerate) file["profile"]["flag"] = "DegenerateFit";
  }
  if (cfg.wiman) {
    const double rho = cfg.rho ? *cfg.rho : f.known_order().value_or(0.0);
    const WimanRadii wr = wiman_search(f, rho, cfg.eps, cfg.rlo, cfg.rhi, z, cc);
    json radii = json::array();
    for (const auto& e : wr.radii) {
      radii.push_back({{"r", decimal(e.r)}, {"log_m", number(e.log_m)}, {"log_M", number(e.log_M)}});
      json row{{"kind", "wiman"}, {"r", decimal(e.r)}, {"n", nullptr}, {"log_m", number(e.log_m)},
               {"log_M", number(e.log_M)}};
      if (z) row["n"] = orbit_count(f, *z, safe_radius(f, *z, e.r, cc), cc);
      rows.push_back(row);
    }
    file["wiman"] = {{"rho", decimal(wr.rho)}, {"epsilon", decimal(wr.epsilon)}, {"radii", radii},
                     {"verified", wr.verified}};
    if (z) file["circular_density"] = report_json(verify_circular_density(f, *z, wr, rho, cc));
  }
  file["rows"] = rows;
  file["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return emit(file, cfg, out, err);
}

void add_function_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--function", cfg.function, "exp|cossqrt|quarter|quadratic|monomial|poly|polyexp|ng|series")
      ->capture_default_str();
  sub->add_option("--n", cfg.n, "monomial degree")->capture_default_str();
  sub->add_option("--coeffs", cfg.coeffs, "ascending coefficients, comma separated");
  sub->add_option("--gcoeffs", cfg.gcoeffs, "exponent coefficients for polyexp");
  sub->add_option("--c", cfg.c, "NgFactor constant")->capture_default_str();
  sub->add_option("--z", cfg.z, "base point, e.g. 1+0i");
  sub->add_option("--w", cfg.w, "second point");
  sub->add_option("--radius", cfg.radius, "disk radius");
  sub->add_option("--rgrid", cfg.rgrid, "radius grid: lo:hi:log[:N] or a,b,c");
  sub->add_option("--degrees", cfg.degrees, "degree schedule: a,b,c");
  sub->add_option("--nodes", cfg.nodes_initial, "initial quadrature nodes (power of two)")->capture_default_str();
  sub->add_option("--tol-abs", cfg.tol_abs, "quadrature absolute tolerance")->capture_default_str();
  sub->add_option("--tol-rel", cfg.tol_rel, "quadrature relative tolerance")->capture_default_str();
  sub->add_option("--output", cfg.output, "output file (stdout when empty)");
  sub->add_option("--format", cfg.format, "json|csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--seed", cfg.seed, "seed for random point sweeps");
  sub->add_option("--random", cfg.random, "number of seeded random base points")->capture_default_str();
}

}  // namespace

Complex parse_complex(const std::string& raw) {
  std::string s;
  for (const char ch : raw)
    if (ch != ' ') s += ch;
  if (s.empty()) fail(ErrorCode::precondition, "empty complex number");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : parse_double(re), parse_double(im)};
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) fail(ErrorCode::precondition, "empty list");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  while (std::getline(ss, item, sep)) parts.push_back(item);
  std::vector<double> out;
  if (sep == ':') {
    if (parts.size() < 3 || parts.size() > 4 || parts[2] != "log")
      fail(ErrorCode::precondition, "grid must look like lo:hi:log or lo:hi:log:N");
    const double lo = parse_double(parts[0]);
    const double hi = parse_double(parts[1]);
    if (!(lo > 0.0 && hi > lo)) fail(ErrorCode::precondition, "grid needs 0 < lo < hi");
    int n = parts.size() == 4 ? static_cast<int>(parse_double(parts[3]))
                              : static_cast<int>(std::lround(4.0 * std::log10(hi / lo))) + 1;
    n = std::max(n, 2);
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  } else {
    for (const auto& p : parts) out.push_back(parse_double(p));
  }
  if (out.empty()) fail(ErrorCode::precondition, "empty grid");
  return out;
}

EntireFunction make_function(const RunConfig& cfg) {
  const std::string& f = cfg.function;
  if (f == "exp") return EntireFunction::exp();
  if (f == "cossqrt") return EntireFunction::cos_sqrt();
  if (f == "quarter") return EntireFunction::quarter_order();
  if (f == "quadratic") return EntireFunction::quadratic_zz();
  if (f == "monomial") return EntireFunction::monomial(cfg.n);
  if (f == "poly") return EntireFunction::polynomial(parse_complex_list(cfg.coeffs));
  if (f == "series") return EntireFunction::truncated_series(parse_complex_list(cfg.coeffs));
  if (f == "polyexp") return EntireFunction::poly_times_exp(parse_complex_list(cfg.coeffs), parse_complex_list(cfg.gcoeffs));
  if (f == "ng") return EntireFunction::ng_factor(parse_complex(cfg.c));
  fail(ErrorCode::precondition, "unknown function '" + f + "'");
}

json complex_json(Complex z) { return {{"re", number(z.real())}, {"im", number(z.imag())}}; }

json report_json(const IdentityReport& r) {
  json inputs = json::array();
  for (const auto& [k, v] : r.inputs) inputs.push_back({{"name", k}, {"value", v}});
  json series = json::object();
  for (const auto& s : r.series) {
    json vals = json::array();
    for (const double v : s.values) vals.push_back(number(v));
    series[s.name] = vals;
  }
  return {{"identity_id", r.identity_id}, {"inputs", inputs},
          {"lhs", complex_json(r.lhs)},   {"rhs", complex_json(r.rhs)},
          {"abs_err", number(r.abs_err)}, {"rel_err", number(r.rel_err)},
          {"tolerance", decimal(r.tolerance)}, {"pass", r.pass},
          {"verdict", to_string(r.verdict)}, {"notes", r.notes},
          {"runtime_ms", r.runtime_ms},   {"series", series}};
}

json orbit_json(const OrbitSample& s) {
  json pts = json::array();
  for (std::size_t i = 0; i < s.points.size(); ++i)
    pts.push_back({{"location", complex_json(s.points[i].location)},
                   {"multiplicity", s.points[i].multiplicity},
                   {"residual", number(s.residuals[i])}});
  return {{"z", complex_json(s.z)},
          {"R", decimal(s.R)},
          {"contour_radius", decimal(s.contour_radius)},
          {"level", complex_json(s.level)},
          {"count", s.count},
          {"points", pts},
          {"notes", s.notes}};
}

json config_json(const RunConfig& cfg) {
  json j{{"function", cfg.function},   {"n", cfg.n},           {"coeffs", cfg.coeffs},
         {"gcoeffs", cfg.gcoeffs},     {"c", cfg.c},           {"nodes_initial", cfg.nodes_initial},
         {"tol_abs", decimal(cfg.tol_abs)}, {"tol_rel", decimal(cfg.tol_rel)}, {"suite", cfg.suite},
         {"format", cfg.format},       {"random", cfg.random}, {"wiman", cfg.wiman},
         {"eps", decimal(cfg.eps)},    {"rlo", decimal(cfg.rlo)}, {"rhi", decimal(cfg.rhi)}};
  j["z"] = cfg.z ? json(*cfg.z) : json(nullptr);
  j["w"] = cfg.w ? json(*cfg.w) : json(nullptr);
  j["radius"] = cfg.radius ? json(decimal(*cfg.radius)) : json(nullptr);
  j["rgrid"] = cfg.rgrid ? json(*cfg.rgrid) : json(nullptr);
  j["degrees"] = cfg.degrees ? json(*cfg.degrees) : json(nullptr);
  j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  j["rho"] = cfg.rho ? json(decimal(*cfg.rho)) : json(nullptr);
  return j;
}

namespace {

std::string csv_field(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : (v.is_null() ? "" : v.dump());
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string csv_rows(const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string to_csv(const json& file) {
  std::vector<std::vector<json>> rows;
  if (file.contains("reports")) {
    for (const auto& r : file["reports"]) {
      auto get = [&](const char* k) { return r.contains(k) ? r[k] : json(nullptr); };
      auto part = [&](const char* k, const char* p) { return r.contains(k) ? r[k][p] : json(nullptr); };
      rows.push_back({get("identity_id"), get("suite"), get("verdict"), get("pass"), part("lhs", "re"),
                      part("lhs", "im"), part("rhs", "re"), part("rhs", "im"), get("abs_err"), get("rel_err"),
                      get("tolerance"), get("runtime_ms"), get("notes")});
    }
    return csv_rows({"identity_id", "suite", "verdict", "pass", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err",
                     "rel_err", "tolerance", "runtime_ms", "notes"},
                    rows);
  }
  if (file.contains("orbit")) {
    for (const auto& p : file["orbit"]["points"])
      rows.push_back({p["location"]["re"], p["location"]["im"], p["multiplicity"], p["residual"]});
    return csv_rows({"re", "im", "multiplicity", "residual"}, rows);
  }
  for (const auto& r : file.value("rows", json::array()))
    rows.push_back({r["kind"], r["r"], r["n"], r["log_m"], r["log_M"]});
  return csv_rows({"kind", "r", "n", "log_m", "log_M"}, rows);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Orbits of entire functions and identity checks"};
  app.require_subcommand(1);
  auto* orbit_cmd = app.add_subcommand("orbit", "recover the orbit of z inside |w| < R");
  auto* verify_cmd = app.add_subcommand("verify", "run identity suites");
  auto* density_cmd = app.add_subcommand("density", "counting profile and Wiman radii");
  for (auto* sub : {orbit_cmd, verify_cmd, density_cmd}) add_function_options(sub, cfg);
  verify_cmd->add_option("--suite", cfg.suite, "suite name or all")->capture_default_str();
  density_cmd->add_flag("--wiman", cfg.wiman, "search for Wiman radii");
  density_cmd->add_option("--rho", cfg.rho, "order used for the Wiman test and densities");
  density_cmd->add_option("--eps", cfg.eps, "Wiman epsilon")->capture_default_str();
  density_cmd->add_option("--rlo", cfg.rlo, "Wiman search lower radius")->capture_default_str();
  density_cmd->add_option("--rhi", cfg.rhi, "Wiman search upper radius")->capture_default_str();

  std::vector<const char*> argv{"autorb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json("Usage", e.what()).dump() << "\n";
    return 2;
  }

  try {
    if (orbit_cmd->parsed()) {
      cfg.command = "orbit";
      return cmd_orbit(cfg, out, err);
    }
    if (verify_cmd->parsed()) {
      cfg.command = "verify";
      return cmd_verify(cfg, out, err);
    }
    cfg.command = "density";
    return cmd_density(cfg, out, err);
  } catch (const Error& e) {
    err << error_json(code_name(e.code()), e.what()).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << error_json("Internal", e.what()).dump() << "\n";
    return 2;
  }
}

}  // namespace autorb::cli
