// Acceptance gate: one line per criterion, exit status nonzero if any criterion
// other than the documented defect (7) fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "autorb/errors.hpp"
#include "autorb/identities.hpp"
#include "autorb/orbit.hpp"
#include "oracles.hpp"

using autorb::Complex;
using autorb::EntireFunction;

namespace {

const double pi = oracle::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;  // 0 = no runtime limit
  std::function<Outcome()> check;
  bool documented_defect = false;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<Complex> locations(const autorb::OrbitSample& s, bool& simple) {
  std::vector<Complex> v;
  for (const auto& p : s.points) {
    simple = simple && p.multiplicity == 1;
    for (int m = 0; m < p.multiplicity; ++m) v.push_back(p.location);
  }
  return v;
}

Outcome orbit_oracles() {
  double worst = 0.0;
  bool mult = true;
  int checked = 0;
  auto compare = [&](const autorb::OrbitSample& s, const std::vector<Complex>& want, std::size_t expect_n) {
    bool simple = true;
    const auto got = locations(s, simple);
    mult = mult && simple && got.size() == expect_n;
    worst = std::max(worst, oracle::match_distance(got, want));
    ++checked;
  };

  const auto ex = autorb::orbit(EntireFunction::exp(), 1.0, 20.0);
  compare(ex, oracle::exp_orbit(1.0, ex.contour_radius), 7);
  const auto cs = autorb::orbit(EntireFunction::cos_sqrt(), 1.0, 200.0);
  compare(cs, oracle::cossqrt_orbit(1.0, cs.contour_radius), 5);
  const Complex zm(0.8, 0.5);
  const auto mo = autorb::orbit(EntireFunction::monomial(5), zm, 2.0);
  compare(mo, oracle::monomial_orbit(5, zm), 5);
  const Complex zq(0.3, 0.2);
  const auto qz = autorb::orbit(EntireFunction::quadratic_zz(), zq, 5.0);
  compare(qz, {zq, -zq - 1.0}, 2);

  // random polynomials of degree <= 6 against dense grid + Newton on p(w) - p(z)
  oracle::Rng rng(2024);
  for (int t = 0; t < 3; ++t) {
    const int deg = 4 + t;
    std::vector<Complex> a(deg + 1);
    for (auto& c : a) c = rng.box(-1.0, 1.0, -1.0, 1.0);
    const Complex z = rng.disk(1.0);
    std::vector<Complex> shifted = a;
    shifted[0] -= oracle::horner(a, z);
    double bound = 0.0;  // Cauchy root bound
    for (int k = 0; k < deg; ++k) bound = std::max(bound, std::abs(shifted[k] / a[deg]));
    const double R = 1.0 + bound;
    const auto d = oracle::differentiate(shifted);
    const auto want = oracle::grid_newton([&](Complex w) { return oracle::horner(shifted, w); },
                                          [&](Complex w) { return oracle::horner(d, w); }, R + 0.5, 0.05);
    const auto s = autorb::orbit(EntireFunction::polynomial(a), z, R + 0.5);
    compare(s, want, static_cast<std::size_t>(deg));
  }
  Outcome o;
  o.pass = worst <= 1e-8 && mult;
  o.detail = std::to_string(checked) + " orbits, max distance " + fmt("%.2e", worst) +
             (mult ? ", multiplicities exact" : ", multiplicity mismatch");
  return o;
}

Outcome pi_squared() {
  const auto r = autorb::verify_vieta_coefficients(EntireFunction::cos_sqrt(), pi * pi, 1, 0.0, 10000);
  const double err = std::abs(r.rhs.real() - pi * pi / 4.0);
  return {r.pass && err <= 1e-3, "series " + fmt("%.8f", r.rhs.real()) + " vs pi^2/4, error " + fmt("%.2e", err)};
}

Outcome jensen() {
  const auto r = autorb::verify_jensen(EntireFunction::exp(), 1.0, 3);
  const bool lhs_ok = std::abs(r.lhs.real() - (1.0 + 4.0 * pi * pi)) <= 1e-9 * (1.0 + 4.0 * pi * pi);
  return {r.pass && lhs_ok && r.rel_err <= 1e-6,
          "product " + fmt("%.10f", r.lhs.real()) + ", relative error " + fmt("%.2e", r.rel_err)};
}

Outcome derivative_sums() {
  struct Case {
    EntireFunction f;
    double R;
  };
  const Case cases[] = {{EntireFunction::exp(), 10.0}, {EntireFunction::cos_sqrt(), 200.0},
                        {EntireFunction::quadratic_zz(), 5.0}};
  oracle::Rng rng(77);
  int passed = 0, total = 0;
  double worst = 0.0;
  std::string first_fail;
  for (const auto& c : cases) {
    for (int i = 0; i < 10; ++i) {
      const Complex z = rng.box(0.2, 2.0, -1.5, 1.5);
      for (int k = 1; k <= 3; ++k) {
        ++total;
        const auto r = autorb::verify_derivative_sums(c.f, z, c.R, k);
        worst = std::max(worst, std::min(r.abs_err, r.rel_err));
        if (r.pass) ++passed;
        else if (first_fail.empty()) first_fail = c.f.name() + " k=" + std::to_string(k);
      }
    }
  }
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " pass, worst error " +
                               fmt("%.2e", worst) + (first_fail.empty() ? "" : ", first failure " + first_fail)};
}

autorb::WimanRadii& wiman_radii() {
  static autorb::WimanRadii wr =
      autorb::wiman_search(EntireFunction::quarter_order(), 0.25, 0.05, 1e2, 1e8, Complex(1.0, 0.0));
  return wr;
}

Outcome vanishing() {
  const auto& wr = wiman_radii();
  const bool spans = wr.radii.size() >= 5 && wr.radii.front().r <= 1e3 && wr.radii.back().r >= 1e7;
  const auto q = autorb::verify_vanishing_sums(EntireFunction::quarter_order(), 1.0, wr, 1);
  autorb::WimanRadii we{1.0, 0.0, {}, false};
  for (double r : {10.0, 20.0, 40.0, 80.0, 160.0}) we.radii.push_back({r, 0.0, 0.0});
  const auto e = autorb::verify_vanishing_sums(EntireFunction::exp(), 1.0, we, 1);
  std::ostringstream d;
  d << wr.radii.size() << " radii in [" << fmt("%.3g", wr.radii.front().r) << ", " << fmt("%.3g", wr.radii.back().r)
    << "], final |S1| " << fmt("%.2e", std::abs(q.lhs)) << (e.pass ? ", exp unexpectedly passes" : ", exp fails as expected");
  return {spans && q.pass && !e.pass, d.str()};
}

Outcome density() {
  const auto& wr = wiman_radii();
  bool ok = true;
  std::string d;
  for (const Complex z : {Complex(1.0, 0.0), Complex(2.0, 1.0)}) {
    const auto r = autorb::verify_circular_density(EntireFunction::quarter_order(), z, wr, 0.25);
    ok = ok && r.pass;
    d += (d.empty() ? "" : "; ") + std::string("z=") + autorb::format_complex(z) + (r.pass ? " increasing" : " not increasing");
  }
  return {ok, d};
}

Outcome fixed_points() {
  const auto crit = autorb::critical_points(EntireFunction::cos_sqrt(), 100.0);
  const double stated[] = {pi * pi, 4.0 * pi * pi};
  bool set_ok = crit.points.size() == 2;
  for (std::size_t i = 0; set_ok && i < 2; ++i)
    set_ok = std::abs(crit.points[i].location - stated[i]) <= 1e-8 * stated[i];
  const auto cs = autorb::verify_fixed_points(EntireFunction::cos_sqrt(), 100.0);  // true set and interlacing
  const auto qz = autorb::verify_fixed_points(EntireFunction::quadratic_zz(), 5.0);
  std::string found;
  for (const auto& p : crit.points) found += (found.empty() ? "" : ", ") + fmt("%.6f", p.location.real());
  std::string d = "Z(f') in |w|<100 = {" + found + "} vs stated {9.869604, 39.478418}";
  d += cs.pass ? "; interlacing holds" : "; interlacing fails";
  d += qz.pass ? "; quadratic double root ok" : "; quadratic double root fails";
  if (!set_ok) d += "; stated set omits 9 pi^2 = 88.83 < 100, a zero of -sin(sqrt w)/(2 sqrt w)";
  return {set_ok && cs.pass && qz.pass, d};
}

Outcome reconstruction() {
  const int n[] = {10, 20, 30};
  const auto a = autorb::verify_reconstruction_partial_sums(EntireFunction::exp(), 1.0, 0.5, n);
  const auto b = autorb::verify_reconstruction_partial_sums(EntireFunction::exp(), Complex(1.5, 0.5), Complex(-1.0, 1.0), n);
  const auto r4 = autorb::reconstruct_low_order(EntireFunction::cos_sqrt(), 4.0, 1.0, 1e4);
  const auto r6 = autorb::reconstruct_low_order(EntireFunction::cos_sqrt(), 4.0, 1.0, 1e6);
  const bool ok = a.pass && b.pass && r4.pass && r4.abs_err <= 1e-2 && r6.pass && r6.abs_err <= 1e-3;
  return {ok, "partial sums n=30 error " + fmt("%.2e", std::max(a.abs_err, b.abs_err)) + "; cos 2 at R=1e4 error " +
                  fmt("%.2e", r4.abs_err) + ", at R=1e6 error " + fmt("%.2e", r6.abs_err)};
}

Outcome exp_g() {
  const Complex ws[] = {-1.5, Complex(-0.7, 0.9), 0.0, Complex(0.8, -1.1), Complex(1.6, 0.4)};
  const Complex zs[] = {Complex(-1.2, 0.5), Complex(0.3, -1.7), 0.7, Complex(1.1, 1.3), Complex(-0.4, -0.9)};
  int passed = 0, total = 0;
  double worst = 0.0;
  for (const Complex w : ws) {
    for (const Complex z : zs) {
      const auto r = autorb::verify_exp_g_closed_form(w, z, 100000);
      ++total;
      passed += r.pass;
      worst = std::max(worst, std::min(r.abs_err, r.rel_err));
    }
  }
  const auto stress = autorb::verify_exp_g_closed_form(1.0, Complex(0.0, pi), 100000);
  ++total;
  passed += stress.pass;
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " pass (incl. z = i pi, error " +
                               fmt("%.2e", stress.abs_err) + "), worst " + fmt("%.2e", worst)};
}

Outcome shift_T() {
  oracle::Rng rng(55);
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Complex w = rng.disk(1.5);
    const Complex z = rng.box(-1.5, 1.5, -1.5, 1.5);
    long t[7];
    for (int k = -3; k <= 3; ++k) {
      const auto s = autorb::compute_shift_T_exp_detailed(k, w, z);
      worst = std::max(worst, s.defect);
      t[k + 3] = s.T;
    }
    ok = ok && t[3] == 0 && t[5] == 2 * t[4];
  }
  return {ok && worst <= 1e-6, "5 points, max defect " + fmt("%.2e", worst) + (ok ? ", T(2) = 2 T(1)" : ", additivity broken")};
}

Outcome negative_moment() {
  const Complex zs[] = {Complex(0.5, 0.1), Complex(1, 1), Complex(-1, 0.3), Complex(0.2, -1.5), Complex(0, pi)};
  const auto r = autorb::verify_negative_moment_g(zs, 100000);
  Complex delta;
  for (const auto& s : r.series) {
    if (s.name == "delta_re" && !s.values.empty()) delta.real(s.values.front());
    if (s.name == "delta_im" && !s.values.empty()) delta.imag(s.values.front());
  }
  return {r.pass, "delta constant to " + fmt("%.2e", r.abs_err) + ", delta = " + autorb::format_complex(delta)};
}

Outcome structural() {
  std::vector<std::pair<std::string, autorb::IdentityReport>> rs;
  rs.emplace_back("nesting exp/w^2",
                  autorb::verify_orbit_nesting(EntireFunction::exp(), EntireFunction::monomial(2), 1.0, 10.0));
  rs.emplace_back("nesting quadratic/w^3", autorb::verify_orbit_nesting(EntireFunction::quadratic_zz(),
                                                                       EntireFunction::monomial(3), Complex(0.5, 0.2), 5.0));
  rs.emplace_back("nesting ng/ng", autorb::verify_orbit_nesting(EntireFunction::ng_factor(0.3),
                                                               EntireFunction::ng_factor(0.2), Complex(0.5, 0.1), 4.0));
  const double grid[] = {5.0, 10.0, 50.0};
  rs.emplace_back("fiber", autorb::verify_fiber_stability({2.0, -3.0, 1.0}, {0.0, 1.0}, grid));
  const Complex cyc[] = {1.0, Complex(0.0, 2.0), -0.5};
  rs.emplace_back("cycle", autorb::verify_cycle_chain(EntireFunction::exp(), cyc));
  const Complex chain[] = {Complex(0.3, 1.0), Complex(-2.0, 0.5), Complex(4.0, -1.0), Complex(1.5, 2.5), 7.0};
  rs.emplace_back("chain", autorb::verify_cycle_chain(EntireFunction::cos_sqrt(), chain));
  const Complex poly[] = {0.0, Complex(1, 1), Complex(-0.5, 2)};
  rs.emplace_back("path length", autorb::verify_path_invariance(EntireFunction::exp(), poly, Complex(0.0, 6.0 * pi)));
  bool ok = true;
  std::string failed;
  for (const auto& [name, r] : rs) {
    ok = ok && r.pass;
    if (!r.pass) failed += " " + name;
  }
  return {ok, std::to_string(rs.size()) + " checks" + (failed.empty() ? " pass" : ", failing:" + failed)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "orbit oracle equivalence", 5.0, orbit_oracles},
      {2, "pi^2/4 symmetric series", 1.0, pi_squared},
      {3, "Jensen product for exp", 2.0, jensen},
      {4, "derivative sums k = 1..3", 30.0, derivative_sums},
      {5, "vanishing sums on Wiman radii", 60.0, vanishing},
      {6, "circular density trend", 0.0, density},
      {7, "fixed points of cos sqrt", 0.0, fixed_points, true},
      {8, "reconstruction from orbits", 0.0, reconstruction},
      {9, "exponential g closed form", 0.0, exp_g},
      {10, "T homomorphism", 0.0, shift_T},
      {11, "negative-moment discrepancy", 0.0, negative_moment},
      {12, "structural checks", 0.0, structural},
  };
  int hard_failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.check();
    } catch (const autorb::Error& e) {
      o = {false, std::string("error ") + std::string(autorb::to_string(e.code())) + ": " + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0.0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.limit_s) + " s limit";
    }
    std::printf("%s criterion %2d  %-32s %7.2f s  %s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.detail.c_str(), !o.pass && c.documented_defect ? " [documented defect, not gating]" : "");
    std::fflush(stdout);
    if (!o.pass && !c.documented_defect) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
