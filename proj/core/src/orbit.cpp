#include "autorb/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "autorb/errors.hpp"
#include "autorb/polynomial.hpp"

namespace autorb {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr int kMaxDepth = 14;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

ContourConfig count_config(const ContourConfig& cfg) {
  ContourConfig cc = cfg;
  cc.max_doublings = std::max(cfg.max_doublings, 12);
  return cc;
}

int round_count(const QuadratureResult& r) {
  if (!finite(r.value)) fail(ErrorCode::ambiguous_count, "count integral is not finite");
  if (!r.converged && r.est_error > 1e-7)
    fail(ErrorCode::ambiguous_count,
         "count integral did not converge (est_error " + std::to_string(r.est_error) + "); contour too close to the level set");
  const double n = std::round(r.value.real());
  const double defect = std::abs(r.value - Complex{n, 0.0});
  if (!(defect <= 1e-6))
    fail(ErrorCode::ambiguous_count, "count integral " + std::to_string(r.value.real()) + " is not an integer");
  return static_cast<int>(n);
}

MomentVector circle_moments(const EntireFunction& g, Complex c, Circle circle, double scale, int L,
                            const ContourConfig& cfg, std::size_t judged = 0) {
  const VectorIntegrand integrand = [&](Complex w, std::span<Complex> out) {
    const Complex r = g.jet(w, 1).ratio(1, c);
    const Complex u = (w - circle.center) / scale;
    Complex p = r;
    for (auto& o : out) {
      o = p;
      p *= u;
    }
  };
  const auto res = circle_integral(integrand, static_cast<std::size_t>(L) + 1, circle, cfg, judged);
  MomentVector mv;
  mv.R = circle.radius;
  mv.center = circle.center;
  mv.scale = scale;
  for (const auto& q : res) {
    mv.moments.push_back(q.value);
    mv.errors.push_back(q.est_error);
  }
  return mv;
}

struct SafeCount {
  double radius = 0.0;
  int n = 0;
  MomentVector moments;  // normalized by the radius, orders 0..L
};

// First candidate radius that is both safe and yields a clean integer count.
// The moments needed for a direct solve come from the same node set.
SafeCount safe_count(const EntireFunction& g, Complex c, Complex center, const std::vector<double>& candidates,
                     const ContourConfig& cfg, int L = 0) {
  for (const double r : candidates) {
    const Circle circle{center, r};
    if (!circle_is_safe(g, c, circle, cfg)) continue;
    try {
      MomentVector mv = circle_moments(g, c, circle, r, L, cfg, 1);
      const int n = round_count({mv.moments[0], 0, mv.errors[0],
                                 mv.errors[0] <= std::max(cfg.tol_abs, cfg.tol_rel * std::abs(mv.moments[0]))});
      return {r, n, std::move(mv)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ambiguous_count && e.code() != ErrorCode::not_converged) throw;
    }
  }
  fail(ErrorCode::no_safe_radius, "no safe radius among " + std::to_string(candidates.size()) + " candidates");
}

SafeCount safe_count(const EntireFunction& g, Complex c, Complex center, double preferred, double lo, double hi,
                     const ContourConfig& cfg, int L = 0) {
  return safe_count(g, c, center, radius_candidates(preferred, lo, hi), cfg, L);
}

// Candidates ordered by a coarse estimate of the distance from the circle to
// the level set (Newton step length |g - c| / |g'|); trapezoid convergence
// improves with that distance.
std::vector<double> ranked_candidates(const EntireFunction& g, Complex c, Complex center, double lo, double hi) {
  constexpr int kCoarse = 128;
  std::vector<std::pair<double, double>> scored;
  for (const double r : radius_candidates(lo, lo, hi, 8)) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kCoarse; ++j) {
      const Complex w = center + std::polar(r, kTwoPi * (j + 0.5) / kCoarse);
      dmin = std::min(dmin, 1.0 / std::abs(g.jet(w, 1).ratio(1, c)));
    }
    scored.emplace_back(std::isnan(dmin) ? 0.0 : dmin, r);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> out;
  for (const auto& [d, r] : scored) out.push_back(r);
  return out;
}

// Power sums about the centroid of the points: sum (u - a)^l by the binomial
// expansion. Centering keeps the power-sum-to-root map well conditioned when
// the points sit off the centre of the circle.
MomentVector recenter(const MomentVector& mv) {
  const std::size_t L = mv.moments.size();
  if (L < 2 || std::abs(mv.moments[0]) < 0.5) return mv;
  const Complex a = mv.moments[1] / mv.moments[0];
  MomentVector out = mv;
  for (std::size_t l = 1; l < L; ++l) {
    Complex sum{0.0, 0.0};
    double binom = 1.0;
    Complex apow = 1.0;  // (-a)^(l-k), built from k = l downwards
    for (std::size_t k = l + 1; k-- > 0;) {
      sum += binom * mv.moments[k] * apow;
      binom = binom * static_cast<double>(k) / static_cast<double>(l - k + 1);
      apow *= -a;
    }
    out.moments[l] = sum;
  }
  out.center = mv.center + mv.scale * a;
  return out;
}

struct Polished {
  Complex w;
  bool diverged = false;
};

Polished newton_polish(const EntireFunction& g, Complex c, Complex w0, double reach) {
  Complex w = w0;
  for (int it = 0; it < 50; ++it) {
    const Complex step = 1.0 / g.jet(w, 1).ratio(1, c);
    if (!finite(step)) return {w0, true};
    w -= step;
    if (std::abs(w - w0) > reach) return {w0, true};
    if (std::abs(step) <= 1e-12 * (1.0 + std::abs(w))) break;
  }
  return {w, false};
}

// Newton on g^(m-1) recovers an m-fold point as a simple root.
Complex refine_multiple(const EntireFunction& g, Complex w0, int m, double reach) {
  if (m - 1 > kMaxJetOrder - 1) return w0;
  Complex w = w0;
  for (int it = 0; it < 50; ++it) {
    const Jet j = g.jet(w, m);
    const Complex step = j.d[m - 1] / j.d[m];
    if (!finite(step)) return w0;
    w -= step;
    if (std::abs(w - w0) > reach) return w0;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(w))) break;
  }
  return w;
}

struct Engine {
  const EntireFunction& g;
  Complex c;
  ContourConfig cfg;
  double R = 0.0;  // master contour radius
  std::vector<std::string>* notes = nullptr;

  std::vector<OrbitPoint> solve_disk(Circle circle, const MomentVector& probe, int n) const {
    MomentVector mv = probe;
    if (static_cast<int>(mv.moments.size()) < n + 1) mv = circle_moments(g, c, circle, circle.radius, n, count_config(cfg));
    mv.moments.resize(n + 1);
    const auto raw = moments_to_points(recenter(mv));
    std::vector<Complex> polished;
    polished.reserve(raw.size());
    for (const auto& w0 : raw) {
      const Polished p = newton_polish(g, c, w0, 0.5 * circle.radius);
      if (p.diverged && notes)
        notes->push_back("PolishDiverged: point near (" + std::to_string(w0.real()) + ", " +
                         std::to_string(w0.imag()) + ") kept unpolished");
      polished.push_back(p.w);
    }
    const double merge = 1e-6 * circle.radius;
    auto pts = cluster_points(polished, merge);
    for (auto& p : pts)
      if (p.multiplicity >= 2) p.location = refine_multiple(g, p.location, p.multiplicity, merge);
    return pts;
  }

  void solve_square(Complex center, double h, int depth, std::vector<OrbitPoint>& out) const {
    if (std::abs(center) - h * kSqrt2 >= R) return;
    const double pref = h * kSqrt2;
    const SafeCount sc = safe_count(g, c, center, ranked_candidates(g, c, center, pref, 1.25 * pref),
                                    count_config(cfg), kMaxPointsPerSolve);
    if (sc.n == 0) return;
    std::vector<OrbitPoint> found;
    if (sc.n > kMaxPointsPerSolve && depth < kMaxDepth) {
      for (const double sx : {-0.5, 0.5})
        for (const double sy : {-0.5, 0.5}) solve_square(center + Complex{sx * h, sy * h}, 0.5 * h, depth + 1, out);
      return;
    }
    found = solve_disk(Circle{center, sc.radius}, sc.moments, sc.n);
    for (const auto& p : found) {
      const Complex d = p.location - center;
      const bool inside = d.real() >= -h && d.real() < h && d.imag() >= -h && d.imag() < h;
      if (inside && std::abs(p.location) < R) out.push_back(p);
    }
  }
};

// Points reported by two neighbouring squares are kept once.
std::vector<OrbitPoint> dedupe(std::vector<OrbitPoint> pts, double R) {
  std::vector<OrbitPoint> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (auto& q : out) {
      if (std::abs(p.location - q.location) <= 1e-8 * std::max(1.0, R)) {
        q.multiplicity = std::max(q.multiplicity, p.multiplicity);
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

OrbitSample solve_level(const EntireFunction& g, Complex c, double R, const ContourConfig& cfg) {
  require(R > 0.0 && std::isfinite(R), "radius must be positive");
  cfg.validate();
  OrbitSample s;
  s.R = R;
  s.level = c;
  const SafeCount master =
      safe_count(g, c, Complex{0.0, 0.0}, R, 0.95 * R, 1.05 * R, count_config(cfg), kMaxPointsPerSolve);
  s.contour_radius = master.radius;
  s.count = master.n;
  if (master.n == 0) return s;

  Engine eng{g, c, cfg, master.radius, &s.notes};
  std::vector<OrbitPoint> pts;
  if (master.n <= kMaxPointsPerSolve) {
    for (const auto& p : eng.solve_disk(Circle{Complex{0.0, 0.0}, master.radius}, master.moments, master.n))
      if (std::abs(p.location) < master.radius) pts.push_back(p);
  } else {
    // The quadtree is shifted off the axes so that symmetric level sets do not
    // sit on square edges; a second shift is tried if the tally disagrees.
    const Complex shifts[] = {{0.0123, 0.0071}, {-0.0217, 0.0153}, {0.0311, -0.0289}};
    for (const Complex shift : shifts) {
      const double h = master.radius * (1.0 + std::max(std::abs(shift.real()), std::abs(shift.imag())));
      const Complex root = master.radius * shift;
      std::vector<OrbitPoint> found;
      for (const double sx : {-0.5, 0.5})
        for (const double sy : {-0.5, 0.5})
          eng.solve_square(root + Complex{sx * h, sy * h}, 0.5 * h, 1, found);
      pts = dedupe(std::move(found), master.radius);
      int total = 0;
      for (const auto& p : pts) total += p.multiplicity;
      if (total == master.n) break;
      s.notes.push_back("subdivision tally " + std::to_string(total) + " differs from count " +
                        std::to_string(master.n) + "; retrying with shifted grid");
    }
  }

  int total = 0;
  for (const auto& p : pts) total += p.multiplicity;
  if (total != master.n)
    fail(ErrorCode::orbit_incomplete,
         "recovered " + std::to_string(total) + " points, contour count is " + std::to_string(master.n));
  sort_canonical(pts);
  s.points = std::move(pts);
  for (const auto& p : s.points) s.residuals.push_back(std::exp(g.jet(p.location, 0).log_abs_shifted(0, c)));
  return s;
}

Complex jet_div(const Jet& a, int ka, const Jet& b, int kb) {
  if (a.d[ka] == Complex{0.0, 0.0}) return {0.0, 0.0};
  const double la = a.log_abs(ka) - b.log_abs(kb);
  return std::polar(std::exp(la), std::arg(a.d[ka]) - std::arg(b.d[kb]));
}

}  // namespace

int level_count(const EntireFunction& g, Complex c, Circle circle, const ContourConfig& cfg) {
  const auto r = circle_integral([&](Complex w) { return g.jet(w, 1).ratio(1, c); }, circle, count_config(cfg));
  return round_count(r);
}

int orbit_count(const EntireFunction& f, Complex z, double R, const ContourConfig& cfg) {
  require(R > 0.0 && std::isfinite(R), "radius must be positive");
  return level_count(f, f.eval(z), Circle{Complex{0.0, 0.0}, R}, cfg);
}

MomentVector orbit_moments(const EntireFunction& f, Complex z, double R, int L, const ContourConfig& cfg) {
  require(R > 0.0 && std::isfinite(R), "radius must be positive");
  require(L >= 0 && L <= 64, "moment order must lie in [0, 64]");
  const Complex c = f.eval(z);
  MomentVector mv = circle_moments(f, c, Circle{Complex{0.0, 0.0}, R}, 1.0, L, count_config(cfg));
  mv.z = z;
  for (std::size_t l = 0; l < mv.moments.size(); ++l) {
    if (!finite(mv.moments[l]))
      fail(ErrorCode::not_converged, "moment " + std::to_string(l) + " is not finite");
    if (mv.errors[l] > 1e-8 * std::max(1.0, std::abs(mv.moments[l])))
      fail(ErrorCode::not_converged, "moment " + std::to_string(l) + " did not converge");
  }
  round_count({mv.moments[0], 0, mv.errors[0], true});
  return mv;
}

std::vector<Complex> moments_to_points(const MomentVector& mv) {
  require(!mv.moments.empty(), "moment vector is empty");
  require(mv.scale > 0.0, "moment scale must be positive");
  const double n_real = std::round(mv.moments[0].real());
  require(std::abs(mv.moments[0] - Complex{n_real, 0.0}) <= 1e-6, "m_0 is not an integer");
  const int N = static_cast<int>(n_real);
  require(N >= 1, "moment vector describes no points");
  require(static_cast<int>(mv.moments.size()) >= N + 1, "need moments up to order N");

  const std::vector<Complex> p(mv.moments.begin() + 1, mv.moments.begin() + N + 1);
  const auto e = newton_identities(p);
  // monic w^N - e_1 w^(N-1) + e_2 w^(N-2) - ..., ascending order
  std::vector<Complex> coeffs(N + 1);
  for (int i = 0; i <= N; ++i) {
    const int k = N - i;
    coeffs[i] = (k % 2 == 0 ? 1.0 : -1.0) * e[k];
  }
  const auto roots = polynomial_roots(coeffs);

  for (int l = 1; l <= N; ++l) {
    Complex sum{0.0, 0.0};
    double mag = 0.0;
    for (const auto& r : roots) {
      const Complex rl = std::pow(r, l);
      sum += rl;
      mag += std::abs(rl);
    }
    const double ref = std::max({mag, std::abs(p[l - 1]), 1e-300});
    if (std::abs(sum - p[l - 1]) > 1e-4 * ref)
      fail(ErrorCode::inconsistent_moments, "reconstructed power sum " + std::to_string(l) + " deviates");
  }
  std::vector<Complex> out;
  out.reserve(roots.size());
  for (const auto& r : roots) out.push_back(mv.center + mv.scale * r);
  return out;
}

OrbitSample level_set(const EntireFunction& g, Complex c, double R, const ContourConfig& cfg) {
  return solve_level(g, c, R, cfg);
}

OrbitSample orbit(const EntireFunction& f, Complex z, double R, const ContourConfig& cfg) {
  OrbitSample s = solve_level(f, f.eval(z), R, cfg);
  s.z = z;
  for (const auto& p : s.points)
    if (p.multiplicity >= 2)
      s.notes.push_back("multiple point of multiplicity " + std::to_string(p.multiplicity) + " at (" +
                        std::to_string(p.location.real()) + ", " + std::to_string(p.location.imag()) + ")");
  return s;
}

OrbitSample critical_points(const EntireFunction& f, double R, const ContourConfig& cfg) {
  return solve_level(EntireFunction::derivative_of(f), Complex{0.0, 0.0}, R, cfg);
}

std::vector<Complex> derivative_orbit(const EntireFunction& f, const OrbitSample& s, int k) {
  require(k >= 1 && k <= 3, "derivative order must lie in 1..3");
  const Jet jz = f.jet(s.z, k);
  std::vector<Complex> out;
  out.reserve(s.points.size());
  for (const auto& p : s.points) {
    if (p.multiplicity != 1)
      fail(ErrorCode::critical_orbit_point, "orbit point has multiplicity " + std::to_string(p.multiplicity));
    const Jet jp = f.jet(p.location, k);
    if (!(jp.log_abs(1) > std::log(1e-9)))
      fail(ErrorCode::critical_orbit_point, "f' nearly vanishes at an orbit point");
    const Complex d1 = jet_div(jz, 1, jp, 1);
    if (k == 1) {
      out.push_back(d1);
      continue;
    }
    const Complex r2 = jet_div(jp, 2, jp, 1);  // f''(phi)/f'(phi)
    const Complex d2 = jet_div(jz, 2, jp, 1) - d1 * d1 * r2;
    if (k == 2) {
      out.push_back(d2);
      continue;
    }
    const Complex r3 = jet_div(jp, 3, jp, 1);
    out.push_back(jet_div(jz, 3, jp, 1) - 3.0 * d1 * d2 * r2 - d1 * d1 * d1 * r3);
  }
  return out;
}

CountingProfile counting_profile(const EntireFunction& f, Complex z, std::span<const double> r_grid,
                                 std::optional<double> rho, const ContourConfig& cfg) {
  require(r_grid.size() >= 2, "radius grid needs at least two points");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    require(r_grid[i] > 0.0 && std::isfinite(r_grid[i]), "radii must be positive");
    if (i) require(r_grid[i] > r_grid[i - 1], "radii must increase");
  }
  require(std::log10(r_grid.back() / r_grid.front()) >= 2.0 - 1e-12, "radius grid must span two decades");
  if (rho) require(*rho >= 0.0, "density exponent must be nonnegative");

  CountingProfile prof;
  prof.z = z;
  const Complex c = f.eval(z);
  for (const double r : r_grid) {
    const SafeCount sc = safe_count(f, c, Complex{0.0, 0.0}, r, 0.95 * r, 1.05 * r, count_config(cfg));
    prof.samples.push_back({r, sc.radius, sc.n});
  }

  const std::size_t half = prof.samples.size() / 2;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = half; i < prof.samples.size(); ++i) {
    if (prof.samples[i].n <= 0) continue;
    x.push_back(std::log(prof.samples[i].r_used));
    y.push_back(std::log(static_cast<double>(prof.samples[i].n)));
  }
  const bool constant = std::all_of(prof.samples.begin() + static_cast<long>(half), prof.samples.end(),
                                    [&](const CountSample& s) { return s.n == prof.samples[half].n; });
  if (constant || x.size() < 2) {
    prof.degenerate = true;
    prof.rho_hat = 0.0;
  } else {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    prof.rho_hat = sxy / sxx;
  }

  prof.rho_used = rho.value_or(prof.rho_hat);
  const double r_top = prof.samples.back().r_used;
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& s : prof.samples) {
    if (s.r_used < r_top / 10.0 * (1.0 - 1e-12)) continue;
    const double d = static_cast<double>(s.n) / std::pow(s.r_used, prof.rho_used);
    hi = std::max(hi, d);
    lo = std::min(lo, d);
  }
  prof.upper_density = hi;
  prof.lower_density = lo;
  return prof;
}

WimanRadii wiman_search(const EntireFunction& f, double rho, double epsilon, double r_lo, double r_hi,
                        std::optional<Complex> z, const ContourConfig& cfg) {
  require(rho > 0.0 && rho < 0.5, "Wiman search needs 0 < rho < 1/2");
  const double cpr = std::cos(kPi * rho);
  require(epsilon > 0.0 && epsilon < cpr, "epsilon must lie in (0, cos(pi rho))");
  require(r_lo > 0.0 && r_hi > r_lo, "radius range must be increasing and positive");
  const double factor = cpr - epsilon;
  auto holds = [&](double r, WimanEntry& e) {
    const auto ex = modulus_extrema(f, r);
    e = {r, ex.log_m, ex.log_M};
    return ex.log_M > 0.0 && ex.log_m > factor * ex.log_M;
  };

  constexpr int kPerDecade = 12;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::log10(r_hi / r_lo) * kPerDecade)));
  std::vector<WimanEntry> found;
  const Complex c = z ? f.eval(*z) : Complex{0.0, 0.0};
  for (int i = 0; i <= steps; ++i) {
    double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / steps);
    WimanEntry e;
    if (!holds(r, e)) continue;
    if (z) {
      double adjusted = 0.0;
      try {
        adjusted = safe_level_radius(f, c, Complex{0.0, 0.0}, r, 0.95 * r, 1.05 * r, cfg);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::no_safe_radius) throw;
        continue;
      }
      if (adjusted != r && !holds(adjusted, e)) continue;
    }
    if (!found.empty() && !(e.r > found.back().r)) continue;
    found.push_back(e);
  }
  if (found.empty()) fail(ErrorCode::none_found, "no Wiman radius in the requested range");

  // Thin to at most eight radii, evenly spread in log r, endpoints kept.
  constexpr std::size_t kKeep = 8;
  WimanRadii out{rho, epsilon, {}, true};
  if (found.size() <= kKeep) {
    out.radii = std::move(found);
  } else {
    for (std::size_t i = 0; i < kKeep; ++i) {
      const std::size_t idx = (i * (found.size() - 1) + (kKeep - 1) / 2) / (kKeep - 1);
      if (out.radii.empty() || found[idx].r > out.radii.back().r) out.radii.push_back(found[idx]);
    }
  }
  return out;
}

}  // namespace autorb
