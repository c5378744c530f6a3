#include "autorb/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "autorb/errors.hpp"

namespace autorb {

namespace {

// Neumaier compensated summation, one accumulator per real component.
struct Accumulator {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
    else c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

struct ComplexAccumulator {
  Accumulator re;
  Accumulator im;
  void add(Complex z) {
    re.add(z.real());
    im.add(z.imag());
  }
  Complex value() const { return {re.value(), im.value()}; }
};

double tolerance_for(const ContourConfig& cfg, Complex value) {
  return std::max(cfg.tol_abs, cfg.tol_rel * std::abs(value));
}

}  // namespace

void ContourConfig::validate() const {
  require(nodes_initial >= 16 && (nodes_initial & (nodes_initial - 1)) == 0,
          "nodes_initial must be a power of two, at least 16");
  require(max_doublings >= 1 && max_doublings <= 24, "max_doublings must lie in [1, 24]");
  require(tol_abs > 0.0 && tol_rel > 0.0, "tolerances must be positive");
  require(min_boundary_margin > 0.0 && min_boundary_margin < 1.0, "boundary margin must lie in (0, 1)");
}

std::vector<QuadratureResult> circle_integral(const VectorIntegrand& g, std::size_t width, Circle circle,
                                              const ContourConfig& cfg, std::size_t judged) {
  cfg.validate();
  require(circle.radius > 0.0 && std::isfinite(circle.radius), "contour radius must be positive");
  require(width >= 1, "integrand width must be positive");
  if (judged == 0 || judged > width) judged = width;

  std::vector<ComplexAccumulator> acc(width);
  std::vector<Complex> buf(width);
  auto add_node = [&](double theta) {
    const Complex e = std::polar(1.0, theta);
    const Complex w = circle.center + circle.radius * e;
    std::fill(buf.begin(), buf.end(), Complex{0.0, 0.0});
    g(w, buf);
    for (std::size_t i = 0; i < width; ++i) acc[i].add(buf[i] * (circle.radius * e));
  };

  long M = cfg.nodes_initial;
  for (long j = 0; j < M; ++j) add_node(kTwoPi * static_cast<double>(j) / static_cast<double>(M));
  std::vector<QuadratureResult> out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = {acc[i].value() / static_cast<double>(M), static_cast<int>(M), 0.0, false};

  for (int d = 0; d < cfg.max_doublings; ++d) {
    for (long j = 0; j < M; ++j)
      add_node(kTwoPi * static_cast<double>(2 * j + 1) / static_cast<double>(2 * M));
    M *= 2;
    bool all = true;
    for (std::size_t i = 0; i < width; ++i) {
      const Complex v = acc[i].value() / static_cast<double>(M);
      const double err = std::abs(v - out[i].value);
      out[i] = {v, static_cast<int>(M), err, err <= tolerance_for(cfg, v)};
      if (i < judged) all = all && out[i].converged;
    }
    if (all) break;
  }
  return out;
}

QuadratureResult circle_integral(const ScalarIntegrand& g, Circle circle, const ContourConfig& cfg) {
  const VectorIntegrand wrap = [&g](Complex w, std::span<Complex> out) { out[0] = g(w); };
  return circle_integral(wrap, 1, circle, cfg).front();
}

QuadratureResult circle_integral(const ScalarIntegrand& g, double R, const ContourConfig& cfg) {
  return circle_integral(g, Circle{Complex{0.0, 0.0}, R}, cfg);
}

bool circle_is_safe(const EntireFunction& g, Complex c, Circle circle, const ContourConfig& cfg) {
  const double log_c = c == Complex{0.0, 0.0} ? -std::numeric_limits<double>::infinity() : std::log(std::abs(c));
  const double log_margin = std::log(cfg.min_boundary_margin);
  // Grid refinement stops once f - c turns by at most pi/4 between neighbours
  // wherever it comes close to cancelling.
  for (long M = 1024; M <= (1L << 18); M *= 2) {
    std::vector<double> log_ratio(M);
    std::vector<double> phase(M);
    for (long j = 0; j < M; ++j) {
      const Complex w = circle.center + std::polar(circle.radius, kTwoPi * static_cast<double>(j) / static_cast<double>(M));
      const Jet jt = g.jet(w, 0);
      const double log_f = jt.log_abs(0);
      const double hi = std::max(log_f, log_c);
      const double log_sum = hi + std::log(std::exp(log_f - hi) + std::exp(log_c - hi));
      const double log_diff = jt.log_abs_shifted(0, c);
      log_ratio[j] = log_diff - log_sum;
      if (!(log_ratio[j] > log_margin)) return false;
      double s = 0.0;
      const Complex m = jt.shifted_common(0, c, s);
      phase[j] = std::arg(m);
    }
    bool resolved = true;
    for (long j = 0; j < M && resolved; ++j) {
      const long k = (j + 1) % M;
      if (std::min(log_ratio[j], log_ratio[k]) > std::log(0.5)) continue;
      double dphi = std::abs(phase[k] - phase[j]);
      dphi = std::min(dphi, kTwoPi - dphi);
      if (dphi > kPi / 4.0) resolved = false;
    }
    if (resolved) return true;
  }
  return false;
}

std::vector<double> radius_candidates(double preferred, double lo, double hi, int steps) {
  require(preferred > 0.0 && lo > 0.0 && lo <= preferred && preferred <= hi, "invalid radius window");
  require(steps >= 1, "candidate step count must be positive");
  const double step = std::max(preferred - lo, hi - preferred) / steps;
  std::vector<double> candidates{preferred};
  for (int i = 1; i <= steps && step > 0.0; ++i) {
    if (preferred + i * step <= hi * (1.0 + 1e-12)) candidates.push_back(preferred + i * step);
    if (preferred - i * step >= lo * (1.0 - 1e-12)) candidates.push_back(preferred - i * step);
  }
  return candidates;
}

double safe_level_radius(const EntireFunction& g, Complex c, Complex center, double preferred, double lo,
                         double hi, const ContourConfig& cfg) {
  cfg.validate();
  for (const double r : radius_candidates(preferred, lo, hi))
    if (circle_is_safe(g, c, Circle{center, r}, cfg)) return r;
  fail(ErrorCode::no_safe_radius, "no safe radius in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

double safe_radius(const EntireFunction& f, Complex z, double R_requested, const ContourConfig& cfg) {
  require(R_requested > 0.0 && std::isfinite(R_requested), "radius must be positive");
  const Complex c = f.eval(z);
  return safe_level_radius(f, c, Complex{0.0, 0.0}, R_requested, 0.95 * R_requested, 1.05 * R_requested, cfg);
}

}  // namespace autorb
