#pragma once

#include <functional>
#include <span>
#include <vector>

#include "autorb/function.hpp"

namespace autorb {

struct ContourConfig {
  int nodes_initial = 256;  // power of two, at least 16
  int max_doublings = 8;
  double tol_abs = 1e-10;
  double tol_rel = 1e-10;
  /// Smallest accepted |f(w) - c| / (|f(w)| + |c|) on a contour.
  double min_boundary_margin = 1e-3;

  void validate() const;
};

struct QuadratureResult {
  Complex value;
  int nodes_used = 0;
  double est_error = 0.0;
  bool converged = false;
};

/// Circle |w - center| = radius.
struct Circle {
  Complex center{0.0, 0.0};
  double radius = 1.0;
};

using ScalarIntegrand = std::function<Complex(Complex)>;
/// Writes `out.size()` integrand components at w.
using VectorIntegrand = std::function<void(Complex, std::span<Complex>)>;

/// (1/2 pi i) times the contour integral of g over |w| = R, trapezoid rule with node doubling.
QuadratureResult circle_integral(const ScalarIntegrand& g, double R, const ContourConfig& cfg = {});
QuadratureResult circle_integral(const ScalarIntegrand& g, Circle circle, const ContourConfig& cfg = {});

/// Several integrands sharing one node set; convergence is judged per component.
/// Doubling stops once the first `judged` components have converged (all when 0).
std::vector<QuadratureResult> circle_integral(const VectorIntegrand& g, std::size_t width, Circle circle,
                                              const ContourConfig& cfg = {}, std::size_t judged = 0);

/// Radius within 5% of R_requested whose circle keeps |f(w) - f(z)| away from zero.
double safe_radius(const EntireFunction& f, Complex z, double R_requested, const ContourConfig& cfg = {});

/// The same search for the level set {g = c} on circles about `center`, with
/// candidate radii restricted to [lo, hi] and tried outward from `preferred`.
double safe_level_radius(const EntireFunction& g, Complex c, Complex center, double preferred, double lo,
                         double hi, const ContourConfig& cfg = {});

/// Candidate radii in search order: `preferred`, then alternately outward and
/// inward in `steps` equal steps until the window [lo, hi] is exhausted.
std::vector<double> radius_candidates(double preferred, double lo, double hi, int steps = 16);

/// True when the circle passes the boundary test used by the radius search.
bool circle_is_safe(const EntireFunction& g, Complex c, Circle circle, const ContourConfig& cfg = {});

}  // namespace autorb
