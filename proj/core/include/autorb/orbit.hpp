#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autorb/contour.hpp"
#include "autorb/function.hpp"

namespace autorb {

/// Power sums of the level-set points inside a circle, in the normalized
/// coordinate u = (w - center) / scale: moments[l] = sum u_j^l.
struct MomentVector {
  Complex z;
  double R = 0.0;
  Complex center{0.0, 0.0};
  double scale = 1.0;
  std::vector<Complex> moments;
  std::vector<double> errors;
};

struct OrbitSample {
  Complex z;
  double R = 0.0;               // requested radius
  double contour_radius = 0.0;  // radius actually integrated over; all points lie inside it
  Complex level;                // the common value f(z)
  std::vector<OrbitPoint> points;
  std::vector<double> residuals;  // |f(point) - f(z)|
  int count = 0;
  std::vector<std::string> notes;
};

struct CountSample {
  double r_requested = 0.0;
  double r_used = 0.0;
  int n = 0;
};

struct CountingProfile {
  Complex z;
  std::vector<CountSample> samples;
  double rho_hat = 0.0;
  double rho_used = 0.0;
  double upper_density = 0.0;
  double lower_density = 0.0;
  bool degenerate = false;
};

struct WimanEntry {
  double r = 0.0;
  double log_m = 0.0;
  double log_M = 0.0;
};

struct WimanRadii {
  double rho = 0.0;
  double epsilon = 0.0;
  std::vector<WimanEntry> radii;
  /// False for hand-built radius lists that skipped the minimum-modulus check.
  bool verified = true;
};

/// Level sets with at most this many points inside one circle are solved directly.
inline constexpr int kMaxPointsPerSolve = 8;

/// round((1/2 pi i) * integral of f'/(f - f(z)) over |w| = R).
int orbit_count(const EntireFunction& f, Complex z, double R, const ContourConfig& cfg = {});

/// Zero count of g - c inside an arbitrary circle.
int level_count(const EntireFunction& g, Complex c, Circle circle, const ContourConfig& cfg = {});

/// m_l = (1/2 pi i) * integral of w^l f'/(f - f(z)) over |w| = R, l = 0..L.
MomentVector orbit_moments(const EntireFunction& f, Complex z, double R, int L, const ContourConfig& cfg = {});

/// Roots (repeated by multiplicity) of the monic polynomial with the given power sums.
std::vector<Complex> moments_to_points(const MomentVector& mv);

/// Orbit of z inside the disk, recovered from contour moments and polished by Newton.
OrbitSample orbit(const EntireFunction& f, Complex z, double R, const ContourConfig& cfg = {});

/// {w : g(w) = c, |w| < R} by the same engine; sample.z is left at zero.
OrbitSample level_set(const EntireFunction& g, Complex c, double R, const ContourConfig& cfg = {});

/// Zeros of f' inside |w| < R.
OrbitSample critical_points(const EntireFunction& f, double R, const ContourConfig& cfg = {});

/// k-th derivative of each orbit branch at z, k = 1..3.
std::vector<Complex> derivative_orbit(const EntireFunction& f, const OrbitSample& s, int k);

/// n(r, z) over the grid with fitted convergence exponent and densities.
CountingProfile counting_profile(const EntireFunction& f, Complex z, std::span<const double> r_grid,
                                 std::optional<double> rho = std::nullopt, const ContourConfig& cfg = {});

/// Radii in [r_lo, r_hi] with log m_f(r) > (cos pi rho - eps) log M_f(r). When z is
/// given every radius is also safe for the orbit of z.
WimanRadii wiman_search(const EntireFunction& f, double rho, double epsilon, double r_lo, double r_hi,
                        std::optional<Complex> z = std::nullopt, const ContourConfig& cfg = {});

}  // namespace autorb
