#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autorb/contour.hpp"
#include "autorb/function.hpp"
#include "autorb/orbit.hpp"

namespace autorb {

enum class Verdict { pass, fail, xfail, inconclusive, diagnostic };

std::string_view to_string(Verdict v);

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

/// One checked identity: both sides, the error, and the verdict.
struct IdentityReport {
  std::string identity_id;
  std::vector<std::pair<std::string, std::string>> inputs;
  Complex lhs;
  Complex rhs;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Verdict verdict = Verdict::fail;
  std::string notes;
  double runtime_ms = 0.0;
  std::vector<NamedSeries> series;
};

/// Q_lambda(u) = u + u^2/2 + ... + u^lambda/lambda.
struct QLambda {
  int lambda = 0;

  Complex operator()(Complex u) const;
  Complex derivative(Complex u) const;
};

std::string format_complex(Complex z);
std::string format_real(double x);

IdentityReport verify_poly_vieta(const EntireFunction& p, Complex z, const ContourConfig& cfg = {});

/// With `symmetric_terms` set (CosSqrt only) the right side is the closed-form
/// orbit summed over |k| <= K in +-k pairs; otherwise the orbit comes from the
/// engine inside |w| < R with a first-order tail correction.
IdentityReport verify_vieta_coefficients(const EntireFunction& f, Complex z, int n, double R,
                                         std::optional<int> symmetric_terms = std::nullopt,
                                         const ContourConfig& cfg = {});

IdentityReport verify_jensen(const EntireFunction& f, Complex z, int n_cut, const ContourConfig& cfg = {});

IdentityReport verify_derivative_sums(const EntireFunction& f, Complex z, double R, int k,
                                      const ContourConfig& cfg = {});

/// S_k(R_j) = sum of k-th orbit derivatives inside each radius, by contour.
IdentityReport verify_vanishing_sums(const EntireFunction& f, Complex z, const WimanRadii& wr, int k,
                                     const ContourConfig& cfg = {});

IdentityReport verify_circular_density(const EntireFunction& f, Complex z, const WimanRadii& wr, double rho,
                                       const ContourConfig& cfg = {});

IdentityReport verify_fixed_points(const EntireFunction& f, double R, const ContourConfig& cfg = {});

IdentityReport verify_reconstruction_partial_sums(const EntireFunction& f, Complex w, Complex z,
                                                  std::span<const int> n_list);

IdentityReport reconstruct_low_order(const EntireFunction& f, Complex z, Complex w, double R,
                                     const ContourConfig& cfg = {});

/// exp(g(w, z)) in closed form for f = exp.
Complex exp_g_closed(Complex w, Complex z);

IdentityReport verify_exp_g_closed_form(Complex w, Complex z, int K);

struct ShiftResult {
  long T = 0;
  double defect = 0.0;
  int steps = 0;
  Complex z_used;
};

/// Branch shift of g(w, .) along z -> z + 2 pi i k, by continuous argument tracking.
ShiftResult compute_shift_T_exp_detailed(int k, Complex w, Complex z);
long compute_shift_T_exp(int k, Complex w, Complex z);

/// T(k) for k = -3..3 at one (w, z): integer-valued, T(0) = 0 and T(2) = 2 T(1).
IdentityReport verify_shift_homomorphism(Complex w, Complex z);

IdentityReport verify_negative_moment_g(std::span<const Complex> z_list, int K);

IdentityReport verify_cycle_chain(const EntireFunction& f, std::span<const Complex> z_list);

IdentityReport verify_orbit_nesting(const EntireFunction& f, const EntireFunction& h, Complex z, double R,
                                    const ContourConfig& cfg = {});

IdentityReport verify_fiber_stability(const std::vector<Complex>& p, const std::vector<Complex>& g,
                                      std::span<const double> R_grid, const ContourConfig& cfg = {});

/// Length of the f-image of a polyline: sum over segments of the integral of |f'(gamma)| |gamma'|.
double path_length(const EntireFunction& f, std::span<const Complex> polyline);

/// l_f(polyline) against l_f(polyline + shift) for a translation that preserves f.
IdentityReport verify_path_invariance(const EntireFunction& f, std::span<const Complex> polyline, Complex shift);

IdentityReport folner_ratios(const EntireFunction& f, Complex z, std::span<const double> R_schedule,
                             std::span<const int> degree_schedule, const ContourConfig& cfg = {});

}  // namespace autorb
