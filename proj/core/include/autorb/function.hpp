#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace autorb {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Highest derivative order exposed through eval_kderiv.
inline constexpr int kMaxPublicDerivative = 6;
/// Families compute jets up to this order; the extra orders serve f' wrappers.
inline constexpr int kMaxJetOrder = 8;

enum class Family {
  monomial,
  quadratic_zz,
  general_polynomial,
  exp,
  cos_sqrt,
  quarter_order,
  poly_times_exp,
  ng_factor,
  composition_tower,
  truncated_series,
  derivative,
};

std::string_view to_string(Family family);

/// A point of a level set together with its multiplicity.
struct OrbitPoint {
  Complex location;
  int multiplicity = 1;
};

/// Derivatives f(w), f'(w), ..., f^(order)(w), each stored as d[k] * exp(log_scale).
///
/// Families with exponential growth pick log_scale so that the mantissas stay
/// representable; polynomial families leave it at zero.
struct Jet {
  std::array<Complex, kMaxJetOrder + 1> d{};
  double log_scale = 0.0;
  int order = 0;

  /// Unscaled derivative; throws EvaluationOverflow if it is not representable.
  Complex value(int k) const;
  /// log|f^(k)(w)|, finite even when the value itself would overflow.
  double log_abs(int k) const;
  /// d[k] - c * exp(-log_scale): the mantissa of f^(k)(w) - c.
  Complex shifted(int k, Complex c) const;
  /// Mantissa of f^(k)(w) - c at a scale `scale` chosen so that neither term overflows.
  Complex shifted_common(int k, Complex c, double& scale) const;
  /// log|f^(k)(w) - c| without forming either term.
  double log_abs_shifted(int k, Complex c) const;
  /// f^(k)(w) / (f(w) - c), evaluated at a common scale.
  Complex ratio(int k, Complex c) const;
  /// 1 / (f(w) - c); underflows to zero far from the level set.
  Complex inverse_shifted(Complex c) const;
};

namespace detail {
class FunctionImpl;
}

/// An immutable entire function. Copies share the underlying representation.
class EntireFunction {
 public:
  static EntireFunction monomial(int n);
  static EntireFunction quadratic_zz();
  /// Coefficients in ascending order a_0, a_1, ..., a_d.
  static EntireFunction polynomial(std::vector<Complex> coeffs);
  static EntireFunction truncated_series(std::vector<Complex> coeffs);
  static EntireFunction exp();
  static EntireFunction cos_sqrt();
  /// (cos w^(1/4) + cosh w^(1/4)) / 2 = sum w^n / (4n)!.
  static EntireFunction quarter_order();
  /// p(w) * exp(g(w)) with both p and g given by ascending coefficients.
  static EntireFunction poly_times_exp(std::vector<Complex> p, std::vector<Complex> g);
  /// c * e^w + w.
  static EntireFunction ng_factor(Complex c);
  /// tower[0] is applied first: tower = {f, h} builds h(f(w)).
  static EntireFunction composition(std::vector<EntireFunction> tower);
  /// The derivative f' as an entire function in its own right.
  static EntireFunction derivative_of(const EntireFunction& f);

  const std::string& name() const;
  Family family() const;

  Jet jet(Complex w, int order) const;
  Complex eval(Complex w) const;
  /// f^(k)(w) from the family's closed form, 0 <= k <= 6.
  Complex eval_kderiv(Complex w, int k) const;

  /// Maclaurin coefficient a_n, when the family can produce it.
  std::optional<Complex> coefficient(int n) const;
  /// a_0..a_K; throws NoCoefficients if the family cannot produce them.
  std::vector<Complex> maclaurin(int K) const;
  /// Exact coefficients for the polynomial families, nullopt otherwise.
  std::optional<std::vector<Complex>> polynomial_coefficients() const;

  std::optional<double> known_order() const;
  std::optional<int> genus() const;

  bool has_orbit_oracle() const;
  /// Closed-form orbit {w : f(w) = f(z), |w| < R}, sorted canonically.
  std::vector<OrbitPoint> orbit_oracle(Complex z, double R) const;

 private:
  explicit EntireFunction(std::shared_ptr<const detail::FunctionImpl> impl);
  std::shared_ptr<const detail::FunctionImpl> impl_;
};

/// Degree-n Maclaurin partial sum as a GeneralPolynomial.
EntireFunction partial_sum(const EntireFunction& f, int n);

struct ModulusExtrema {
  double log_m = 0.0;
  double log_M = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
};

/// log min and log max of |f| on |w| = r, carried in log-magnitude throughout.
ModulusExtrema modulus_extrema(const EntireFunction& f, double r);

struct OrderEstimate {
  double rho = 0.0;
  bool degenerate = false;
};

/// Least-squares slope of log log M_f(r) against log r.
OrderEstimate estimate_order(const EntireFunction& f, std::span<const double> r_grid);

/// Orders points by modulus, ties (relative 1e-12) broken by argument in [0, 2pi).
void sort_canonical(std::vector<OrbitPoint>& points);
void sort_canonical(std::vector<Complex>& points);

}  // namespace autorb
