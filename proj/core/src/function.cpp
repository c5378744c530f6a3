#include "autorb/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "autorb/errors.hpp"
#include "function_impl.hpp"

namespace autorb {

namespace {

constexpr double kLogMax = 709.0;

// Common scale for f^(k) and c: returns S with both d*e^(ls-S) and c*e^(-S) representable.
double common_scale(const Jet& j, int k, Complex c) {
  double s = j.log_scale + std::log(std::max(std::abs(j.d[k]), 1e-300));
  if (c != Complex{0.0, 0.0}) s = std::max(s, std::log(std::abs(c)));
  return s;
}

Complex scaled(Complex mantissa, double shift) {
  if (mantissa == Complex{0.0, 0.0}) return mantissa;
  return std::polar(std::exp(std::log(std::abs(mantissa)) + shift), std::arg(mantissa));
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::monomial: return "monomial";
    case Family::quadratic_zz: return "quadratic_zz";
    case Family::general_polynomial: return "general_polynomial";
    case Family::exp: return "exp";
    case Family::cos_sqrt: return "cos_sqrt";
    case Family::quarter_order: return "quarter_order";
    case Family::poly_times_exp: return "poly_times_exp";
    case Family::ng_factor: return "ng_factor";
    case Family::composition_tower: return "composition_tower";
    case Family::truncated_series: return "truncated_series";
    case Family::derivative: return "derivative";
  }
  return "unknown";
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::precondition: return "Precondition";
    case ErrorCode::unsupported_derivative_order: return "UnsupportedDerivativeOrder";
    case ErrorCode::zero_leading_coefficient: return "ZeroLeadingCoefficient";
    case ErrorCode::evaluation_overflow: return "EvaluationOverflow";
    case ErrorCode::no_coefficients: return "NoCoefficients";
    case ErrorCode::not_converged: return "NotConverged";
    case ErrorCode::no_safe_radius: return "NoSafeRadius";
    case ErrorCode::ambiguous_count: return "AmbiguousCount";
    case ErrorCode::inconsistent_moments: return "InconsistentMoments";
    case ErrorCode::critical_orbit_point: return "CriticalOrbitPoint";
    case ErrorCode::none_found: return "NoneFound";
    case ErrorCode::orbit_incomplete: return "OrbitIncomplete";
    case ErrorCode::order_too_high: return "OrderTooHigh";
    case ErrorCode::tied_moduli: return "TiedModuli";
    case ErrorCode::l_near_one: return "LNearOne";
    case ErrorCode::near_pole: return "NearPole";
    case ErrorCode::branch_tracking_failed: return "BranchTrackingFailed";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Jet

Complex Jet::value(int k) const {
  if (d[k] == Complex{0.0, 0.0}) return d[k];
  const double la = log_abs(k);
  if (la > kLogMax) fail(ErrorCode::evaluation_overflow, "derivative value is not representable");
  return std::polar(std::exp(la), std::arg(d[k]));
}

double Jet::log_abs(int k) const {
  const double a = std::abs(d[k]);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(a) + log_scale;
}

Complex Jet::shifted(int k, Complex c) const {
  if (c == Complex{0.0, 0.0}) return d[k];
  return d[k] - scaled(c, -log_scale);
}

Complex Jet::shifted_common(int k, Complex c, double& scale) const {
  scale = common_scale(*this, k, c);
  return scaled(d[k], log_scale - scale) - scaled(c, -scale);
}

double Jet::log_abs_shifted(int k, Complex c) const {
  double s = 0.0;
  const Complex m = shifted_common(k, c, s);
  const double a = std::abs(m);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(a) + s;
}

Complex Jet::ratio(int k, Complex c) const {
  double s = 0.0;
  const Complex den = shifted_common(0, c, s);
  return scaled(d[k], log_scale - s) / den;
}

Complex Jet::inverse_shifted(Complex c) const {
  double s = 0.0;
  const Complex den = shifted_common(0, c, s);
  const double la = -std::log(std::abs(den)) - s;
  if (la > kLogMax) fail(ErrorCode::evaluation_overflow, "1/(f - c) is not representable");
  return std::polar(std::exp(la), -std::arg(den));
}

// ---------------------------------------------------------------- factories

EntireFunction::EntireFunction(std::shared_ptr<const detail::FunctionImpl> impl) : impl_(std::move(impl)) {}

EntireFunction EntireFunction::monomial(int n) {
  require(n >= 1, "monomial degree must be positive");
  std::vector<Complex> c(n + 1, Complex{0.0, 0.0});
  c[n] = 1.0;
  return EntireFunction(detail::make_polynomial(std::move(c), Family::monomial, "monomial(" + std::to_string(n) + ")"));
}

EntireFunction EntireFunction::quadratic_zz() {
  return EntireFunction(detail::make_polynomial({0.0, 1.0, 1.0}, Family::quadratic_zz, "z^2+z"));
}

EntireFunction EntireFunction::polynomial(std::vector<Complex> coeffs) {
  return EntireFunction(detail::make_polynomial(std::move(coeffs), Family::general_polynomial, ""));
}

EntireFunction EntireFunction::truncated_series(std::vector<Complex> coeffs) {
  return EntireFunction(detail::make_polynomial(std::move(coeffs), Family::truncated_series, ""));
}

EntireFunction EntireFunction::exp() { return EntireFunction(detail::make_exp()); }
EntireFunction EntireFunction::cos_sqrt() { return EntireFunction(detail::make_cos_sqrt()); }
EntireFunction EntireFunction::quarter_order() { return EntireFunction(detail::make_quarter_order()); }

EntireFunction EntireFunction::poly_times_exp(std::vector<Complex> p, std::vector<Complex> g) {
  return EntireFunction(detail::make_poly_times_exp(std::move(p), std::move(g)));
}

EntireFunction EntireFunction::ng_factor(Complex c) { return EntireFunction(detail::make_ng_factor(c)); }

EntireFunction EntireFunction::composition(std::vector<EntireFunction> tower) {
  if (tower.size() == 1) return tower.front();
  return EntireFunction(detail::make_composition(std::move(tower)));
}

EntireFunction EntireFunction::derivative_of(const EntireFunction& f) {
  return EntireFunction(detail::make_derivative(f));
}

// ---------------------------------------------------------------- methods

const std::string& EntireFunction::name() const { return impl_->name(); }
Family EntireFunction::family() const { return impl_->family(); }

Jet EntireFunction::jet(Complex w, int order) const {
  require(std::isfinite(w.real()) && std::isfinite(w.imag()), "evaluation point must be finite");
  return impl_->jet(w, order);
}

Complex EntireFunction::eval(Complex w) const { return jet(w, 0).value(0); }

Complex EntireFunction::eval_kderiv(Complex w, int k) const {
  require(k >= 0, "derivative order must be nonnegative");
  if (k > kMaxPublicDerivative)
    fail(ErrorCode::unsupported_derivative_order, "derivative order " + std::to_string(k) + " exceeds 6");
  return jet(w, k).value(k);
}

std::optional<Complex> EntireFunction::coefficient(int n) const { return impl_->coefficient(n); }

std::vector<Complex> EntireFunction::maclaurin(int K) const {
  require(K >= 0, "coefficient count must be nonnegative");
  std::vector<Complex> out;
  out.reserve(K + 1);
  for (int n = 0; n <= K; ++n) {
    const auto a = impl_->coefficient(n);
    if (!a) fail(ErrorCode::no_coefficients, name() + " has no coefficient a_" + std::to_string(n));
    out.push_back(*a);
  }
  return out;
}

std::optional<std::vector<Complex>> EntireFunction::polynomial_coefficients() const {
  return impl_->polynomial_coefficients();
}

std::optional<double> EntireFunction::known_order() const { return impl_->known_order(); }
std::optional<int> EntireFunction::genus() const { return impl_->genus(); }
bool EntireFunction::has_orbit_oracle() const { return impl_->has_orbit_oracle(); }

std::vector<OrbitPoint> EntireFunction::orbit_oracle(Complex z, double R) const {
  require(R > 0.0, "radius must be positive");
  return impl_->orbit_oracle(z, R);
}

// ---------------------------------------------------------------- free functions

EntireFunction partial_sum(const EntireFunction& f, int n) {
  require(n >= 1, "partial sum degree must be positive");
  auto c = f.maclaurin(n);
  if (c.back() == Complex{0.0, 0.0})
    fail(ErrorCode::zero_leading_coefficient, "a_" + std::to_string(n) + " vanishes for " + f.name());
  return EntireFunction::polynomial(std::move(c));
}

namespace {

double log_abs_at(const EntireFunction& f, double r, double theta) {
  return f.jet(std::polar(r, theta), 0).log_abs(0);
}

// Golden-section search for a minimum of sign*log|f| on [a, b].
std::pair<double, double> golden(const EntireFunction& f, double r, double a, double b, double sign) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = sign * log_abs_at(f, r, x1);
  double f2 = sign * log_abs_at(f, r, x2);
  while (b - a > 1e-8) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = sign * log_abs_at(f, r, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = sign * log_abs_at(f, r, x2);
    }
  }
  return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

ModulusExtrema modulus_extrema(const EntireFunction& f, double r) {
  require(r > 0.0 && std::isfinite(r), "radius must be positive");
  constexpr int kGrid = 4096;
  std::vector<double> v(kGrid);
  for (int i = 0; i < kGrid; ++i) v[i] = log_abs_at(f, r, kTwoPi * i / kGrid);

  ModulusExtrema out;
  for (const double sign : {1.0, -1.0}) {
    // local extrema of sign*v on the periodic grid, best few refined
    std::vector<int> idx;
    for (int i = 0; i < kGrid; ++i) {
      const double a = sign * v[(i + kGrid - 1) % kGrid];
      const double b = sign * v[i];
      const double c = sign * v[(i + 1) % kGrid];
      if (b <= a && b <= c) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return sign * v[a] < sign * v[b]; });
    if (idx.size() > 4) idx.resize(4);
    double best = sign * v[idx.front()];
    double best_theta = kTwoPi * idx.front() / kGrid;
    for (const int i : idx) {
      if (!std::isfinite(v[i])) continue;
      const double h = kTwoPi / kGrid;
      const auto [theta, val] = golden(f, r, kTwoPi * i / kGrid - h, kTwoPi * i / kGrid + h, sign);
      if (val < best) {
        best = val;
        best_theta = theta;
      }
    }
    best_theta = std::fmod(best_theta + kTwoPi, kTwoPi);
    if (sign > 0) {
      out.log_m = best;
      out.theta_min = best_theta;
    } else {
      out.log_M = -best;
      out.theta_max = best_theta;
    }
  }
  return out;
}

OrderEstimate estimate_order(const EntireFunction& f, std::span<const double> r_grid) {
  require(r_grid.size() >= 4, "order fit needs at least four radii");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    require(r_grid[i] > 0.0, "radii must be positive");
    if (i) require(r_grid[i] > r_grid[i - 1], "radii must increase");
  }
  require(std::log10(r_grid.back() / r_grid.front()) >= 3.0 - 1e-12, "radii must span three decades");
  if (f.polynomial_coefficients()) return {0.0, true};

  std::vector<double> x;
  std::vector<double> y;
  for (const double r : r_grid) {
    const double log_M = modulus_extrema(f, r).log_M;
    if (!(log_M > 0.0)) return {0.0, true};
    x.push_back(std::log(r));
    y.push_back(std::log(log_M));
  }
  for (std::size_t i = 1; i < y.size(); ++i)
    if (!(y[i] > y[i - 1])) return {0.0, true};
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return {sxy / sxx, false};
}

namespace {

bool canonical_less(Complex a, Complex b) {
  const double ra = std::abs(a);
  const double rb = std::abs(b);
  if (std::abs(ra - rb) > 1e-12 * std::max({ra, rb, 1e-300})) return ra < rb;
  auto angle = [](Complex c) {
    const double t = std::arg(c);
    return t < 0.0 ? t + kTwoPi : t;
  };
  return angle(a) < angle(b);
}

}  // namespace

void sort_canonical(std::vector<OrbitPoint>& points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const OrbitPoint& a, const OrbitPoint& b) { return canonical_less(a.location, b.location); });
}

void sort_canonical(std::vector<Complex>& points) { std::stable_sort(points.begin(), points.end(), canonical_less); }

}  // namespace autorb
