// Concrete function families. Every family produces jets in scaled form so
// that callers can work with log|f| and ratios such as f'/(f - c) far beyond
// the range where f itself is representable.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "autorb/errors.hpp"
#include "autorb/polynomial.hpp"
#include "function_impl.hpp"

namespace autorb::detail {

std::vector<OrbitPoint> FunctionImpl::orbit_oracle(Complex, double) const {
  fail(ErrorCode::precondition, "no closed-form orbit oracle for " + name());
}

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void check_order(int order) {
  require(order >= 0 && order <= kMaxJetOrder, "jet order out of range");
}

std::vector<OrbitPoint> within(std::vector<OrbitPoint> pts, double R) {
  std::erase_if(pts, [R](const OrbitPoint& p) { return !(std::abs(p.location) < R); });
  sort_canonical(pts);
  return pts;
}

// Merges coincident closed-form points (they arise at critical values).
std::vector<OrbitPoint> merge_exact(const std::vector<Complex>& pts) {
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, std::abs(p));
  return cluster_points(pts, 1e-9 * scale);
}

std::string format_coeffs(const std::vector<Complex>& c) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << ',';
    if (c[i].imag() == 0.0) os << c[i].real();
    else os << c[i].real() << (c[i].imag() < 0 ? "" : "+") << c[i].imag() << 'i';
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------- polynomials

enum class PolyOracle { generic, monomial, quadratic_zz };

class PolynomialImpl final : public FunctionImpl {
 public:
  PolynomialImpl(std::vector<Complex> coeffs, Family family, std::string name, PolyOracle oracle)
      : FunctionImpl(std::move(name), family), c_(std::move(coeffs)), oracle_(oracle) {
    while (c_.size() > 1 && c_.back() == Complex{0.0, 0.0}) c_.pop_back();
    require(!c_.empty(), "polynomial needs at least one coefficient");
    for (const auto& a : c_)
      require(std::isfinite(a.real()) && std::isfinite(a.imag()), "non-finite coefficient");
  }

  Jet jet(Complex w, int order) const override {
    check_order(order);
    Jet j;
    j.order = order;
    std::vector<Complex> b = c_;
    for (int k = 0; k <= order; ++k) {
      if (b.empty()) break;
      Complex r = b.back();
      std::vector<Complex> q(b.size() - 1);
      for (std::size_t i = b.size() - 1; i-- > 0;) {
        q[i] = r;
        r = r * w + b[i];
      }
      j.d[k] = r * factorial(k);
      b = std::move(q);
    }
    return j;
  }

  std::optional<Complex> coefficient(int n) const override {
    if (n < 0) return std::nullopt;
    return n < static_cast<int>(c_.size()) ? c_[n] : Complex{0.0, 0.0};
  }

  std::optional<std::vector<Complex>> polynomial_coefficients() const override { return c_; }
  std::optional<double> known_order() const override { return 0.0; }
  std::optional<int> genus() const override { return 0; }
  bool has_orbit_oracle() const override { return c_.size() >= 2; }

  std::vector<OrbitPoint> orbit_oracle(Complex z, double R) const override {
    require(c_.size() >= 2, "constant polynomial has no orbit");
    const int d = static_cast<int>(c_.size()) - 1;
    if (oracle_ == PolyOracle::monomial) {
      if (z == Complex{0.0, 0.0}) return within({{Complex{0.0, 0.0}, d}}, R);
      std::vector<Complex> pts;
      for (int k = 0; k < d; ++k) pts.push_back(z * std::polar(1.0, kTwoPi * k / d));
      return within(merge_exact(pts), R);
    }
    if (oracle_ == PolyOracle::quadratic_zz) return within(merge_exact({z, -z - 1.0}), R);
    std::vector<Complex> shifted = c_;
    shifted[0] -= horner(c_, z);
    const auto roots = polynomial_roots(shifted);
    double scale = 1.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    return within(cluster_points(roots, 1e-6 * scale), R);
  }

 private:
  std::vector<Complex> c_;
  PolyOracle oracle_;
};

// ---------------------------------------------------------------- exponential

class ExpImpl final : public FunctionImpl {
 public:
  ExpImpl() : FunctionImpl("exp", Family::exp) {}

  Jet jet(Complex w, int order) const override {
    check_order(order);
    Jet j;
    j.order = order;
    j.log_scale = w.real();
    const Complex m = std::polar(1.0, w.imag());
    for (int k = 0; k <= order; ++k) j.d[k] = m;
    return j;
  }

  std::optional<Complex> coefficient(int n) const override {
    if (n < 0) return std::nullopt;
    return Complex{1.0 / factorial(n), 0.0};
  }
  std::optional<double> known_order() const override { return 1.0; }
  std::optional<int> genus() const override { return 1; }
  bool has_orbit_oracle() const override { return true; }

  std::vector<OrbitPoint> orbit_oracle(Complex z, double R) const override {
    std::vector<Complex> pts;
    const auto k_lo = static_cast<long>(std::floor((-R - z.imag()) / kTwoPi)) - 1;
    const auto k_hi = static_cast<long>(std::ceil((R - z.imag()) / kTwoPi)) + 1;
    for (long k = k_lo; k <= k_hi; ++k) pts.push_back(z + Complex{0.0, kTwoPi * k});
    return within(merge_exact(pts), R);
  }
};

// ------------------------------------------------ root-exponential families
//
// f(w) = weight * sum_j exp(omega_j * t), t = w^(1/p). The omega set is closed
// under multiplication by p-th roots of unity, so the value does not depend on
// the branch of t. Near the origin the Maclaurin series is used instead.

class RootExpImpl : public FunctionImpl {
 public:
  RootExpImpl(std::string name, Family family, int p, std::vector<Complex> omegas,
              double series_radius, double order)
      : FunctionImpl(std::move(name), family),
        p_(p),
        omegas_(std::move(omegas)),
        weight_(1.0 / static_cast<double>(omegas_.size())),
        series_radius_(series_radius),
        order_(order) {}

  Jet jet(Complex w, int order) const override {
    check_order(order);
    Jet j;
    j.order = order;
    if (std::abs(w) < series_radius_) {
      for (int k = 0; k <= order; ++k) {
        const auto& c = dcoef_[k];
        Complex acc{0.0, 0.0};
        for (std::size_t n = c.size(); n-- > 0;) acc = acc * w + c[n];
        j.d[k] = acc;
      }
      return j;
    }
    Complex t = std::sqrt(w);
    for (int q = 2; q < p_; q *= 2) t = std::sqrt(t);
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& om : omegas_) s = std::max(s, (om * t).real());
    j.log_scale = s;
    const Complex inv_t = 1.0 / t;
    const double inv_p = 1.0 / static_cast<double>(p_);
    for (const auto& om : omegas_) {
      const Complex e = weight_ * std::exp(om * t - s);
      // Laurent coefficients of q_k in powers of 1/t: D_w^k exp(om t) = exp(om t) q_k.
      std::array<Complex, 4 * (kMaxJetOrder + 1) + 1> c{};
      std::array<Complex, 4 * (kMaxJetOrder + 1) + 1> next{};
      c[0] = 1.0;
      int top = 0;  // highest nonzero index
      for (int k = 0; k <= order; ++k) {
        Complex q{0.0, 0.0};
        for (int m = top; m >= 0; --m) q = q * inv_t + c[m];
        j.d[k] += e * q;
        if (k == order) break;
        std::fill(next.begin(), next.begin() + top + p_ + 1, Complex{0.0, 0.0});
        for (int m = 0; m <= top; ++m) {
          next[m + p_ - 1] += om * c[m] * inv_p;
          next[m + p_] -= static_cast<double>(m) * c[m] * inv_p;
        }
        top += p_;
        std::copy(next.begin(), next.begin() + top + 1, c.begin());
      }
    }
    return j;
  }

  std::optional<Complex> coefficient(int n) const override {
    if (n < 0) return std::nullopt;
    if (n < static_cast<int>(a_.size())) return Complex{a_[n], 0.0};
    return Complex{0.0, 0.0};  // below the smallest subnormal
  }
  std::optional<double> known_order() const override { return order_; }
  std::optional<int> genus() const override { return 0; }

 protected:
  void build_tables(std::vector<double> a) {
    a_ = std::move(a);
    constexpr int kTerms = 60;
    for (int k = 0; k <= kMaxJetOrder; ++k) {
      std::vector<double> c(kTerms, 0.0);
      for (int n = 0; n < kTerms; ++n) {
        double v = a_[n + k];
        for (int m = n + 1; m <= n + k; ++m) v *= m;
        c[n] = v;
      }
      dcoef_[k] = std::move(c);
    }
  }

  int p_;
  std::vector<Complex> omegas_;
  double weight_;
  double series_radius_;
  double order_;
  std::vector<double> a_;
  std::array<std::vector<double>, kMaxJetOrder + 1> dcoef_;
};

class CosSqrtImpl final : public RootExpImpl {
 public:
  CosSqrtImpl()
      : RootExpImpl("cossqrt", Family::cos_sqrt, 2, {Complex{0, 1}, Complex{0, -1}}, 64.0, 0.5) {
    std::vector<double> a(96);
    a[0] = 1.0;
    for (int n = 1; n < 96; ++n) a[n] = -a[n - 1] / ((2.0 * n - 1.0) * (2.0 * n));
    build_tables(std::move(a));
  }

  bool has_orbit_oracle() const override { return true; }

  // cos sqrt(w) = cos sqrt(z)  <=>  sqrt(w) = sqrt(z) + 2 pi k (up to sign).
  std::vector<OrbitPoint> orbit_oracle(Complex z, double R) const override {
    const Complex s = std::sqrt(z);
    const double root_r = std::sqrt(R);
    const auto k_lo = static_cast<long>(std::floor((-root_r - s.real()) / kTwoPi)) - 1;
    const auto k_hi = static_cast<long>(std::ceil((root_r - s.real()) / kTwoPi)) + 1;
    std::vector<Complex> pts;
    for (long k = k_lo; k <= k_hi; ++k) {
      const Complex u = s + kTwoPi * static_cast<double>(k);
      pts.push_back(u * u);
    }
    return within(merge_exact(pts), R);
  }
};

class QuarterOrderImpl final : public RootExpImpl {
 public:
  QuarterOrderImpl()
      : RootExpImpl("quarter", Family::quarter_order, 4,
                    {Complex{1, 0}, Complex{0, 1}, Complex{-1, 0}, Complex{0, -1}}, 4096.0, 0.25) {
    std::vector<double> a(96);
    a[0] = 1.0;
    for (int n = 1; n < 96; ++n) {
      const double m = 4.0 * n;
      a[n] = a[n - 1] / ((m - 3.0) * (m - 2.0) * (m - 1.0) * m);
    }
    build_tables(std::move(a));
  }
};

// ---------------------------------------------------------- p(w) exp(g(w))

// Taylor coefficients of exp(sum_{i>=1} g[i] e^i), truncated at `order`.
std::vector<Complex> exp_series(const std::vector<Complex>& g, int order) {
  std::vector<Complex> e(order + 1, Complex{0.0, 0.0});
  e[0] = 1.0;
  for (int n = 1; n <= order; ++n) {
    Complex acc{0.0, 0.0};
    for (int i = 1; i <= n && i < static_cast<int>(g.size()); ++i)
      acc += static_cast<double>(i) * g[i] * e[n - i];
    e[n] = acc / static_cast<double>(n);
  }
  return e;
}

// Taylor coefficients p^(i)(w)/i! of a polynomial around w.
std::vector<Complex> taylor_at(std::vector<Complex> b, Complex w) {
  std::vector<Complex> t;
  while (!b.empty()) {
    Complex r = b.back();
    std::vector<Complex> q(b.size() - 1);
    for (std::size_t i = b.size() - 1; i-- > 0;) {
      q[i] = r;
      r = r * w + b[i];
    }
    t.push_back(r);
    b = std::move(q);
  }
  return t;
}

class PolyTimesExpImpl final : public FunctionImpl {
 public:
  PolyTimesExpImpl(std::vector<Complex> p, std::vector<Complex> g)
      : FunctionImpl("polyexp" + format_coeffs(p) + format_coeffs(g), Family::poly_times_exp),
        p_(std::move(p)),
        g_(std::move(g)) {
    require(!p_.empty() && !g_.empty(), "poly_times_exp needs p and g");
  }

  Jet jet(Complex w, int order) const override {
    check_order(order);
    const auto pt = taylor_at(p_, w);
    const auto gt = taylor_at(g_, w);
    const auto e = exp_series(gt, order);
    Jet j;
    j.order = order;
    j.log_scale = gt[0].real();
    const Complex phase = std::polar(1.0, gt[0].imag());
    for (int n = 0; n <= order; ++n) {
      Complex acc{0.0, 0.0};
      for (int i = 0; i <= n && i < static_cast<int>(pt.size()); ++i) acc += pt[i] * e[n - i];
      j.d[n] = acc * phase * factorial(n);
    }
    return j;
  }

  std::optional<Complex> coefficient(int n) const override {
    if (n < 0) return std::nullopt;
    const auto e = exp_series(g_, n);
    Complex acc{0.0, 0.0};
    for (int i = 0; i <= n && i < static_cast<int>(p_.size()); ++i) acc += p_[i] * e[n - i];
    return acc * std::exp(g_[0]);
  }

  std::optional<double> known_order() const override {
    return static_cast<double>(g_.size() - 1);
  }
  std::optional<int> genus() const override { return static_cast<int>(g_.size() - 1); }

 private:
  std::vector<Complex> p_;
  std::vector<Complex> g_;
};

// ---------------------------------------------------------- c e^w + w

class NgFactorImpl final : public FunctionImpl {
 public:
  explicit NgFactorImpl(Complex c) : FunctionImpl("ng(" + format_coeffs({c}) + ")", Family::ng_factor), c_(c) {}

  Jet jet(Complex w, int order) const override {
    check_order(order);
    Jet j;
    j.order = order;
    const double s = std::max(w.real(), 0.0);
    j.log_scale = s;
    const Complex ce = c_ * std::exp(w - s);
    const double damp = std::exp(-s);
    for (int k = 0; k <= order; ++k) j.d[k] = ce;
    j.d[0] += w * damp;
    if (order >= 1) j.d[1] += damp;
    return j;
  }

  std::optional<Complex> coefficient(int n) const override {
    if (n < 0) return std::nullopt;
    return c_ / factorial(n) + (n == 1 ? 1.0 : 0.0);
  }
  std::optional<double> known_order() const override { return 1.0; }
  std::optional<int> genus() const override { return 1; }

 private:
  Complex c_;
};

// ---------------------------------------------------------- composition

class CompositionImpl final : public FunctionImpl {
 public:
  explicit CompositionImpl(std::vector<EntireFunction> tower)
      : FunctionImpl(make_name(tower), Family::composition_tower), tower_(std::move(tower)) {
    require(!tower_.empty(), "composition needs at least one function");
  }

  Jet jet(Complex w, int order) const override {
    check_order(order);
    Jet cur = tower_.front().jet(w, order);
    for (std::size_t level = 1; level < tower_.size(); ++level) {
      std::array<Complex, kMaxJetOrder + 1> u{};
      for (int k = 0; k <= order; ++k) u[k] = cur.value(k);
      const Jet outer = tower_[level].jet(u[0], order);
      // delta(e) = sum_{i>=1} u_i/i! e^i; composite Taylor = sum_j outer_j/j! delta^j
      std::vector<Complex> delta(order + 1, Complex{0.0, 0.0});
      for (int i = 1; i <= order; ++i) delta[i] = u[i] / factorial(i);
      std::vector<Complex> power(order + 1, Complex{0.0, 0.0});
      power[0] = 1.0;
      std::vector<Complex> taylor(order + 1, Complex{0.0, 0.0});
      for (int jdx = 0; jdx <= order; ++jdx) {
        const Complex coef = outer.d[jdx] / factorial(jdx);
        for (int n = 0; n <= order; ++n) taylor[n] += coef * power[n];
        std::vector<Complex> next(order + 1, Complex{0.0, 0.0});
        for (int a = 0; a <= order; ++a)
          for (int b = 1; a + b <= order; ++b) next[a + b] += power[a] * delta[b];
        power = std::move(next);
      }
      Jet res;
      res.order = order;
      res.log_scale = outer.log_scale;
      for (int n = 0; n <= order; ++n) res.d[n] = taylor[n] * factorial(n);
      cur = res;
    }
    return cur;
  }

  std::optional<Complex> coefficient(int n) const override {
    if (n < 0 || n > kMaxJetOrder) return std::nullopt;
    return jet(Complex{0.0, 0.0}, n).value(n) / factorial(n);
  }

 private:
  static std::string make_name(const std::vector<EntireFunction>& tower) {
    std::string name = "compose(";
    for (std::size_t i = 0; i < tower.size(); ++i) {
      if (i) name += ',';
      name += tower[i].name();
    }
    return name + ')';
  }

  std::vector<EntireFunction> tower_;
};

// ---------------------------------------------------------- f'

class DerivativeImpl final : public FunctionImpl {
 public:
  explicit DerivativeImpl(EntireFunction f)
      : FunctionImpl("d(" + f.name() + ")", Family::derivative), f_(std::move(f)) {}

  Jet jet(Complex w, int order) const override {
    require(order + 1 <= kMaxJetOrder, "derivative jet order out of range");
    const Jet inner = f_.jet(w, order + 1);
    Jet j;
    j.order = order;
    j.log_scale = inner.log_scale;
    for (int k = 0; k <= order; ++k) j.d[k] = inner.d[k + 1];
    return j;
  }

  std::optional<Complex> coefficient(int n) const override {
    const auto a = f_.coefficient(n + 1);
    if (!a) return std::nullopt;
    return *a * static_cast<double>(n + 1);
  }

  std::optional<std::vector<Complex>> polynomial_coefficients() const override {
    auto c = f_.polynomial_coefficients();
    if (!c) return std::nullopt;
    std::vector<Complex> d;
    for (std::size_t i = 1; i < c->size(); ++i) d.push_back((*c)[i] * static_cast<double>(i));
    if (d.empty()) d.emplace_back(0.0, 0.0);
    return d;
  }

  std::optional<double> known_order() const override { return f_.known_order(); }

 private:
  EntireFunction f_;
};

}  // namespace

std::shared_ptr<const FunctionImpl> make_polynomial(std::vector<Complex> coeffs, Family family,
                                                    std::string name) {
  PolyOracle oracle = PolyOracle::generic;
  if (family == Family::monomial) oracle = PolyOracle::monomial;
  if (family == Family::quadratic_zz) oracle = PolyOracle::quadratic_zz;
  if (name.empty()) name = (family == Family::truncated_series ? "series" : "poly") + format_coeffs(coeffs);
  return std::make_shared<PolynomialImpl>(std::move(coeffs), family, std::move(name), oracle);
}

std::shared_ptr<const FunctionImpl> make_exp() { return std::make_shared<ExpImpl>(); }
std::shared_ptr<const FunctionImpl> make_cos_sqrt() { return std::make_shared<CosSqrtImpl>(); }
std::shared_ptr<const FunctionImpl> make_quarter_order() { return std::make_shared<QuarterOrderImpl>(); }

std::shared_ptr<const FunctionImpl> make_poly_times_exp(std::vector<Complex> p, std::vector<Complex> g) {
  return std::make_shared<PolyTimesExpImpl>(std::move(p), std::move(g));
}

std::shared_ptr<const FunctionImpl> make_ng_factor(Complex c) { return std::make_shared<NgFactorImpl>(c); }

std::shared_ptr<const FunctionImpl> make_composition(std::vector<EntireFunction> tower) {
  return std::make_shared<CompositionImpl>(std::move(tower));
}

std::shared_ptr<const FunctionImpl> make_derivative(EntireFunction f) {
  return std::make_shared<DerivativeImpl>(std::move(f));
}

}  // namespace autorb::detail
