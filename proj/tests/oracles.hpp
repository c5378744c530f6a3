#pragma once

// Reference values computed without the library: closed-form orbits, Horner
// evaluation and a dense-grid Newton solver. Nothing here calls the engine.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

struct Rng {
  explicit Rng(unsigned long long seed) : gen(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  C box(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }
  C disk(double r) {
    const double rho = r * std::sqrt(uniform(0.0, 1.0));
    return std::polar(rho, uniform(0.0, 2.0 * pi));
  }

  std::mt19937_64 gen;
};

inline void sort_points(std::vector<C>& v) {
  std::sort(v.begin(), v.end(), [](C a, C b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb))) return ma < mb;
    auto arg = [](C w) {
      double t = std::arg(w);
      return t < 0 ? t + 2.0 * pi : t;
    };
    return arg(a) < arg(b);
  });
}

// e^w = e^z  <=>  w = z + 2 pi i k.
inline std::vector<C> exp_orbit(C z, double R) {
  std::vector<C> out;
  const int kmax = static_cast<int>(R / (2.0 * pi)) + 2;
  for (int k = -kmax; k <= kmax; ++k) {
    const C w = z + C(0.0, 2.0 * pi * k);
    if (std::abs(w) < R) out.push_back(w);
  }
  sort_points(out);
  return out;
}

// cos sqrt w = cos sqrt z  <=>  sqrt w = +-sqrt z + 2 pi k, so w = (sqrt z + 2 pi k)^2.
inline std::vector<C> cossqrt_orbit(C z, double R) {
  std::vector<C> out;
  const C s = std::sqrt(z);
  const int kmax = static_cast<int>(std::sqrt(R) / (2.0 * pi)) + 3;
  for (int k = -kmax; k <= kmax; ++k) {
    const C w = (s + 2.0 * pi * k) * (s + 2.0 * pi * k);
    if (std::abs(w) < R) out.push_back(w);
  }
  sort_points(out);
  return out;
}

inline std::vector<C> monomial_orbit(int n, C z) {
  std::vector<C> out;
  for (int k = 0; k < n; ++k) out.push_back(z * std::polar(1.0, 2.0 * pi * k / n));
  sort_points(out);
  return out;
}

inline C horner(const std::vector<C>& a, C w) {
  C acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * w + *it;
  return acc;
}

inline std::vector<C> differentiate(const std::vector<C>& a) {
  std::vector<C> d;
  for (std::size_t k = 1; k < a.size(); ++k) d.push_back(a[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(0.0);
  return d;
}

// Distinct solutions of F = 0 in |w| < R: Newton from every node of a square
// grid of the given spacing, deduplicated at `merge`.
inline std::vector<C> grid_newton(const std::function<C(C)>& F, const std::function<C(C)>& dF, double R,
                                  double spacing, double merge = 1e-7) {
  std::vector<C> roots;
  const int n = static_cast<int>(std::ceil(2.0 * R / spacing));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      C w(-R + i * spacing + 0.37 * spacing, -R + j * spacing + 0.41 * spacing);
      bool ok = false;
      for (int it = 0; it < 80; ++it) {
        const C d = dF(w);
        if (d == 0.0) break;
        const C step = F(w) / d;
        w -= step;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w) > 4.0 * R) break;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) {
          ok = true;
          break;
        }
      }
      if (!ok || std::abs(w) >= R) continue;
      bool seen = false;
      for (const C& r : roots) seen = seen || std::abs(r - w) < merge;
      if (!seen) roots.push_back(w);
    }
  }
  sort_points(roots);
  return roots;
}

// Largest distance under a greedy one-to-one nearest matching; infinity on a size mismatch.
inline double match_distance(std::vector<C> a, std::vector<C> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const C& x : a) {
    auto best = b.begin();
    for (auto it = b.begin(); it != b.end(); ++it)
      if (std::abs(*it - x) < std::abs(*best - x)) best = it;
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace oracle
