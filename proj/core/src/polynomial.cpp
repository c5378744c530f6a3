#include "autorb/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "autorb/errors.hpp"

namespace autorb {

Complex horner(std::span<const Complex> coeffs, Complex w) {
  Complex acc{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * w + *it;
  return acc;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct HornerEval {
  Complex p;
  Complex dp;
  double bound;  // running error bound for p
};

HornerEval horner_with_derivative(std::span<const Complex> c, Complex w) {
  Complex p = c.back();
  Complex dp{0.0, 0.0};
  const double aw = std::abs(w);
  double bound = std::abs(p);
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    dp = dp * w + p;
    p = p * w + c[i];
    bound = bound * aw + std::abs(c[i]);
  }
  return {p, dp, bound};
}

// Initial radii from the upper convex hull of (i, log|a_i|).
std::vector<Complex> newton_polygon_start(std::span<const Complex> c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<double> logs(c.size());
  for (int i = 0; i <= n; ++i) {
    const double a = std::abs(c[i]);
    logs[i] = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
  }
  std::vector<int> hull;
  for (int i = 0; i <= n; ++i) {
    if (!std::isfinite(logs[i])) continue;
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      // drop b when it lies on or below the segment a -> i
      const double cross = (logs[b] - logs[a]) * (i - a) - (logs[i] - logs[a]) * (b - a);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<Complex> start;
  start.reserve(n);
  const double sigma = 0.7;  // angular offset keeps starts off symmetry axes
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int a = hull[h];
    const int b = hull[h + 1];
    const int m = b - a;
    const double radius = std::exp((logs[a] - logs[b]) / m);
    for (int k = 0; k < m; ++k) {
      const double theta = kTwoPi * k / m + kTwoPi * h / n + sigma;
      start.push_back(std::polar(radius, theta));
    }
  }
  return start;
}

}  // namespace

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
  std::size_t hi = coeffs.size();
  while (hi > 0 && coeffs[hi - 1] == Complex{0.0, 0.0}) --hi;
  require(hi >= 2, "polynomial_roots: degree must be at least 1");
  std::size_t lo = 0;
  while (coeffs[lo] == Complex{0.0, 0.0}) ++lo;

  std::vector<Complex> roots(lo, Complex{0.0, 0.0});
  std::vector<Complex> c(coeffs.begin() + lo, coeffs.begin() + hi);
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return roots;
  if (n == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }

  std::vector<Complex> z = newton_polygon_start(c);
  std::vector<bool> done(n, false);
  for (int iter = 0; iter < 1000; ++iter) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      const HornerEval h = horner_with_derivative(c, z[i]);
      if (std::abs(h.p) <= 4.0 * kEps * h.bound) {
        done[i] = true;
        continue;
      }
      all_done = false;
      const Complex ratio = h.p / h.dp;
      Complex sum{0.0, 0.0};
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = ratio;
      z[i] -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(z[i])) done[i] = true;
    }
    if (all_done) break;
  }

  // Newton polish; a step is accepted only if it does not increase |p|.
  for (auto& r : z) {
    for (int iter = 0; iter < 8; ++iter) {
      const HornerEval h = horner_with_derivative(c, r);
      if (h.dp == Complex{0.0, 0.0}) break;
      const Complex next = r - h.p / h.dp;
      const HornerEval hn = horner_with_derivative(c, next);
      if (!(std::abs(hn.p) < std::abs(h.p))) break;
      r = next;
    }
  }
  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

std::vector<OrbitPoint> cluster_points(std::span<const Complex> points, double radius) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(points[i] - points[j]) <= radius) parent[find(i)] = find(j);

  std::vector<OrbitPoint> out;
  std::vector<std::size_t> slot(n, n);
  std::vector<Complex> sums;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] == n) {
      slot[r] = out.size();
      out.push_back({Complex{0.0, 0.0}, 0});
      sums.emplace_back(0.0, 0.0);
    }
    sums[slot[r]] += points[i];
    out[slot[r]].multiplicity += 1;
  }
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k].location = sums[k] / static_cast<double>(out[k].multiplicity);
  return out;
}

std::vector<Complex> newton_identities(std::span<const Complex> power_sums) {
  const std::size_t n = power_sums.size();
  std::vector<Complex> e(n + 1, Complex{0.0, 0.0});
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 1; i <= k; ++i) {
      const double sign = (i % 2 == 1) ? 1.0 : -1.0;
      acc += sign * e[k - i] * power_sums[i - 1];
    }
    e[k] = acc / static_cast<double>(k);
  }
  return e;
}

}  // namespace autorb
