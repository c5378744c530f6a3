#pragma once

#include <span>
#include <vector>

#include "autorb/function.hpp"

namespace autorb {

/// p(w) for ascending coefficients.
Complex horner(std::span<const Complex> coeffs, Complex w);

/// All roots (with repetition) of a polynomial given by ascending coefficients.
///
/// Aberth-Ehrlich iteration started from the Newton-polygon radii of the
/// coefficient moduli, followed by a Newton polish on the original polynomial.
/// Exact zero roots (vanishing low-order coefficients) are returned as 0.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

/// Groups points closer than `radius` (single linkage); each group becomes one
/// point at its centroid with the group size as multiplicity.
std::vector<OrbitPoint> cluster_points(std::span<const Complex> points, double radius);

/// Elementary symmetric functions e_0..e_n from power sums p_1..p_n.
std::vector<Complex> newton_identities(std::span<const Complex> power_sums);

}  // namespace autorb
