#pragma once

#include <complex>
#include <vector>

#include "manipyr/laurent.hpp"

namespace manipyr {

struct Root {
  std::complex<double> value;
  int multiplicity = 1;
};

/// Zeros of the non-monomial part of a Laurent polynomial, i.e. of
/// z^(-min_index) p(z). Multiplicities sum to the degree.
struct RootSet {
  std::vector<Root> roots;
  std::complex<double> leading_coeff{1.0, 0.0};

  int total_multiplicity() const;
  /// Each root repeated according to its multiplicity.
  std::vector<std::complex<double>> expanded() const;
};

struct RootFinderOptions {
  double tol = 1e-12;
  int max_iter = 500;
  double cluster_radius = 1e-7;
};

/// Aberth-Ehrlich simultaneous iteration started from a perturbed circle.
/// Throws ValidationError for the zero polynomial and NonConvergence when
/// the iteration cap is hit.
RootSet find_roots(const LaurentPoly& p, const RootFinderOptions& opts = {});

/// Complex coefficients, ascending powers, of lead * prod (z - r).
std::vector<std::complex<double>> poly_from_roots(const std::vector<std::complex<double>>& roots,
                                                  std::complex<double> lead);

/// Rebuild a real Laurent polynomial from roots and an index offset.
/// Imaginary parts left over from conjugate pairs are discarded.
LaurentPoly laurent_from_roots(const RootSet& rs, int min_index);

}  // namespace manipyr
