#pragma once

#include <string>

#include "manipyr/laurent.hpp"
#include "manipyr/symbol.hpp"

namespace manipyr {

/// Subdivision mask alpha. Entry alpha[k] weights c_j in output 2j + k.
struct Mask {
  LaurentPoly alpha;
  std::string name;

  LaurentPoly even_symbol() const { return alpha.even_part(); }
  LaurentPoly odd_symbol() const { return alpha.odd_part(); }
  /// Both parity sums equal one within tol.
  bool satisfies_parity_sums(double tol = 1e-12) const;
};

/// [1/4, 1/3, 1/4, 1/3, 1/4, 1/3, 1/4] on indices -3..3.
Mask least_squares_mask();
/// [1/2, 1, 1/2] on indices -1..1.
Mask linear_bspline_mask();
/// Dyn-Levin-Gregory four-point scheme, interpolating.
Mask four_point_mask();
/// B-spline of order n >= 1 (degree n): binom(n+1, k + floor((n+1)/2)) / 2^n.
Mask bspline_mask(int order);

/// Accepts "least_squares", "linear", "four_point", "bspline<n>".
Mask mask_by_name(const std::string& name);

/// Mask, its pseudo-reversed counterpart and the matching decimation kernel.
struct ReversedPair {
  Mask mask;
  Mask approx;
  PseudoReverseResult reverse;
  DecimationKernel kernel;
};

struct KernelOptions {
  DisplaceMode mode = DisplaceMode::OnCircle;
  double root_tol = kDefaultRootTol;
  int dft_size = kDefaultDftSize;
  double truncation_tol = kDefaultTruncationTol;
};

/// Pseudo-reverses the even symbol of mask and inverts it. The approximating
/// mask keeps the odd part of alpha and takes the modified even symbol.
ReversedPair pseudo_reverse_mask(const Mask& mask, double xi, const KernelOptions& opts = {});

}  // namespace manipyr
