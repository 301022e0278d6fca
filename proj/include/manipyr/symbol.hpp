#pragma once

#include <cstdint>
#include <string>

#include "manipyr/laurent.hpp"
#include "manipyr/roots.hpp"

namespace manipyr {

/// Which zeros of a symbol are pushed radially outward by (1 + xi).
enum class DisplaceMode {
  OnCircle,       ///< zeros with ||r| - 1| <= root_tol (non-reversible symbols)
  OutsideCircle,  ///< zeros with |r| > 1 + root_tol (badly conditioned symbols)
};

inline constexpr double kDefaultRootTol = 1e-8;
inline constexpr int kDefaultKappaGrid = 1 << 15;
inline constexpr int kDefaultDftSize = 8192;
inline constexpr double kDefaultTruncationTol = 1e-12;

struct PseudoReverseResult {
  double xi = 0.0;
  /// Symbol with displaced zeros, normalized so that approx_poly(1) = 1. Its
  /// reciprocal on the unit circle is the pseudo-reverse.
  LaurentPoly approx_poly;
  RootSet displaced_roots;
  int displaced_count = 0;
  double kappa_before = 1.0;
  double kappa_after = 1.0;
};

/// Truncated, sum-normalized solution gamma of (p_tilde * gamma) = delta.
struct DecimationKernel {
  LaurentPoly gamma;
  double xi = 0.0;
  double truncation_tol = kDefaultTruncationTol;
  int dft_size = kDefaultDftSize;
  /// sup-norm distance of gamma * p_tilde from delta
  double residual = 0.0;
  bool normalized = true;
  /// The symbol that gamma inverts, kept so the residual can be recomputed.
  LaurentPoly inverted_symbol;

  /// Stable hex digest of the gamma coefficients and offset.
  std::string fingerprint() const;
};

PseudoReverseResult pseudo_reverse_symbol(const LaurentPoly& p, double xi,
                                          DisplaceMode mode = DisplaceMode::OnCircle,
                                          double root_tol = kDefaultRootTol);

/// sup|p| / inf|p| over the unit circle: a uniform grid followed by a
/// golden-section refinement around the sampled extrema. Returns +inf when
/// the infimum is <= 1e-14 * sup.
double reversibility_kappa(const LaurentPoly& p, int grid_size = kDefaultKappaGrid);

/// Extremes of |p| on the unit circle, as computed by reversibility_kappa.
struct CircleExtrema {
  double sup = 0.0;
  double inf = 0.0;
};
CircleExtrema circle_extrema(const LaurentPoly& p, int grid_size = kDefaultKappaGrid);

/// gamma_k from an inverse DFT of 1/p_tilde sampled on dft_size points of the
/// unit circle; coefficients below truncation_tol * max|gamma| are dropped
/// from both tails, then the rest is divided by its sum.
DecimationKernel invert_symbol(const LaurentPoly& p_tilde, int dft_size = kDefaultDftSize,
                               double truncation_tol = kDefaultTruncationTol);

/// ||delta - gamma * p||_inf
double convolution_residual(const LaurentPoly& gamma, const LaurentPoly& p);

struct DecayEnvelope {
  double C = 0.0;
  double lambda = 0.0;
  double bound(int k) const;
};

/// Geometric decay envelope |b_k| <= C lambda^|k| for the reciprocal of a
/// positive s-banded symbol with condition number kappa.
DecayEnvelope decay_envelope(double kappa, int s, double inf_abs);

/// Envelope valid for symbols that are not positive on the circle: applies
/// decay_envelope to |p|^2 (2s-banded, condition kappa^2) and convolves back
/// with the conjugate coefficients, 1/p = conj(p) / |p|^2.
DecayEnvelope general_decay_envelope(const LaurentPoly& p, int grid_size = kDefaultKappaGrid);

}  // namespace manipyr
