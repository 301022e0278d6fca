#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "manipyr/mask.hpp"
#include "manipyr/symbol.hpp"

namespace manipyr {

/// Samples on the dyadic grid origin + 2^-scale * i.
struct RealSequence {
  std::vector<double> values;
  int scale = 0;
  double origin = 0.0;

  std::size_t size() const { return values.size(); }
};

/// Coarse sequence plus detail layers ordered from coarse to fine.
struct LinearPyramid {
  RealSequence coarse;
  std::vector<RealSequence> details;
  std::string mask_name;
  double xi = 0.0;
  std::string kernel_fingerprint;
};

/// S(c)_j = sum_k alpha[j - 2k] c_k with endpoint replication; length 2n - 1.
RealSequence subdivide(const Mask& mask, const RealSequence& c);

/// D(c)_j = sum_k gamma[j - k] c_{2k} with endpoint replication; length ceil(n/2).
RealSequence decimate(const DecimationKernel& kernel, const RealSequence& c);

/// m analysis steps c <- D c, d = c_fine - S c. Requires 1 <= m <= c.scale
/// and (n - 1) divisible by 2^m.
LinearPyramid analyze(const Mask& mask, const DecimationKernel& kernel, const RealSequence& c, int m);

RealSequence synthesize(const Mask& mask, const LinearPyramid& pyr);

/// Even samples of (I - S D) c.
RealSequence pi_apply(const Mask& mask, const DecimationKernel& kernel, const RealSequence& c);

/// ||alpha - alpha~||_1 * ||gamma||_1
double pi_operator_norm_bound(const Mask& mask, const Mask& approx, const DecimationKernel& kernel);

/// 2 * sum_j |c_j| |j|
double moment_constant(const LaurentPoly& c);

struct DetailBounds {
  /// Even details of a layer are at most L * delta_max of that layer's input.
  double L = 0.0;
  /// Even details of layer l are at most P * (2 ||gamma||_1)^-l.
  double P = 0.0;
};

/// fprime_sup is sup|f'| of the sampled function, finest scale is J.
DetailBounds detail_bounds(const Mask& mask, const Mask& approx, const DecimationKernel& kernel,
                           double fprime_sup, int J);

/// Largest absolute consecutive difference; 0 for fewer than two samples.
double delta_max(const std::vector<double>& c);

/// max of the absolute even and odd sums of the mask.
double subdivision_norm(const Mask& mask);

/// Norm of the j-fold iterate S^j, read off its mask prod_i alpha(z^(2^i)).
double subdivision_power_norm(const Mask& mask, int j);

/// Indices closer than this to either end of a fine sequence feel the boundary
/// extension in one analysis step.
std::size_t interior_margin(const Mask& mask, const DecimationKernel& kernel);

struct ThresholdPolicy {
  enum class Kind { ZeroEven, KeepTopFraction, AbsThreshold };
  Kind kind = Kind::ZeroEven;
  /// KeepTopFraction: fraction of each layer kept, rounded to nearest.
  double q = 1.0;
  /// AbsThreshold: details with |d| < t are zeroed.
  double t = 0.0;
  /// ZeroEven: even indices within margin of either end are left alone.
  std::size_t margin = 0;

  static ThresholdPolicy zero_even(std::size_t margin = 0) { return {Kind::ZeroEven, 1.0, 0.0, margin}; }
  static ThresholdPolicy keep_top_fraction(double q) { return {Kind::KeepTopFraction, q, 0.0, 0}; }
  static ThresholdPolicy abs_threshold(double t) { return {Kind::AbsThreshold, 1.0, t, 0}; }
};

struct ThresholdStats {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::vector<std::size_t> kept_per_layer;
  double sparsity() const { return total == 0 ? 0.0 : 1.0 - static_cast<double>(kept) / total; }
};

/// Number of entries kept out of n at fraction q.
std::size_t kept_count(double q, std::size_t n);

LinearPyramid threshold_details(const LinearPyramid& pyr, const ThresholdPolicy& policy,
                                ThresholdStats* stats = nullptr);

}  // namespace manipyr
