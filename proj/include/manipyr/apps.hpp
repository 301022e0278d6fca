#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manipyr/linear_pyramid.hpp"
#include "manipyr/manifold_pyramid.hpp"
#include "manipyr/mask.hpp"

namespace manipyr {

struct ConeParams {
  double r0 = 1.0;
  double h = 2.0;
  double nu = 3.0;
};

/// Every knob of an experiment; serialized into each output.
struct ExperimentConfig {
  std::string mask = "least_squares";
  double xi = 0.64;
  /// "on_circle" or "outside_circle"
  std::string mode = "on_circle";
  int layers = 4;
  int scale = 6;
  std::uint64_t seed = 1;
  double truncation_tol = kDefaultTruncationTol;
  int dft_size = kDefaultDftSize;
  double root_tol = kDefaultRootTol;
  double mean_tol = 1e-12;
  int mean_max_iter = 100;
  double keep_fraction = 0.01;
  double enhance_fraction = 0.2;
  double gain = 0.4;
  double noise_frac = 0.01;
  ConeParams cone;

  /// Throws ValidationError naming the first bad field.
  void validate() const;
  KernelOptions kernel_options() const;
  MeanOptions mean_options() const;
};

DisplaceMode displace_mode_from_string(const std::string& s);

/// Pseudo-reversed mask pair described by cfg (mask, xi, mode, kernel options).
ReversedPair make_pair(const ExperimentConfig& cfg);

/// cos(5 (x - 5)) exp(-(x - 5)^2 / 2) on [0, 10], 10 * 2^J + 1 samples.
RealSequence gen_morlet(int J);

/// Adds N(0, sigma^2) noise with sigma = sigma_frac * (max - min).
RealSequence add_noise(const RealSequence& c, double sigma_frac, std::uint64_t seed);

/// Four seeded random rotations, resampled geodesically to 11 points, then
/// refined six times with the cubic B-spline mask: 641 points at scale 6.
ManifoldSequence gen_so3_curve(std::uint64_t seed, const MeanOptions& opts = {});

/// Pairs rotation j with translation on a cone, tau = j / (n - 1):
/// (r0 (1 - tau) cos(2 pi nu tau), r0 (1 - tau) sin(2 pi nu tau), h tau).
ManifoldSequence wrap_on_cone(const ManifoldSequence& so3_curve, const ConeParams& cone = {});

struct CompressionReport {
  std::size_t original_count = 0;
  std::size_t stored_coarse_count = 0;
  std::size_t total_detail_count = 0;
  std::size_t stored_detail_count = 0;
  std::vector<double> errors;
  double max_error = 0.0;
  double mean_error = 0.0;
  std::size_t argmax_error = 0;
};

struct CompressionResult {
  ManifoldPyramid pyramid;
  ManifoldSequence reconstruction;
  CompressionReport report;
};

/// Keeps the round(q * total) largest detail vectors across all layers and
/// zeroes the rest. Errors are geodesic distances to reference, or to the
/// lossless synthesis when reference is null.
CompressionResult compress(const Mask& mask, const ManifoldPyramid& pyr, double q,
                           const ManifoldSequence* reference = nullptr);

struct EnhanceResult {
  ManifoldPyramid pyramid;
  /// scaled[l][i] marks the details that were amplified.
  std::vector<std::vector<bool>> scaled;
};

/// Per layer, multiplies the round(top_fraction * n) largest details by
/// (1 + gain). Throws OutOfInjectivityRadius listing offending indices.
EnhanceResult enhance(const ManifoldPyramid& pyr, double top_fraction, double gain);

/// Indices of the finest level whose synthesis depends on any flagged detail.
std::vector<bool> influenced_indices(const Mask& mask, const std::vector<std::vector<bool>>& flagged);

/// CSV text of reproduction table 1..4 (least-squares kappa sweep, B-spline kappa,
/// outside-circle kappa sweep, zero-even Morlet errors), computed end to end.
std::string run_table(int table_id, const ExperimentConfig& cfg = {});

struct Table4Row {
  int m = 0;
  double smooth = 0.0;
  double noisy_median = 0.0;
};

/// Zero-even reconstruction errors for the Morlet signal; noisy values are
/// medians over noise_seeds seeds starting at cfg.seed.
std::vector<Table4Row> table4_rows(const ExperimentConfig& cfg, int noise_seeds = 10);

/// sup-norm error of synthesis after zeroing all even details.
double zero_even_error(const ReversedPair& pair, const RealSequence& c, int m);

}  // namespace manipyr
