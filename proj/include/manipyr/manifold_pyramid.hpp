#pragma once

#include <string>
#include <vector>

#include "manipyr/mask.hpp"
#include "manipyr/manifold.hpp"
#include "manipyr/symbol.hpp"

namespace manipyr {

struct ManifoldSequence {
  std::vector<ManifoldPoint> points;
  int scale = 0;
  double origin = 0.0;

  std::size_t size() const { return points.size(); }
  ManifoldKind kind() const { return points.empty() ? ManifoldKind::Euclidean : points.front().kind; }
};

/// Coarse curve plus tangent details, coarse to fine. A detail's base point
/// is the refinement of the previous level at the same index, recomputed
/// during synthesis.
struct ManifoldPyramid {
  ManifoldSequence coarse;
  std::vector<std::vector<TangentVector>> details;
  std::string mask_name;
  double xi = 0.0;
  std::string kernel_fingerprint;
  MeanOptions mean;
};

/// Refinement by weighted means with weights alpha[j - 2k]; endpoint replication.
ManifoldSequence t_refine(const Mask& mask, const ManifoldSequence& c, const MeanOptions& opts = {});

/// Decimation by weighted means of even samples with weights gamma[j - k].
ManifoldSequence y_decimate(const DecimationKernel& kernel, const ManifoldSequence& c, const MeanOptions& opts = {});

ManifoldPyramid m_analyze(const Mask& mask, const DecimationKernel& kernel, const ManifoldSequence& c, int m,
                          const MeanOptions& opts = {});

ManifoldSequence m_synthesize(const Mask& mask, const ManifoldPyramid& pyr);

/// Largest geodesic distance between consecutive points.
double delta_m(const ManifoldSequence& c);

struct LayerStats {
  double max_norm = 0.0;
  double even_max_norm = 0.0;
  double odd_max_norm = 0.0;
  /// delta_m of the level this layer reconstructs
  double delta_M = 0.0;
};

/// Detail norms restricted to indices at least margin away from both ends.
std::vector<LayerStats> layer_stats(const Mask& mask, const ManifoldPyramid& pyr, std::size_t margin = 0);

/// Throws TagMismatch if the points do not share one manifold, InvalidPoint
/// (with the index) if any point is invalid.
void validate(const ManifoldSequence& c);

}  // namespace manipyr
