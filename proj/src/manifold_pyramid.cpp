#include "manipyr/manifold_pyramid.hpp"

#include <algorithm>

#include "manipyr/error.hpp"

namespace manipyr {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

const ManifoldPoint& clamped(const std::vector<ManifoldPoint>& v, long i) {
  const long last = static_cast<long>(v.size()) - 1;
  return v[static_cast<std::size_t>(std::clamp(i, 0L, last))];
}

template <class E>
[[noreturn]] void rethrow_at(const E& e, const std::string& where) {
  throw E(where + ": " + e.what());
}

ManifoldPoint mean_at(const std::vector<ManifoldPoint>& pts, const std::vector<double>& w, const MeanOptions& opts,
                      const std::string& where) {
  try {
    return weighted_mean(pts, w, opts).point;
  } catch (const NonConvergence& e) {
    rethrow_at(e, where);
  } catch (const OutOfInjectivityRadius& e) {
    rethrow_at(e, where);
  }
}

}  // namespace

void validate(const ManifoldSequence& c) {
  if (c.points.empty()) throw EmptyInput("manifold sequence is empty");
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& p = c.points[i];
    if (p.kind != c.points[0].kind || (p.kind == ManifoldKind::Euclidean && p.x.size() != c.points[0].x.size()))
      throw TagMismatch("point " + std::to_string(i) + " has a different manifold tag");
    try {
      validate(p);
    } catch (const InvalidPoint& e) {
      throw InvalidPoint("point " + std::to_string(i) + ": " + e.what());
    }
  }
}

ManifoldSequence t_refine(const Mask& mask, const ManifoldSequence& c, const MeanOptions& opts) {
  if (c.points.empty()) throw EmptyInput("t_refine: empty sequence");
  const auto& a = mask.alpha;
  const int n = static_cast<int>(c.size());
  ManifoldSequence out{{}, c.scale + 1, c.origin};
  out.points.reserve(static_cast<std::size_t>(2 * n - 1));
  std::vector<ManifoldPoint> pts;
  std::vector<double> w;
  for (int j = 0; j < 2 * n - 1; ++j) {
    pts.clear();
    w.clear();
    const int k_lo = -floor_div(a.max_index() - j, 2);
    const int k_hi = floor_div(j - a.min_index(), 2);
    for (int k = k_lo; k <= k_hi; ++k) {
      pts.push_back(clamped(c.points, k));
      w.push_back(a[j - 2 * k]);
    }
    out.points.push_back(mean_at(pts, w, opts, "t_refine index " + std::to_string(j)));
  }
  return out;
}

ManifoldSequence y_decimate(const DecimationKernel& kernel, const ManifoldSequence& c, const MeanOptions& opts) {
  if (c.points.empty()) throw EmptyInput("y_decimate: empty sequence");
  const auto& g = kernel.gamma;
  const long m = (static_cast<long>(c.size()) + 1) / 2;
  ManifoldSequence out{{}, c.scale - 1, c.origin};
  out.points.reserve(static_cast<std::size_t>(m));
  std::vector<ManifoldPoint> pts;
  std::vector<double> w;
  for (long j = 0; j < m; ++j) {
    pts.clear();
    w.clear();
    for (int i = g.min_index(); i <= g.max_index(); ++i) {
      pts.push_back(clamped(c.points, 2 * (j - i)));
      w.push_back(g[i]);
    }
    out.points.push_back(mean_at(pts, w, opts, "y_decimate index " + std::to_string(j)));
  }
  return out;
}

ManifoldPyramid m_analyze(const Mask& mask, const DecimationKernel& kernel, const ManifoldSequence& c, int m,
                          const MeanOptions& opts) {
  validate(c);
  if (m < 1 || m > c.scale)
    throw ValidationError("m_analyze: layer count " + std::to_string(m) + " must lie in [1, " +
                          std::to_string(c.scale) + "]");
  if (m >= 31 || c.size() < 2 || (c.size() - 1) % (std::size_t{1} << m) != 0)
    throw LengthMismatch("m_analyze: length " + std::to_string(c.size()) + " is not k*2^" + std::to_string(m) +
                         "+1");
  ManifoldPyramid pyr;
  pyr.mask_name = mask.name;
  pyr.xi = kernel.xi;
  pyr.kernel_fingerprint = kernel.fingerprint();
  pyr.mean = opts;
  pyr.details.resize(static_cast<std::size_t>(m));
  ManifoldSequence fine = c;
  for (int layer = m - 1; layer >= 0; --layer) {
    ManifoldSequence coarse = y_decimate(kernel, fine, opts);
    const ManifoldSequence pred = t_refine(mask, coarse, opts);
    auto& d = pyr.details[static_cast<std::size_t>(layer)];
    d.reserve(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) {
      try {
        d.push_back(log_map(pred.points[i], fine.points[i]));
      } catch (const OutOfInjectivityRadius& e) {
        throw OutOfInjectivityRadius("m_analyze layer " + std::to_string(layer) + " index " + std::to_string(i) +
                                     ": " + e.what());
      }
    }
    fine = std::move(coarse);
  }
  pyr.coarse = std::move(fine);
  return pyr;
}

ManifoldSequence m_synthesize(const Mask& mask, const ManifoldPyramid& pyr) {
  ManifoldSequence c = pyr.coarse;
  for (std::size_t layer = 0; layer < pyr.details.size(); ++layer) {
    const auto& d = pyr.details[layer];
    ManifoldSequence next = t_refine(mask, c, pyr.mean);
    if (next.size() != d.size())
      throw LengthMismatch("m_synthesize: layer " + std::to_string(layer) + " has " + std::to_string(d.size()) +
                           " details, expected " + std::to_string(next.size()));
    // edited coarser layers move the bases, so re-tangentialize
    for (std::size_t i = 0; i < d.size(); ++i) next.points[i] = exp_map(next.points[i], project_to_tangent(next.points[i], d[i]));
    c = std::move(next);
  }
  return c;
}

double delta_m(const ManifoldSequence& c) {
  double d = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) d = std::max(d, distance(c.points[i - 1], c.points[i]));
  return d;
}

std::vector<LayerStats> layer_stats(const Mask& mask, const ManifoldPyramid& pyr, std::size_t margin) {
  std::vector<LayerStats> out;
  ManifoldSequence c = pyr.coarse;
  for (const auto& d : pyr.details) {
    ManifoldSequence next = t_refine(mask, c, pyr.mean);
    LayerStats s;
    for (std::size_t i = 0; i < d.size(); ++i) {
      next.points[i] = exp_map(next.points[i], project_to_tangent(next.points[i], d[i]));
      if (i < margin || i + margin >= d.size()) continue;
      const double n = d[i].norm();
      s.max_norm = std::max(s.max_norm, n);
      double& slot = (i % 2 == 0) ? s.even_max_norm : s.odd_max_norm;
      slot = std::max(slot, n);
    }
    s.delta_M = delta_m(next);
    out.push_back(s);
    c = std::move(next);
  }
  return out;
}

}  // namespace manipyr
