#include "manipyr/apps.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "manipyr/error.hpp"

namespace manipyr {

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("config: " + what); };
  mask_by_name(mask);
  displace_mode_from_string(mode);
  if (!(xi >= 0.0) || !std::isfinite(xi)) fail("xi must be a finite number >= 0");
  if (layers < 1) fail("layers must be >= 1");
  if (scale < 1 || scale > 20) fail("scale must lie in [1, 20]");
  if (!(truncation_tol >= 0.0)) fail("truncation_tol must be >= 0");
  if (!(mean_tol > 0.0) || mean_max_iter < 1) fail("mean solver settings must be positive");
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) fail("keep_fraction must lie in [0, 1]");
  if (!(enhance_fraction >= 0.0 && enhance_fraction <= 1.0)) fail("enhance_fraction must lie in [0, 1]");
  if (!(gain >= 0.0)) fail("gain must be >= 0");
  if (!(noise_frac >= 0.0)) fail("noise_frac must be >= 0");
  if (!std::isfinite(cone.r0) || !std::isfinite(cone.h) || !std::isfinite(cone.nu)) fail("cone parameters must be finite");
}

KernelOptions ExperimentConfig::kernel_options() const {
  return {displace_mode_from_string(mode), root_tol, dft_size, truncation_tol};
}

MeanOptions ExperimentConfig::mean_options() const { return {mean_tol, mean_max_iter}; }

DisplaceMode displace_mode_from_string(const std::string& s) {
  if (s == "on_circle") return DisplaceMode::OnCircle;
  if (s == "outside_circle") return DisplaceMode::OutsideCircle;
  throw ValidationError("unknown displacement mode '" + s + "' (on_circle|outside_circle)");
}

ReversedPair make_pair(const ExperimentConfig& cfg) {
  return pseudo_reverse_mask(mask_by_name(cfg.mask), cfg.xi, cfg.kernel_options());
}

RealSequence gen_morlet(int J) {
  if (J < 1 || J > 20) throw ValidationError("gen_morlet: J must lie in [1, 20]");
  const std::size_t n = 10 * (std::size_t{1} << J) + 1;
  RealSequence c{std::vector<double>(n), J, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::ldexp(static_cast<double>(i), -J) - 5.0;
    c.values[i] = std::cos(5.0 * x) * std::exp(-0.5 * x * x);
  }
  return c;
}

RealSequence add_noise(const RealSequence& c, double sigma_frac, std::uint64_t seed) {
  if (!(sigma_frac >= 0.0)) throw ValidationError("add_noise: sigma_frac must be >= 0");
  if (c.values.empty()) throw EmptyInput("add_noise: empty sequence");
  RealSequence out = c;
  if (sigma_frac == 0.0) return out;
  const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma_frac * (*hi - *lo));
  for (double& v : out.values) v += n(rng);
  return out;
}

ManifoldSequence gen_so3_curve(std::uint64_t seed, const MeanOptions& opts) {
  std::mt19937_64 rng(seed);
  std::vector<ManifoldPoint> knots;
  for (int i = 0; i < 4; ++i) knots.push_back(ManifoldPoint::so3(random_rotation(rng)));
  ManifoldSequence c{{}, 0, 0.0};
  // 11 equispaced parameters over three geodesic segments
  for (int i = 0; i <= 10; ++i) {
    const double t = 3.0 * i / 10.0;
    const int seg = std::min(2, static_cast<int>(std::floor(t)));
    c.points.push_back(geodesic(knots[static_cast<std::size_t>(seg)], knots[static_cast<std::size_t>(seg + 1)], t - seg));
  }
  const Mask cubic = bspline_mask(3);
  for (int it = 0; it < 6; ++it) c = t_refine(cubic, c, opts);
  return c;
}

ManifoldSequence wrap_on_cone(const ManifoldSequence& so3_curve, const ConeParams& cone) {
  if (so3_curve.points.empty()) throw EmptyInput("wrap_on_cone: empty curve");
  if (so3_curve.kind() != ManifoldKind::SO3) throw TagMismatch("wrap_on_cone: input must be an SO3 curve");
  ManifoldSequence out{{}, so3_curve.scale, so3_curve.origin};
  const std::size_t n = so3_curve.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double tau = n > 1 ? static_cast<double>(j) / static_cast<double>(n - 1) : 0.0;
    const double r = cone.r0 * (1.0 - tau);
    const double phi = 2.0 * std::numbers::pi * cone.nu * tau;
    out.points.push_back(
        ManifoldPoint::se3(so3_curve.points[j].R, Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), cone.h * tau)));
  }
  return out;
}

namespace {

struct Slot {
  std::size_t layer;
  std::size_t index;
  double norm;
};

std::vector<Slot> ranked(const std::vector<std::vector<TangentVector>>& layers, std::size_t only = SIZE_MAX) {
  std::vector<Slot> s;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (only != SIZE_MAX && l != only) continue;
    for (std::size_t i = 0; i < layers[l].size(); ++i) s.push_back({l, i, layers[l][i].norm()});
  }
  std::stable_sort(s.begin(), s.end(), [](const Slot& a, const Slot& b) { return a.norm > b.norm; });
  return s;
}

}  // namespace

CompressionResult compress(const Mask& mask, const ManifoldPyramid& pyr, double q, const ManifoldSequence* reference) {
  CompressionResult res;
  res.pyramid = pyr;
  auto& rep = res.report;
  const auto order = ranked(pyr.details);
  rep.total_detail_count = order.size();
  rep.stored_detail_count = kept_count(q, order.size());
  for (std::size_t r = rep.stored_detail_count; r < order.size(); ++r) {
    auto& d = res.pyramid.details[order[r].layer][order[r].index];
    d = d.scaled(0.0);
  }
  rep.stored_coarse_count = pyr.coarse.size();
  res.reconstruction = m_synthesize(mask, res.pyramid);
  const ManifoldSequence truth = reference ? *reference : m_synthesize(mask, pyr);
  if (truth.size() != res.reconstruction.size())
    throw LengthMismatch("compress: reference length differs from the synthesized curve");
  rep.original_count = truth.size();
  rep.errors.resize(truth.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    rep.errors[i] = distance(truth.points[i], res.reconstruction.points[i]);
    sum += rep.errors[i];
    if (rep.errors[i] > rep.max_error) {
      rep.max_error = rep.errors[i];
      rep.argmax_error = i;
    }
  }
  rep.mean_error = truth.size() ? sum / static_cast<double>(truth.size()) : 0.0;
  return res;
}

EnhanceResult enhance(const ManifoldPyramid& pyr, double top_fraction, double gain) {
  if (!(gain >= 0.0)) throw ValidationError("enhance: gain must be >= 0");
  EnhanceResult res;
  res.pyramid = pyr;
  std::string offending;
  for (std::size_t l = 0; l < pyr.details.size(); ++l) {
    const std::size_t n = pyr.details[l].size();
    res.scaled.emplace_back(n, false);
    const auto order = ranked(pyr.details, l);
    const std::size_t keep = kept_count(top_fraction, n);
    for (std::size_t r = 0; r < keep && gain > 0.0; ++r) {
      auto& d = res.pyramid.details[l][order[r].index];
      d = d.scaled(1.0 + gain);
      res.scaled[l][order[r].index] = true;
      // rotation angle of the amplified vector is |S|_F / sqrt(2)
      if (d.kind != ManifoldKind::Euclidean && d.S.norm() / std::numbers::sqrt2 >= std::numbers::pi - kAntipodalTol)
        offending += " (layer " + std::to_string(l) + ", index " + std::to_string(order[r].index) + ")";
    }
  }
  if (!offending.empty())
    throw OutOfInjectivityRadius("enhance: amplified details leave the injectivity radius at" + offending);
  return res;
}

std::vector<bool> influenced_indices(const Mask& mask, const std::vector<std::vector<bool>>& flagged) {
  std::vector<bool> hit;
  const auto& a = mask.alpha;
  for (std::size_t l = 0; l < flagged.size(); ++l) {
    std::vector<bool> next = flagged[l];
    if (!hit.empty()) {
      const long n = static_cast<long>(hit.size());
      for (long j = 0; j < static_cast<long>(next.size()); ++j) {
        for (int k = a.min_index(); k <= a.max_index(); ++k) {
          if (a[k] == 0.0 || (j - k) % 2 != 0) continue;
          const long src = std::clamp((j - k) / 2, 0L, n - 1);
          if (hit[static_cast<std::size_t>(src)]) next[static_cast<std::size_t>(j)] = true;
        }
      }
    }
    hit = std::move(next);
  }
  return hit;
}

double zero_even_error(const ReversedPair& pair, const RealSequence& c, int m) {
  const auto pyr = analyze(pair.mask, pair.kernel, c, m);
  const auto rec = synthesize(pair.mask, threshold_details(pyr, ThresholdPolicy::zero_even()));
  double e = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) e = std::max(e, std::abs(rec.values[i] - c.values[i]));
  return e;
}

std::vector<Table4Row> table4_rows(const ExperimentConfig& cfg, int noise_seeds) {
  ExperimentConfig t4 = cfg;
  t4.mask = "least_squares";
  t4.mode = "on_circle";
  t4.xi = 1.4;
  const auto pair = make_pair(t4);
  const auto smooth = gen_morlet(6);
  std::vector<RealSequence> noisy;
  for (int s = 0; s < noise_seeds; ++s) noisy.push_back(add_noise(smooth, cfg.noise_frac, cfg.seed + static_cast<std::uint64_t>(s)));
  std::vector<Table4Row> rows;
  for (int m = 1; m <= 6; ++m) {
    Table4Row r;
    r.m = m;
    r.smooth = zero_even_error(pair, smooth, m);
    std::vector<double> e;
    for (const auto& c : noisy) e.push_back(zero_even_error(pair, c, m));
    std::sort(e.begin(), e.end());
    if (!e.empty()) {
      const std::size_t h = e.size() / 2;
      r.noisy_median = e.size() % 2 ? e[h] : 0.5 * (e[h - 1] + e[h]);
    }
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string run_table(int table_id, const ExperimentConfig& cfg) {
  std::ostringstream out;
  ExperimentConfig base = cfg;
  switch (table_id) {
    case 1: {
      out << "xi,kappa,mask_perturbation_l1\n";
      for (int i = 0; i <= 12; ++i) {
        base.mask = "least_squares";
        base.mode = "on_circle";
        base.xi = 0.1 * i;
        const auto m = mask_by_name(base.mask);
        const auto pr = pseudo_reverse_symbol(m.even_symbol(), base.xi, DisplaceMode::OnCircle, cfg.root_tol);
        const LaurentPoly approx = interleave(pr.approx_poly, m.odd_symbol());
        out << num(base.xi) << ',' << num(pr.kappa_after) << ',' << num((m.alpha - approx).l1_norm()) << '\n';
      }
      break;
    }
    case 2:
      out << "order,kappa\n";
      for (int n = 2; n <= 7; ++n) out << n << ',' << num(reversibility_kappa(bspline_mask(n).even_symbol())) << '\n';
      break;
    case 3:
      out << "xi,kappa\n";
      for (int i = 0; i <= 12; ++i) {
        const double xi = 0.1 * i;
        const auto pr = pseudo_reverse_symbol(bspline_mask(6).even_symbol(), xi, DisplaceMode::OutsideCircle, cfg.root_tol);
        out << num(xi) << ',' << num(pr.kappa_after) << '\n';
      }
      break;
    case 4:
      out << "m,smooth_error,noisy_error_median\n";
      for (const auto& r : table4_rows(cfg)) out << r.m << ',' << num(r.smooth) << ',' << num(r.noisy_median) << '\n';
      break;
    default:
      throw ValidationError("run_table: table id must be 1, 2, 3 or 4");
  }
  return out.str();
}

}  // namespace manipyr
