#include "manipyr/linear_pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "manipyr/error.hpp"

namespace manipyr {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double clamped(const std::vector<double>& v, long i) {
  const long last = static_cast<long>(v.size()) - 1;
  return v[static_cast<std::size_t>(std::clamp(i, 0L, last))];
}

void require_finite(const RealSequence& c, const char* who) {
  if (c.values.empty()) throw EmptyInput(std::string(who) + ": empty sequence");
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!std::isfinite(c.values[i]))
      throw ValidationError(std::string(who) + ": non-finite value at index " + std::to_string(i));
}

}  // namespace

RealSequence subdivide(const Mask& mask, const RealSequence& c) {
  require_finite(c, "subdivide");
  const auto& a = mask.alpha;
  const int n = static_cast<int>(c.size());
  RealSequence out{std::vector<double>(static_cast<std::size_t>(2 * n - 1), 0.0), c.scale + 1, c.origin};
  for (int j = 0; j < 2 * n - 1; ++j) {
    // k with a.min <= j - 2k <= a.max
    const int k_lo = -floor_div(a.max_index() - j, 2);
    const int k_hi = floor_div(j - a.min_index(), 2);
    double acc = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) acc += a[j - 2 * k] * clamped(c.values, k);
    out.values[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

RealSequence decimate(const DecimationKernel& kernel, const RealSequence& c) {
  require_finite(c, "decimate");
  const auto& g = kernel.gamma;
  const long n = static_cast<long>(c.size());
  const long m = (n + 1) / 2;
  RealSequence out{std::vector<double>(static_cast<std::size_t>(m), 0.0), c.scale - 1, c.origin};
  for (long j = 0; j < m; ++j) {
    double acc = 0.0;
    for (int i = g.min_index(); i <= g.max_index(); ++i) acc += g[i] * clamped(c.values, 2 * (j - i));
    out.values[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

LinearPyramid analyze(const Mask& mask, const DecimationKernel& kernel, const RealSequence& c, int m) {
  require_finite(c, "analyze");
  if (m < 1 || m > c.scale)
    throw ValidationError("analyze: layer count " + std::to_string(m) + " must lie in [1, " +
                          std::to_string(c.scale) + "]");
  if (m >= 31 || c.size() < 2 || (c.size() - 1) % (std::size_t{1} << m) != 0)
    throw LengthMismatch("analyze: length " + std::to_string(c.size()) + " is not k*2^" +
                         std::to_string(m) + "+1");
  LinearPyramid pyr;
  pyr.mask_name = mask.name;
  pyr.xi = kernel.xi;
  pyr.kernel_fingerprint = kernel.fingerprint();
  pyr.details.resize(static_cast<std::size_t>(m));
  RealSequence fine = c;
  for (int layer = m - 1; layer >= 0; --layer) {
    RealSequence coarse = decimate(kernel, fine);
    const RealSequence pred = subdivide(mask, coarse);
    RealSequence d{fine.values, fine.scale, fine.origin};
    for (std::size_t i = 0; i < d.size(); ++i) d.values[i] -= pred.values[i];
    pyr.details[static_cast<std::size_t>(layer)] = std::move(d);
    fine = std::move(coarse);
  }
  pyr.coarse = std::move(fine);
  return pyr;
}

RealSequence synthesize(const Mask& mask, const LinearPyramid& pyr) {
  RealSequence c = pyr.coarse;
  for (std::size_t layer = 0; layer < pyr.details.size(); ++layer) {
    const auto& d = pyr.details[layer];
    RealSequence next = subdivide(mask, c);
    if (next.size() != d.size())
      throw LengthMismatch("synthesize: layer " + std::to_string(layer) + " has " + std::to_string(d.size()) +
                           " details, expected " + std::to_string(next.size()));
    for (std::size_t i = 0; i < d.size(); ++i) next.values[i] += d.values[i];
    c = std::move(next);
  }
  return c;
}

RealSequence pi_apply(const Mask& mask, const DecimationKernel& kernel, const RealSequence& c) {
  const RealSequence pred = subdivide(mask, decimate(kernel, c));
  RealSequence out{{}, c.scale - 1, c.origin};
  for (std::size_t i = 0; i < c.size(); i += 2) out.values.push_back(c.values[i] - pred.values[i]);
  return out;
}

double pi_operator_norm_bound(const Mask& mask, const Mask& approx, const DecimationKernel& kernel) {
  return (mask.alpha - approx.alpha).l1_norm() * kernel.gamma.l1_norm();
}

double moment_constant(const LaurentPoly& c) { return 2.0 * c.first_abs_moment(); }

DetailBounds detail_bounds(const Mask& mask, const Mask& approx, const DecimationKernel& kernel,
                           double fprime_sup, int J) {
  const LaurentPoly diff = mask.alpha - approx.alpha;
  const double g1 = kernel.gamma.l1_norm();
  DetailBounds b;
  b.L = diff.l1_norm() * moment_constant(kernel.gamma) + g1 * moment_constant(diff);
  b.P = b.L * std::pow(g1, J) * fprime_sup;
  return b;
}

double delta_max(const std::vector<double>& c) {
  double d = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) d = std::max(d, std::abs(c[i] - c[i - 1]));
  return d;
}

double subdivision_norm(const Mask& mask) {
  return std::max(mask.even_symbol().l1_norm(), mask.odd_symbol().l1_norm());
}

double subdivision_power_norm(const Mask& mask, int j) {
  if (j < 0 || j > 20) throw ValidationError("subdivision_power_norm: j must lie in [0, 20]");
  if (j == 0) return 1.0;
  LaurentPoly acc = mask.alpha;
  for (int i = 1; i < j; ++i) {
    // alpha(z^(2^i)) has its entries spread 2^i apart.
    const int stride = 1 << i;
    const auto src = mask.alpha.coeffs();
    std::vector<double> spread((src.size() - 1) * static_cast<std::size_t>(stride) + 1, 0.0);
    for (std::size_t k = 0; k < src.size(); ++k) spread[k * static_cast<std::size_t>(stride)] = src[k];
    acc = convolve(acc, LaurentPoly(mask.alpha.min_index() * stride, std::move(spread)));
  }
  const int period = 1 << j;
  std::vector<double> sums(static_cast<std::size_t>(period), 0.0);
  for (int k = acc.min_index(); k <= acc.max_index(); ++k)
    sums[static_cast<std::size_t>(((k % period) + period) % period)] += std::abs(acc[k]);
  return *std::max_element(sums.begin(), sums.end());
}

std::size_t interior_margin(const Mask& mask, const DecimationKernel& kernel) {
  const auto& a = mask.alpha;
  const auto& g = kernel.gamma;
  const int span = a.is_zero() ? 0 : a.max_index() - a.min_index();
  return static_cast<std::size_t>(span + 2 * g.bandwidth() + 1);
}

std::size_t kept_count(double q, std::size_t n) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("keep fraction must lie in [0, 1]");
  return std::min(n, static_cast<std::size_t>(std::llround(q * static_cast<double>(n))));
}

LinearPyramid threshold_details(const LinearPyramid& pyr, const ThresholdPolicy& policy, ThresholdStats* stats) {
  if (policy.kind == ThresholdPolicy::Kind::AbsThreshold && !(policy.t >= 0.0))
    throw ValidationError("threshold_details: t must be >= 0");
  LinearPyramid out = pyr;
  ThresholdStats st;
  for (auto& layer : out.details) {
    auto& v = layer.values;
    const std::size_t n = v.size();
    switch (policy.kind) {
      case ThresholdPolicy::Kind::ZeroEven:
        for (std::size_t i = 0; i < n; i += 2)
          if (i >= policy.margin && i + policy.margin < n) v[i] = 0.0;
        break;
      case ThresholdPolicy::Kind::KeepTopFraction: {
        const std::size_t keep = kept_count(policy.q, n);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Ties broken by index so the result is deterministic.
        std::stable_sort(order.begin(), order.end(),
                         [&v](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
        for (std::size_t r = keep; r < n; ++r) v[order[r]] = 0.0;
        break;
      }
      case ThresholdPolicy::Kind::AbsThreshold:
        for (double& x : v)
          if (std::abs(x) < policy.t) x = 0.0;
        break;
    }
    std::size_t kept = 0;
    for (double x : v) kept += (x != 0.0);
    if (policy.kind == ThresholdPolicy::Kind::KeepTopFraction) kept = kept_count(policy.q, n);
    st.total += n;
    st.kept += kept;
    st.kept_per_layer.push_back(kept);
  }
  if (stats) *stats = st;
  return out;
}

}  // namespace manipyr
