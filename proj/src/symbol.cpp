#include "manipyr/symbol.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <iomanip>

#include "manipyr/error.hpp"

namespace manipyr {

namespace {

using cplx = std::complex<double>;

double abs_on_circle(const LaurentPoly& p, double theta) { return std::abs(p(std::polar(1.0, theta))); }

// Golden-section search for an extremum of f on [a, b]; sign = +1 minimizes,
// -1 maximizes. Returns the extreme value of f found.
template <class F>
double golden_extremum(F&& f, double a, double b, double sign) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = sign * f(x1);
  double f2 = sign * f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-16; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = sign * f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = sign * f(x2);
    }
  }
  return sign * std::min(f1, f2);
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Raw (untruncated) reciprocal coefficients, indexed k = -N/2+1 .. N/2 and
// returned in that order.
std::vector<double> reciprocal_coefficients(const LaurentPoly& p, int n) {
  std::vector<cplx> buf(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * j / n);
    buf[static_cast<std::size_t>(j)] = 1.0 / p(z);
  }
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = -n / 2 + 1; k <= n / 2; ++k) {
    const int slot = (k + n) % n;
    out[static_cast<std::size_t>(k + n / 2 - 1)] = buf[static_cast<std::size_t>(slot)].real() / n;
  }
  return out;
}

}  // namespace

CircleExtrema circle_extrema(const LaurentPoly& p, int grid_size) {
  if (p.is_zero()) return {0.0, 0.0};
  if (grid_size < 1024) throw ValidationError("reversibility_kappa: grid_size must be >= 1024");
  const double step = 2.0 * std::numbers::pi / grid_size;
  double sup = -1.0;
  double inf = std::numeric_limits<double>::infinity();
  int arg_sup = 0;
  int arg_inf = 0;
  for (int j = 0; j < grid_size; ++j) {
    const double v = abs_on_circle(p, j * step);
    if (v > sup) {
      sup = v;
      arg_sup = j;
    }
    if (v < inf) {
      inf = v;
      arg_inf = j;
    }
  }
  auto f = [&](double t) { return abs_on_circle(p, t); };
  sup = std::max(sup, golden_extremum(f, (arg_sup - 1) * step, (arg_sup + 1) * step, -1.0));
  inf = std::min(inf, golden_extremum(f, (arg_inf - 1) * step, (arg_inf + 1) * step, 1.0));
  return {sup, inf};
}

double reversibility_kappa(const LaurentPoly& p, int grid_size) {
  const auto e = circle_extrema(p, grid_size);
  if (e.sup == 0.0 || e.inf <= 1e-14 * e.sup) return std::numeric_limits<double>::infinity();
  return e.sup / e.inf;
}

PseudoReverseResult pseudo_reverse_symbol(const LaurentPoly& p, double xi, DisplaceMode mode,
                                          double root_tol) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw InvalidXi("pseudo_reverse_symbol: xi must be >= 0");
  if (p.is_zero() || std::abs(p(1.0)) == 0.0)
    throw ValidationError("pseudo_reverse_symbol: symbol must not vanish at z = 1");

  PseudoReverseResult out;
  out.xi = xi;
  out.kappa_before = reversibility_kappa(p);

  RootSet roots = find_roots(p);
  for (auto& r : roots.roots) {
    const double mod = std::abs(r.value);
    const bool hit = (mode == DisplaceMode::OnCircle) ? std::abs(mod - 1.0) <= root_tol
                                                      : mod > 1.0 + root_tol;
    if (hit && xi > 0.0) {
      r.value *= (1.0 + xi);
      out.displaced_count += r.multiplicity;
    }
  }
  out.displaced_roots = roots;

  if (out.displaced_count == 0) {
    out.approx_poly = p;
    out.kappa_after = out.kappa_before;
    return out;
  }
  LaurentPoly rebuilt = laurent_from_roots(roots, p.min_index());
  out.approx_poly = rebuilt.scaled(1.0 / rebuilt.sum());
  out.kappa_after = reversibility_kappa(out.approx_poly);
  return out;
}

double convolution_residual(const LaurentPoly& gamma, const LaurentPoly& p) {
  const LaurentPoly prod = convolve(gamma, p);
  double r = std::abs(1.0 - prod[0]);
  if (prod.is_zero()) return 1.0;
  for (int k = prod.min_index(); k <= prod.max_index(); ++k)
    if (k != 0) r = std::max(r, std::abs(prod[k]));
  return r;
}

DecimationKernel invert_symbol(const LaurentPoly& p_tilde, int dft_size, double truncation_tol) {
  if (dft_size < 4096 || !std::has_single_bit(static_cast<unsigned>(dft_size)))
    throw ValidationError("invert_symbol: dft_size must be a power of two >= 4096");
  if (!(truncation_tol >= 0.0)) throw ValidationError("invert_symbol: truncation_tol must be >= 0");
  if (!std::isfinite(reversibility_kappa(p_tilde)))
    throw NotReversible("invert_symbol: symbol vanishes on the unit circle");

  const int n = dft_size;
  const auto raw = reciprocal_coefficients(p_tilde, n);
  const auto index_of = [n](std::size_t slot) { return static_cast<int>(slot) - n / 2 + 1; };

  double peak = 0.0;
  for (double g : raw) peak = std::max(peak, std::abs(g));
  const double cut = truncation_tol * peak;
  std::size_t lo = raw.size();
  std::size_t hi = 0;
  for (std::size_t s = 0; s < raw.size(); ++s) {
    if (std::abs(raw[s]) >= cut && raw[s] != 0.0) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }

  // Doubling the grid must leave every kept coefficient unchanged.
  const auto fine = reciprocal_coefficients(p_tilde, 2 * n);
  for (std::size_t s = lo; s <= hi; ++s) {
    const int k = index_of(s);
    const double other = fine[static_cast<std::size_t>(k + n - 1)];
    if (std::abs(raw[s] - other) > std::max(cut, 1e-15 * peak))
      throw AliasingDetected("invert_symbol: coefficient " + std::to_string(k) +
                             " changes under DFT size doubling; increase dft_size");
  }
  // Edge coefficients must have decayed, or the support wraps around.
  if (truncation_tol > 0.0 && (lo == 0 || hi + 1 == raw.size()))
    throw AliasingDetected("invert_symbol: reciprocal coefficients do not decay within dft_size");

  std::vector<double> kept(raw.begin() + static_cast<std::ptrdiff_t>(lo),
                           raw.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  double sum = 0.0;
  for (double g : kept) sum += g;
  for (double& g : kept) g /= sum;

  DecimationKernel k;
  k.gamma = LaurentPoly(index_of(lo), std::move(kept));
  k.truncation_tol = truncation_tol;
  k.dft_size = dft_size;
  k.normalized = true;
  k.inverted_symbol = p_tilde;
  k.residual = convolution_residual(k.gamma, p_tilde);
  return k;
}

std::string DecimationKernel::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t offset = gamma.min_index();
  mix(&offset, sizeof offset);
  for (double c : gamma.coeffs()) mix(&c, sizeof c);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

double DecayEnvelope::bound(int k) const {
  if (lambda == 0.0) return k == 0 ? C : 0.0;
  return C * std::pow(lambda, std::abs(k));
}

DecayEnvelope decay_envelope(double kappa, int s, double inf_abs) {
  if (!(kappa >= 1.0) || !std::isfinite(kappa) || s < 1 || !(inf_abs > 0.0))
    throw ValidationError("decay_envelope: need finite kappa >= 1, s >= 1, inf_abs > 0");
  const double rk = std::sqrt(kappa);
  DecayEnvelope e;
  e.lambda = std::pow((rk - 1.0) / (rk + 1.0), 1.0 / s);
  e.C = std::max(1.0, (1.0 + rk) * (1.0 + rk) / (2.0 * kappa)) / inf_abs;
  return e;
}

DecayEnvelope general_decay_envelope(const LaurentPoly& p, int grid_size) {
  const auto ext = circle_extrema(p, grid_size);
  if (!(ext.inf > 1e-14 * ext.sup)) throw NotReversible("general_decay_envelope: symbol not reversible");
  const auto c = p.coeffs();
  const LaurentPoly reversed(-p.max_index(), std::vector<double>(c.rbegin(), c.rend()));
  const LaurentPoly sq = convolve(p, reversed);
  const int width = std::max(1, sq.bandwidth());
  const double kappa = ext.sup / ext.inf;
  DecayEnvelope g = decay_envelope(kappa * kappa, width, ext.inf * ext.inf);
  DecayEnvelope out;
  const int s = p.bandwidth();
  // |p| constant on the circle: the reciprocal is supported on |k| <= s.
  out.lambda = (g.lambda > 0.0) ? g.lambda : 0.5;
  out.C = g.C * p.l1_norm() * std::pow(out.lambda, -s);
  return out;
}

}  // namespace manipyr
