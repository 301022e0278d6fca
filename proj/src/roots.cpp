#include "manipyr/roots.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "manipyr/error.hpp"

namespace manipyr {

int RootSet::total_multiplicity() const {
  int n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

std::vector<std::complex<double>> RootSet::expanded() const {
  std::vector<std::complex<double>> out;
  for (const auto& r : roots)
    for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.value);
  return out;
}

namespace {

using cplx = std::complex<double>;

// Horner evaluation of p and p' at z, plus a running bound on the rounding
// error of p(z).
struct HornerResult {
  cplx p;
  cplx dp;
  double err_bound;
};

HornerResult horner(const std::vector<cplx>& a, cplx z) {
  const double az = std::abs(z);
  cplx p = a.back();
  cplx dp = 0.0;
  double e = std::abs(a.back());
  for (std::size_t i = a.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + a[i];
    e = e * az + std::abs(a[i]);
  }
  return {p, dp, e * 4.0 * static_cast<double>(a.size()) * std::numeric_limits<double>::epsilon()};
}

}  // namespace

RootSet find_roots(const LaurentPoly& p, const RootFinderOptions& opts) {
  if (p.is_zero()) throw ValidationError("find_roots: zero polynomial has no finite root set");
  const auto c = p.coeffs();
  const int n = p.degree();
  RootSet out;
  out.leading_coeff = c.back();
  if (n == 0) return out;

  std::vector<cplx> a(c.begin(), c.end());

  // Initial guesses on a circle of radius equal to the geometric mean of the
  // root moduli, rotated off the real axis and slightly spread radially so
  // conjugate pairs do not start symmetric.
  const double radius = std::pow(std::abs(a.front() / a.back()), 1.0 / n);
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n + 0.4;
    const double rho = radius * (1.0 + 0.01 * k / n);
    z[static_cast<std::size_t>(k)] = std::polar(rho, theta);
  }

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    bool all_done = true;
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (done[k]) continue;
      const auto h = horner(a, z[k]);
      if (std::abs(h.p) <= h.err_bound) {
        done[k] = true;
        continue;
      }
      const cplx ratio = h.p / h.dp;
      cplx s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const cplx w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      if (std::abs(w) <= opts.tol * std::max(1.0, std::abs(z[k]))) done[k] = true;
      else all_done = false;
    }
    if (all_done) break;
  }
  if (iter == opts.max_iter)
    throw NonConvergence("find_roots: Aberth-Ehrlich did not converge in " +
                         std::to_string(opts.max_iter) + " iterations");

  // Cluster nearly coincident roots into multiple roots.
  std::vector<bool> used(z.size(), false);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (used[i]) continue;
    cplx acc = z[i];
    int mult = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      if (!used[j] && std::abs(z[j] - z[i]) <= opts.cluster_radius) {
        used[j] = true;
        acc += z[j];
        ++mult;
      }
    }
    cplx v = acc / static_cast<double>(mult);
    if (std::abs(v.imag()) <= opts.tol * std::max(1.0, std::abs(v))) v = {v.real(), 0.0};
    out.roots.push_back({v, mult});
  }
  return out;
}

std::vector<std::complex<double>> poly_from_roots(const std::vector<std::complex<double>>& roots,
                                                  std::complex<double> lead) {
  std::vector<cplx> acc{lead};
  for (const cplx& r : roots) {
    std::vector<cplx> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= r * acc[i];
    }
    acc = std::move(next);
  }
  return acc;
}

LaurentPoly laurent_from_roots(const RootSet& rs, int min_index) {
  const auto cc = poly_from_roots(rs.expanded(), rs.leading_coeff);
  std::vector<double> re(cc.size());
  for (std::size_t i = 0; i < cc.size(); ++i) re[i] = cc[i].real();
  return LaurentPoly(min_index, std::move(re));
}

}  // namespace manipyr
