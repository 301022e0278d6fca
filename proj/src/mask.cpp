#include "manipyr/mask.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "manipyr/error.hpp"

namespace manipyr {

bool Mask::satisfies_parity_sums(double tol) const {
  return std::abs(even_symbol().sum() - 1.0) <= tol && std::abs(odd_symbol().sum() - 1.0) <= tol;
}

Mask least_squares_mask() {
  constexpr double q = 0.25;
  constexpr double t = 1.0 / 3.0;
  return {LaurentPoly(-3, {q, t, q, t, q, t, q}), "least_squares"};
}

Mask linear_bspline_mask() { return {LaurentPoly(-1, {0.5, 1.0, 0.5}), "linear"}; }

Mask four_point_mask() {
  constexpr double a = -1.0 / 16.0;
  constexpr double b = 9.0 / 16.0;
  return {LaurentPoly(-3, {a, 0.0, b, 1.0, b, 0.0, a}), "four_point"};
}

Mask bspline_mask(int order) {
  if (order < 1 || order > 40) throw ValidationError("bspline_mask: order must be in [1, 40]");
  const int n = order;
  std::vector<double> c(static_cast<std::size_t>(n + 2));
  double binom = 1.0;
  const double scale = std::ldexp(1.0, -n);
  for (int i = 0; i <= n + 1; ++i) {
    c[static_cast<std::size_t>(i)] = binom * scale;
    binom = binom * (n + 1 - i) / (i + 1);
  }
  return {LaurentPoly(-((n + 1) / 2), std::move(c)), "bspline" + std::to_string(n)};
}

Mask mask_by_name(const std::string& name) {
  if (name == "least_squares") return least_squares_mask();
  if (name == "linear") return linear_bspline_mask();
  if (name == "four_point") return four_point_mask();
  if (name.rfind("bspline", 0) == 0 && name.size() > 7) {
    std::size_t used = 0;
    int order = 0;
    try {
      order = std::stoi(name.substr(7), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == name.size() - 7) return bspline_mask(order);
  }
  throw ValidationError("unknown mask '" + name + "'");
}

ReversedPair pseudo_reverse_mask(const Mask& mask, double xi, const KernelOptions& opts) {
  if (!mask.satisfies_parity_sums(1e-12))
    throw ValidationError("mask '" + mask.name + "' violates the parity sum condition");
  ReversedPair out;
  out.mask = mask;
  out.reverse = pseudo_reverse_symbol(mask.even_symbol(), xi, opts.mode, opts.root_tol);
  out.approx = {interleave(out.reverse.approx_poly, mask.odd_symbol()), mask.name + "~"};
  out.kernel = invert_symbol(out.reverse.approx_poly, opts.dft_size, opts.truncation_tol);
  out.kernel.xi = xi;
  return out;
}

}  // namespace manipyr
