#include "manipyr/laurent.hpp"

#include <algorithm>
#include <cmath>

namespace manipyr {

LaurentPoly::LaurentPoly(int min_index, std::vector<double> coeffs)
    : min_index_(min_index), coeffs_(std::move(coeffs)) {
  trim();
}

void LaurentPoly::trim() {
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](double c) { return c != 0.0; });
  if (first == coeffs_.end()) {
    coeffs_.clear();
    min_index_ = 0;
    return;
  }
  auto last = std::find_if(coeffs_.rbegin(), coeffs_.rend(), [](double c) { return c != 0.0; });
  min_index_ += static_cast<int>(first - coeffs_.begin());
  coeffs_.erase(last.base(), coeffs_.end());
  coeffs_.erase(coeffs_.begin(), first);
}

double LaurentPoly::operator[](int k) const {
  if (is_zero() || k < min_index_ || k > max_index()) return 0.0;
  return coeffs_[static_cast<std::size_t>(k - min_index_)];
}

std::complex<double> LaurentPoly::operator()(std::complex<double> z) const {
  if (is_zero()) return 0.0;
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc * std::pow(z, min_index_);
}

double LaurentPoly::sum() const {
  double s = 0.0;
  for (double c : coeffs_) s += c;
  return s;
}

double LaurentPoly::l1_norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += std::abs(c);
  return s;
}

double LaurentPoly::sup_norm() const {
  double s = 0.0;
  for (double c : coeffs_) s = std::max(s, std::abs(c));
  return s;
}

double LaurentPoly::first_abs_moment() const {
  double s = 0.0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j)
    s += std::abs(coeffs_[j]) * std::abs(min_index_ + static_cast<int>(j));
  return s;
}

int LaurentPoly::bandwidth() const {
  if (is_zero()) return 0;
  return std::max(std::abs(min_index_), std::abs(max_index()));
}

namespace {

// Floor division for possibly negative numerators.
int floor_div2(int k) { return (k >= 0) ? k / 2 : -((-k + 1) / 2); }

LaurentPoly parity_part(const LaurentPoly& p, int parity) {
  if (p.is_zero()) return {};
  int lo = p.min_index();
  if (((lo % 2) + 2) % 2 != parity) ++lo;
  if (lo > p.max_index()) return {};
  std::vector<double> out;
  for (int k = lo; k <= p.max_index(); k += 2) out.push_back(p[k]);
  return LaurentPoly(floor_div2(lo - parity), std::move(out));
}

}  // namespace

LaurentPoly LaurentPoly::even_part() const { return parity_part(*this, 0); }
LaurentPoly LaurentPoly::odd_part() const { return parity_part(*this, 1); }

LaurentPoly LaurentPoly::scaled(double s) const {
  std::vector<double> out(coeffs_);
  for (double& c : out) c *= s;
  return LaurentPoly(min_index_, std::move(out));
}

namespace {

LaurentPoly combine(const LaurentPoly& a, const LaurentPoly& b, double sign) {
  if (a.is_zero()) return b.scaled(sign);
  if (b.is_zero()) return a;
  const int lo = std::min(a.min_index(), b.min_index());
  const int hi = std::max(a.max_index(), b.max_index());
  std::vector<double> out(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) out[static_cast<std::size_t>(k - lo)] = a[k] + sign * b[k];
  return LaurentPoly(lo, std::move(out));
}

}  // namespace

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) { return combine(a, b, 1.0); }
LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return combine(a, b, -1.0); }

LaurentPoly convolve(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  std::vector<double> out(ac.size() + bc.size() - 1, 0.0);
  for (std::size_t i = 0; i < ac.size(); ++i)
    for (std::size_t j = 0; j < bc.size(); ++j) out[i + j] += ac[i] * bc[j];
  return LaurentPoly(a.min_index() + b.min_index(), std::move(out));
}

LaurentPoly interleave(const LaurentPoly& even, const LaurentPoly& odd) {
  if (even.is_zero() && odd.is_zero()) return {};
  int lo = 0;
  int hi = 0;
  bool first = true;
  auto widen = [&](int l, int h) {
    lo = first ? l : std::min(lo, l);
    hi = first ? h : std::max(hi, h);
    first = false;
  };
  if (!even.is_zero()) widen(2 * even.min_index(), 2 * even.max_index());
  if (!odd.is_zero()) widen(2 * odd.min_index() + 1, 2 * odd.max_index() + 1);
  std::vector<double> out(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (int k = lo; k <= hi; ++k) {
    const int half = floor_div2(k);
    out[static_cast<std::size_t>(k - lo)] = (k - 2 * half == 0) ? even[half] : odd[half];
  }
  return LaurentPoly(lo, std::move(out));
}

}  // namespace manipyr
