#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace manipyr {

/// Finitely supported two-sided real sequence, read as the Laurent
/// polynomial p(z) = sum_j coeffs[j] * z^(min_index + j).
///
/// Stored coefficients are canonically trimmed: the first and last entries
/// are nonzero, and the zero polynomial has no coefficients (min_index 0).
class LaurentPoly {
 public:
  LaurentPoly() = default;
  LaurentPoly(int min_index, std::vector<double> coeffs);

  static LaurentPoly delta() { return LaurentPoly(0, {1.0}); }
  static LaurentPoly monomial(int k, double c = 1.0) { return LaurentPoly(k, {c}); }

  int min_index() const { return min_index_; }
  int max_index() const { return min_index_ + static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  bool is_zero() const { return coeffs_.empty(); }

  /// Degree of the polynomial left after factoring out z^min_index.
  int degree() const { return is_zero() ? -1 : static_cast<int>(coeffs_.size()) - 1; }

  /// Coefficient of z^k; zero outside the support.
  double operator[](int k) const;

  std::complex<double> operator()(std::complex<double> z) const;
  double sum() const;
  double l1_norm() const;
  double sup_norm() const;
  /// sum_k |c_k| * |k|
  double first_abs_moment() const;
  /// Band half-width s with c_k = 0 for |k| > s.
  int bandwidth() const;

  /// Entries at even (odd) indices, re-indexed by k -> k/2 (k -> (k-1)/2).
  LaurentPoly even_part() const;
  LaurentPoly odd_part() const;

  LaurentPoly scaled(double s) const;

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) = default;

 private:
  void trim();

  int min_index_ = 0;
  std::vector<double> coeffs_;
};

/// Exact coefficient convolution: (a*b)_k = sum_j a_j b_{k-j}.
LaurentPoly convolve(const LaurentPoly& a, const LaurentPoly& b);

/// Merges even and odd sub-sequences back into one mask: inverse of
/// even_part()/odd_part().
LaurentPoly interleave(const LaurentPoly& even, const LaurentPoly& odd);

}  // namespace manipyr
