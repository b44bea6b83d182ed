// The tropical semifield Trop(u_1, ..., u_m): Laurent monomials in the u_i
// with ordinary multiplication and u^a (+) u^b = u^min(a, b).
#pragma once

#include <vector>

#include "clusterdv/types.hpp"

namespace clusterdv {

class TropicalElement {
 public:
  TropicalElement() = default;
  explicit TropicalElement(IntVector exponents) : exponents_(std::move(exponents)) {}

  /// Multiplicative unit of Trop(u_1..u_m).
  static TropicalElement one(Eigen::Index m) { return TropicalElement(IntVector::Zero(m)); }
  static TropicalElement generator(Eigen::Index m, Eigen::Index i) {
    IntVector e = IntVector::Zero(m);
    e(i) = 1;
    return TropicalElement(std::move(e));
  }

  Eigen::Index size() const { return exponents_.size(); }
  const IntVector& exponents() const { return exponents_; }

  TropicalElement inverse() const { return TropicalElement(-exponents_); }
  TropicalElement pow(Integer e) const { return TropicalElement(exponents_ * e); }

  friend bool operator==(const TropicalElement& a, const TropicalElement& b) {
    return a.exponents_.size() == b.exponents_.size() && a.exponents_ == b.exponents_;
  }

 private:
  IntVector exponents_;
};

TropicalElement trop_mul(const TropicalElement& a, const TropicalElement& b);
TropicalElement trop_oplus(const TropicalElement& a, const TropicalElement& b);

/// Coefficient mutation in direction k (0-based):
///   y_k -> y_k^{-1},  y_i -> y_i y_k^{[b_ki]_+} (1 (+) y_k)^{-b_ki}.
/// `exchange` is the square n x n exchange matrix.
std::vector<TropicalElement> y_mutate(const std::vector<TropicalElement>& y,
                                      const IntMatrix& exchange, Eigen::Index k);

}  // namespace clusterdv
