#include "clusterdv/tropical.hpp"

#include <string>

namespace clusterdv {

namespace {
void require_same_size(const TropicalElement& a, const TropicalElement& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("tropical: length mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}
}  // namespace

TropicalElement trop_mul(const TropicalElement& a, const TropicalElement& b) {
  require_same_size(a, b);
  return TropicalElement(a.exponents() + b.exponents());
}

TropicalElement trop_oplus(const TropicalElement& a, const TropicalElement& b) {
  require_same_size(a, b);
  return TropicalElement(a.exponents().cwiseMin(b.exponents()));
}

std::vector<TropicalElement> y_mutate(const std::vector<TropicalElement>& y,
                                      const IntMatrix& exchange, Eigen::Index k) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (exchange.rows() != n || exchange.cols() != n) {
    throw std::invalid_argument("y_mutate: exchange matrix must be n x n with n = |y|");
  }
  if (k < 0 || k >= n) throw IndexOutOfRange("y_mutate: direction out of range");

  const TropicalElement& yk = y[static_cast<std::size_t>(k)];
  const TropicalElement one_plus_yk = trop_oplus(TropicalElement::one(yk.size()), yk);
  std::vector<TropicalElement> out;
  out.reserve(y.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == k) {
      out.push_back(yk.inverse());
      continue;
    }
    const Integer b = exchange(k, i);
    out.push_back(trop_mul(trop_mul(y[static_cast<std::size_t>(i)], yk.pow(positive_part(b))),
                           one_plus_yk.pow(-b)));
  }
  return out;
}

}  // namespace clusterdv
