#include "clusterdv/dvector.hpp"

namespace clusterdv {

DVector dvec_from_expansion(const LaurentPolynomial& p, Eigen::Index n) {
  const ExponentVector lo = lp_min_exponents(p);
  DVector d(n);
  for (Eigen::Index j = 0; j < n; ++j) d(j) = -Integer{lo[static_cast<std::size_t>(j)]};
  return d;
}

std::vector<DVector> initial_dvectors(Eigen::Index n) {
  std::vector<DVector> d;
  for (Eigen::Index l = 0; l < n; ++l) d.push_back(-DVector::Unit(n, l));
  return d;
}

DVector dvec_recurrence_step(const std::vector<DVector>& current, const IntMatrix& matrix,
                             Eigen::Index k) {
  const auto n = static_cast<Eigen::Index>(current.size());
  if (k < 0 || k >= n) throw IndexOutOfRange("dvec_recurrence_step: direction out of range");
  if (matrix.cols() != n || matrix.rows() < n) {
    throw std::invalid_argument("dvec_recurrence_step: matrix does not match the cluster size");
  }
  const Eigen::Index dim = current.front().size();
  DVector pos = DVector::Zero(dim);
  DVector neg = DVector::Zero(dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Integer b = matrix(i, k);
    if (b > 0) pos += b * current[static_cast<std::size_t>(i)];
    if (b < 0) neg += -b * current[static_cast<std::size_t>(i)];
  }
  return pos.cwiseMax(neg) - current[static_cast<std::size_t>(k)];
}

std::vector<DVector> dvec_along_walk(Eigen::Index n, const ExchangeMatrix& start,
                                     const MutationWalk& walk) {
  if (start.rank() != n) throw std::invalid_argument("dvec_along_walk: rank mismatch");
  walk.check_rank(static_cast<int>(n));
  std::vector<DVector> d = initial_dvectors(n);
  IntMatrix b = start.exchange();
  ExchangeMatrix m(b);
  for (int k : walk.directions()) {
    d[static_cast<std::size_t>(k)] = dvec_recurrence_step(d, m.extended(), k);
    m = matrix_mutate(m, k);
  }
  return d;
}

}  // namespace clusterdv
