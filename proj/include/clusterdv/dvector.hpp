// Denominator vectors, computed two independent ways: read off a Laurent
// expansion, and propagated through the exchange-matrix recurrence.
#pragma once

#include <vector>

#include "clusterdv/laurent.hpp"
#include "clusterdv/seed.hpp"
#include "clusterdv/types.hpp"

namespace clusterdv {

/// d = (d_1, ..., d_n): x = f / (x_1^{d_1} ... x_n^{d_n}) with no x_j dividing f.
using DVector = IntVector;

/// d_j = -(minimal exponent of x_j in p) for j < n. Frozen variables are
/// ignored. Throws ZeroPolynomial.
DVector dvec_from_expansion(const LaurentPolynomial& p, Eigen::Index n);

/// (-e_1, ..., -e_n).
std::vector<DVector> initial_dvectors(Eigen::Index n);

/// d(x_k') = -d(x_k) + max(sum_{b_ik > 0} b_ik d(x_i), sum_{b_ik < 0} -b_ik d(x_i)),
/// the max taken componentwise. Only the top n x n block of `matrix` is read.
DVector dvec_recurrence_step(const std::vector<DVector>& current, const IntMatrix& matrix,
                             Eigen::Index k);

/// All n d-vectors at the end of `walk`, starting from the initial conditions.
std::vector<DVector> dvec_along_walk(Eigen::Index n, const ExchangeMatrix& start,
                                     const MutationWalk& walk);

/// True iff every entry is >= 0.
inline bool is_nonnegative(const DVector& d) { return (d.array() >= 0).all(); }

}  // namespace clusterdv
