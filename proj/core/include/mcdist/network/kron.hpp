#pragma once

#include <vector>

#include "mcdist/common/linalg.hpp"

namespace mcdist::network {

/// Schur complement Z_kk - Z_kn Z_nn^-1 Z_nk over the `keep` indices, in
/// the order given. Throws ModelError when Z_nn is singular.
CMatrix kron_reduce(const CMatrix& z, const std::vector<int>& keep);

/// Rows and columns of `m` at `keep`, in order.
CMatrix select(const CMatrix& m, const std::vector<int>& keep);

/// Phase-to-phase incidence [[1,-1,0],[0,1,-1],[-1,0,1]].
RMatrix delta_incidence();

}  // namespace mcdist::network
