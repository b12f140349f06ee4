#include "mcdist/network/kron.hpp"

#include <algorithm>

#include "mcdist/common/errors.hpp"

namespace mcdist::network {

CMatrix select(const CMatrix& m, const std::vector<int>& keep) {
    const auto n = static_cast<Eigen::Index>(keep.size());
    CMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(keep[i], keep[j]);
    return out;
}

CMatrix kron_reduce(const CMatrix& z, const std::vector<int>& keep) {
    std::vector<int> drop;
    for (int i = 0; i < z.rows(); ++i) {
        if (std::find(keep.begin(), keep.end(), i) == keep.end()) drop.push_back(i);
    }
    if (drop.empty()) return select(z, keep);

    const auto k = static_cast<Eigen::Index>(keep.size());
    const auto n = static_cast<Eigen::Index>(drop.size());
    CMatrix zkk = select(z, keep);
    CMatrix zkn(k, n), znk(n, k), znn(n, n);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            zkn(i, j) = z(keep[i], drop[j]);
            znk(j, i) = z(drop[j], keep[i]);
        }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) znn(i, j) = z(drop[i], drop[j]);

    Eigen::FullPivLU<CMatrix> lu(znn);
    if (!lu.isInvertible()) throw ModelError("kron reduction: eliminated block is singular");
    return zkk - zkn * lu.solve(znk);
}

RMatrix delta_incidence() {
    RMatrix d(3, 3);
    d << 1, -1, 0, 0, 1, -1, -1, 0, 1;
    return d;
}

}  // namespace mcdist::network
