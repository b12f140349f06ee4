#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mcdist::dss {

/// Dense symmetric matrix stored row-major. Always square; symmetry holds
/// exactly because every constructor mirrors one triangle.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

    /// Sets both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double v) {
        values_[i * n_ + j] = v;
        values_[j * n_ + i] = v;
    }

    bool operator==(const SymMatrix&) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// Parse an OpenDSS matrix literal with `|` row delimiters. Rows may be
/// lower-triangular, upper-triangular or full; a single undelimited row
/// must hold n*n or n(n+1)/2 entries. Full input takes the lower triangle.
SymMatrix parse_matrix(std::string_view expr, std::size_t n);

/// Number of `|`-separated rows in a matrix literal.
std::size_t matrix_row_count(std::string_view expr);

}  // namespace mcdist::dss
