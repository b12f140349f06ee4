#pragma once

#include <complex>

#include <Eigen/Dense>

namespace mcdist {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Unit phasor for phase index p (0 = a, 1 = b, 2 = c) of a positive-sequence set.
inline Complex phase_rotation(int p) {
    return std::polar(1.0, -2.0 * kPi * p / 3.0);
}

/// gamma^k with gamma = exp(-j 2 pi / 3); k may be negative.
inline Complex gamma_power(int k) {
    return std::polar(1.0, -2.0 * kPi * k / 3.0);
}

inline char phase_letter(int p) { return static_cast<char>('a' + p); }

}  // namespace mcdist
