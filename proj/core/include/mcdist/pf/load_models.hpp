#pragma once

#include "mcdist/common/linalg.hpp"
#include "mcdist/network/types.hpp"

namespace mcdist::pf {

/// Below this magnitude the constant-power and constant-current terms are
/// evaluated at the threshold, so the current goes linearly through zero.
inline constexpr double kLowVoltageGuard = 0.05;

/// Current drawn by a ZIP element with nominal power `s_nom` at element
/// voltage `u`, and its derivatives with respect to Re(u) and Im(u).
struct ZipCurrent {
    Complex i;
    Complex di_dur;
    Complex di_dui;
};

ZipCurrent zip_current(Complex u, Complex s_nom, double v_nom, const network::Zip& zip);

/// Constant-power injection conj(s / u) with the same low-voltage guard.
ZipCurrent constant_power_current(Complex u, Complex s);

/// Element voltage U_p - U_q, or U_p for a wye element.
Complex element_voltage(const network::Element& e, Complex up, Complex uq);

/// ZIP power factor a_z m^2 + a_i m + a_p at m = |u| / v_nom.
double zip_factor(double vm, double v_nom, const network::Zip& zip);

}  // namespace mcdist::pf
