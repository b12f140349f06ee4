#include "mcdist/pf/load_models.hpp"

#include <algorithm>
#include <cmath>

namespace mcdist::pf {

ZipCurrent zip_current(Complex u, Complex s_nom, double v_nom, const network::Zip& zip) {
    const double m = std::abs(u);
    const double mg = std::max(m, kLowVoltageGuard);
    const double f = zip.a_z / (v_nom * v_nom) + zip.a_i / (v_nom * mg) + zip.a_p / (mg * mg);
    const Complex cs = std::conj(s_nom);
    const Complex c = cs * u;

    ZipCurrent out;
    out.i = c * f;
    out.di_dur = cs * f;
    out.di_dui = Complex(0.0, 1.0) * cs * f;
    if (m > kLowVoltageGuard) {
        const double df = -zip.a_i / (v_nom * m * m) - 2.0 * zip.a_p / (m * m * m);
        out.di_dur += c * df * (u.real() / m);
        out.di_dui += c * df * (u.imag() / m);
    }
    return out;
}

ZipCurrent constant_power_current(Complex u, Complex s) { return zip_current(u, s, 1.0, network::Zip{0.0, 0.0, 1.0}); }

Complex element_voltage(const network::Element& e, Complex up, Complex uq) { return e.delta() ? up - uq : up; }

double zip_factor(double vm, double v_nom, const network::Zip& zip) {
    const double m = vm / v_nom;
    return zip.a_z * m * m + zip.a_i * m + zip.a_p;
}

}  // namespace mcdist::pf
