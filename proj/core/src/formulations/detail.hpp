#pragma once

#include <map>
#include <string>
#include <utility>

#include "mcdist/common/linalg.hpp"
#include "mcdist/formulations/names.hpp"
#include "mcdist/ir/model.hpp"
#include "mcdist/network/types.hpp"

namespace mcdist::formulations::detail {

using ir::LinearExpr;
using ir::QuadExpr;

/// Complex quantity as a pair of real linear expressions.
struct CLin {
    LinearExpr re, im;
};

struct CQuad {
    QuadExpr re, im;
};

/// acc += c * x
inline void add_scaled(CLin& acc, const CLin& x, Complex c) {
    acc.re.add(x.re, c.real());
    acc.re.add(x.im, -c.imag());
    acc.im.add(x.im, c.real());
    acc.im.add(x.re, c.imag());
}

inline CLin scaled(const CLin& x, Complex c) {
    CLin out;
    add_scaled(out, x, c);
    return out;
}

inline CLin conj(CLin x) {
    x.im *= -1.0;
    return x;
}

inline CLin operator-(const CLin& a, const CLin& b) { return {a.re - b.re, a.im - b.im}; }

/// acc += scale * u * conj(m) * conj(v), the power term of S = U (M V)^H.
inline void add_power_product(CQuad& acc, const CLin& u, Complex m, const CLin& v, double scale = 1.0) {
    const double g = m.real() * scale;
    const double b = m.imag() * scale;
    // A = Re(u conj v), B = Im(u conj v)
    acc.re.add_product(u.re, v.re, g);
    acc.re.add_product(u.im, v.im, g);
    acc.re.add_product(u.im, v.re, b);
    acc.re.add_product(u.re, v.im, -b);
    acc.im.add_product(u.im, v.re, g);
    acc.im.add_product(u.re, v.im, -g);
    acc.im.add_product(u.re, v.re, -b);
    acc.im.add_product(u.im, v.im, -b);
}

/// acc += u * conj(i): complex power of voltage u and current i.
inline void add_power(CQuad& acc, const CLin& u, const CLin& i, double scale = 1.0) {
    add_power_product(acc, u, Complex(1.0, 0.0), i, scale);
}

/// Rectangular voltage variables ur/ui of a bus phase.
inline CLin bus_voltage(const ir::MathModel& m, const std::string& bus, int phase) {
    return {m.v(names::bus("ur", bus, names::phase_tag(phase))), m.v(names::bus("ui", bus, names::phase_tag(phase)))};
}

/// Voltage across an element: U_p - U_q, or U_p for wye.
inline CLin element_voltage(const ir::MathModel& m, const std::string& bus, const network::Element& e) {
    CLin u = bus_voltage(m, bus, e.p);
    if (e.delta()) u = u - bus_voltage(m, bus, e.q);
    return u;
}

/// Accumulates per-(bus, phase) balance rows before they become constraints.
class BalanceRows {
  public:
    CQuad& at(const std::string& bus, int phase) { return rows_[{bus, phase}]; }
    const std::map<std::pair<std::string, int>, CQuad>& rows() const { return rows_; }

  private:
    std::map<std::pair<std::string, int>, CQuad> rows_;
};

/// Declares ur/ui for every bus phase and fixes the slack phasors.
void add_rectangular_voltages(ir::MathModel& m, const network::Network& net);

/// c2 P^2 + c1 P + c0 of the generator's total output in MW, times `weight`.
void add_fuel_cost(ir::MathModel& m, const network::Network& net, const network::Generator& g,
                   const LinearExpr& p_total_pu, double weight = 1.0);

/// Every ZIP load with a constant-current share needs a magnitude variable.
inline bool needs_vm(const network::Load& ld) { return ld.zip.a_i != 0.0; }

/// Throws ModelError for an island with no slack or several.
void require_slack_per_island(const network::Network& net);

/// Series impedance of exactly zero: switches and ideal jumpers.
bool zero_impedance(const network::Branch& br);

/// Turns a balance accumulator into "<prefix>_p"/"<prefix>_q" or
/// "<prefix>_re"/"<prefix>_im" constraints per bus phase.
void emit_balance(ir::MathModel& m, const BalanceRows& rows, const std::string& re_family,
                  const std::string& im_family, int period = -1);

}  // namespace mcdist::formulations::detail
