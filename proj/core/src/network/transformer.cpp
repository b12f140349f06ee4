#include <algorithm>
#include <cmath>
#include <limits>

#include "mcdist/common/errors.hpp"
#include "mcdist/network/from_dss.hpp"
#include "mcdist/network/kron.hpp"

namespace mcdist::network {

TransformerParts decompose_transformer(const TransformerSpec& spec, double vbase_primary,
                                       double vbase_secondary, double sbase) {
    const int n = spec.phases;
    const bool delta_p = spec.config_primary == Connection::Delta;
    const bool delta_s = spec.config_secondary == Connection::Delta;
    if ((delta_p || delta_s) && n != 3) {
        throw UnsupportedError("transformer " + spec.id + ": delta windings need 3 phases");
    }
    if (static_cast<int>(spec.conn_primary.size()) != n || static_cast<int>(spec.conn_secondary.size()) != n) {
        throw ModelError("transformer " + spec.id + ": winding terminals do not match phases=" + std::to_string(n));
    }
    if (vbase_primary <= 0.0 || vbase_secondary <= 0.0) {
        throw ModelError("transformer " + spec.id + ": zero voltage base");
    }
    if (spec.kva <= 0.0) throw ModelError("transformer " + spec.id + ": kva must be positive");

    const double sqrt3 = std::sqrt(3.0);
    auto v_equivalent = [&](double kv) { return n == 1 ? kv * 1000.0 : kv * 1000.0 / sqrt3; };
    const double v1 = v_equivalent(spec.kv_primary);
    const double v2 = v_equivalent(spec.kv_secondary);
    const double s_phase = spec.kva * 1000.0 / n;
    const double a = (v1 * spec.tap_primary / vbase_primary) / (v2 * spec.tap_secondary / vbase_secondary);

    TransformerParts parts;

    Bus& x = parts.internal_bus;
    x.id = spec.id + "/x";
    x.phases = spec.conn_primary;
    std::sort(x.phases.begin(), x.phases.end());
    x.vmin.assign(x.phases.size(), 0.0);
    x.vmax.assign(x.phases.size(), std::numeric_limits<double>::infinity());
    x.vbase = vbase_primary;
    x.internal = true;

    const double zscale = (sbase / s_phase) * (v1 / vbase_primary) * (v1 / vbase_primary);
    const Complex z_leak = Complex(spec.r_percent, spec.x_percent) / 100.0 * zscale;

    Branch& br = parts.leakage;
    br.id = spec.id + "/leak";
    br.f_bus = spec.bus_primary;
    br.t_bus = x.id;
    br.f_conn = spec.conn_primary;
    br.t_conn = spec.conn_primary;
    br.z = CMatrix::Identity(n, n) * z_leak;
    br.y_fr = CMatrix::Zero(n, n);
    br.y_to = CMatrix::Zero(n, n);
    br.rating_current.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    br.rating_power = br.rating_current;
    br.internal = true;

    IdealTransformer& tr = parts.ideal;
    tr.id = spec.id;
    tr.f_config = spec.config_primary;
    tr.t_config = spec.config_secondary;
    tr.tap.assign(static_cast<std::size_t>(n), spec.tap_primary / spec.tap_secondary);
    tr.ratio = a;
    const CMatrix d = delta_incidence().cast<Complex>();
    if (delta_p && !delta_s) {
        // Dy: the wye secondary is the dependent side
        tr.f_bus = spec.bus_secondary;
        tr.f_conn = spec.conn_secondary;
        tr.t_bus = x.id;
        tr.t_conn = spec.conn_primary;
        tr.t = d / (sqrt3 * a);
    } else {
        tr.f_bus = x.id;
        tr.f_conn = spec.conn_primary;
        tr.t_bus = spec.bus_secondary;
        tr.t_conn = spec.conn_secondary;
        tr.t = (!delta_p && delta_s) ? CMatrix(d * (a / sqrt3)) : CMatrix(CMatrix::Identity(n, n) * a);
    }

    if (spec.noload_percent != 0.0 || spec.imag_percent != 0.0) {
        const double yscale = (s_phase / sbase) * (vbase_primary / v1) * (vbase_primary / v1);
        const Complex y = Complex(spec.noload_percent, -spec.imag_percent) / 100.0 * yscale;
        Shunt sh;
        sh.id = spec.id + "/mag";
        sh.bus = x.id;
        sh.conn = spec.conn_primary;
        sh.y = delta_p ? CMatrix(d.transpose() * d * (y / 3.0)) : CMatrix(CMatrix::Identity(n, n) * y);
        parts.magnetizing = std::move(sh);
    }
    return parts;
}

}  // namespace mcdist::network
