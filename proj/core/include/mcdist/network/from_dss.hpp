#pragma once

#include <optional>
#include <string>

#include "mcdist/dss/data_model.hpp"
#include "mcdist/network/types.hpp"

namespace mcdist::network {

struct FromDssOptions {
    double sbase = 1e6;  ///< VA per phase
    double vmin = 0.9;
    double vmax = 1.1;
    /// Admittance (pu) added at buses without a grounded path; 0 disables.
    double anti_floating_shunt = 1e-8;
};

Network from_dss(const dss::DssDataModel& model, const FromDssOptions& options = {});

/// Two-winding transformer data in source units.
struct TransformerSpec {
    std::string id;
    int phases = 3;
    std::string bus_primary, bus_secondary;
    std::vector<int> conn_primary, conn_secondary;  ///< phase indices
    Connection config_primary = Connection::Wye;
    Connection config_secondary = Connection::Wye;
    double kv_primary = 12.47, kv_secondary = 12.47;  ///< winding rating, kV
    double kva = 1000.0;
    double tap_primary = 1.0, tap_secondary = 1.0;
    double r_percent = 0.4;  ///< total series resistance, both windings
    double x_percent = 7.0;
    double noload_percent = 0.0;
    double imag_percent = 0.0;
};

struct TransformerParts {
    Bus internal_bus;
    Branch leakage;
    IdealTransformer ideal;
    std::optional<Shunt> magnetizing;
};

/// Primary bus -> leakage branch -> internal bus -> ideal transformer ->
/// secondary bus, with the magnetizing shunt on the internal bus.
/// `vbase_primary`/`vbase_secondary` are line-to-neutral volts.
TransformerParts decompose_transformer(const TransformerSpec& spec, double vbase_primary,
                                       double vbase_secondary, double sbase);

/// Load optional multi-period data: {"delta_t_hours": h, "periods": [{"load_scale": ...}]}.
PeriodSeries periods_from_json(const std::string& text);

}  // namespace mcdist::network
