#include <algorithm>
#include <cctype>

#include "detail.hpp"
#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/formulations.hpp"
#include "mcdist/network/topology.hpp"

namespace mcdist::formulations {

std::string to_string(FormulationTag tag) {
    switch (tag) {
        case FormulationTag::IVR: return "IVR";
        case FormulationTag::ACR: return "ACR";
        case FormulationTag::SOC_BFM: return "SOC_BFM";
        case FormulationTag::LINDISTFLOW: return "LINDISTFLOW";
    }
    return "?";
}

FormulationTag parse_formulation(const std::string& text) {
    std::string t;
    for (char c : text) {
        if (c != '_' && c != '-') t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (t == "ivr") return FormulationTag::IVR;
    if (t == "acr") return FormulationTag::ACR;
    if (t == "socbfm") return FormulationTag::SOC_BFM;
    if (t == "lindistflow") return FormulationTag::LINDISTFLOW;
    throw UnsupportedError("unknown formulation '" + text + "' (expected ivr, acr, socbfm or lindistflow)");
}

void require_wye_generators(const network::Network& net, const std::string& form) {
    for (const auto& g : net.generators) {
        for (const auto& e : g.elements) {
            if (e.delta()) {
                throw UnsupportedError(form + ": delta-connected generator " + g.id + " is not supported");
            }
        }
    }
}

namespace detail {

void add_rectangular_voltages(ir::MathModel& m, const network::Network& net) {
    for (const auto& b : net.buses) {
        for (int p : b.phases) {
            m.add_variable(names::bus("ur", b.id, names::phase_tag(p)));
            m.add_variable(names::bus("ui", b.id, names::phase_tag(p)));
        }
    }
    for (const auto& b : net.buses) {
        if (b.type != network::BusType::Slack) continue;
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            const std::string tag = names::phase_tag(b.phases[k]);
            m.add_linear(names::bus("slack_re", b.id, tag), m.v(names::bus("ur", b.id, tag)), ir::Sense::Eq,
                         b.v_set[k].real());
            m.add_linear(names::bus("slack_im", b.id, tag), m.v(names::bus("ui", b.id, tag)), ir::Sense::Eq,
                         b.v_set[k].imag());
        }
    }
}

void add_fuel_cost(ir::MathModel& m, const network::Network& net, const network::Generator& g,
                   const LinearExpr& p_total_pu, double weight) {
    const double to_mw = net.sbase / 1e6;
    LinearExpr p_mw = to_mw * p_total_pu;
    if (g.c2 != 0.0) m.objective.add_product(p_mw, p_mw, g.c2 * weight);
    m.objective.linear.add(p_mw, g.c1 * weight);
    m.objective.linear.constant += g.c0 * weight;
}

void require_slack_per_island(const network::Network& net) {
    for (const auto& island : network::islands(net)) {
        int slack = 0;
        for (int b : island) {
            if (net.buses[b].type == network::BusType::Slack) ++slack;
        }
        if (slack > 1) throw ModelError("island of bus " + net.buses[island.front()].id + " has several slack buses");
        if (slack == 0) {
            throw ModelError("island of bus " + net.buses[island.front()].id + " has no slack bus");
        }
    }
}

bool zero_impedance(const network::Branch& br) { return br.z.cwiseAbs().maxCoeff() == 0.0; }

void emit_balance(ir::MathModel& m, const BalanceRows& rows, const std::string& re_family,
                  const std::string& im_family, int period) {
    for (const auto& [key, row] : rows.rows()) {
        const std::string tag = names::phase_tag(key.second);
        m.add_quadratic(names::bus(re_family, key.first, tag, period), row.re, ir::Sense::Eq);
        m.add_quadratic(names::bus(im_family, key.first, tag, period), row.im, ir::Sense::Eq);
    }
}

}  // namespace detail
}  // namespace mcdist::formulations
