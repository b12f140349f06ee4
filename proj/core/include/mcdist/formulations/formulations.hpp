#pragma once

#include <string>

#include "mcdist/ir/model.hpp"
#include "mcdist/network/types.hpp"
#include "mcdist/pf/solution.hpp"

namespace mcdist::formulations {

enum class FormulationTag { IVR, ACR, SOC_BFM, LINDISTFLOW };

std::string to_string(FormulationTag tag);
/// Accepts "ivr", "acr", "socbfm", "lindistflow" (case-insensitive).
FormulationTag parse_formulation(const std::string& text);

/// Power-flow feasibility model in current-voltage variables; no objective.
ir::MathModel build_pf_ivr(const network::Network& net);

/// OPF in rectangular voltages with power-flow variables and a fuel-cost objective.
ir::MathModel build_opf_acr(const network::Network& net);

struct SocOptions {
    /// Emit cones in norm form instead of the rotated quadratic form.
    bool conic = false;
};

/// SOC relaxation of the branch flow model in lifted variables. Radial only.
ir::MathModel build_opf_socbfm(const network::Network& net, const SocOptions& options = {});

struct LinDistFlowOptions {
    /// Tangent cuts per quadratic cost term; 0 rejects quadratic costs.
    int pwl_segments = 0;
};

/// Linear branch flow approximation, multi-period when net.periods is set.
ir::MathModel build_opf_lindistflow(const network::Network& net, const LinDistFlowOptions& options = {});

/// W = U U^H, L = I I^H, S = U I^H and the auxiliary load/generator values
/// for every variable of build_opf_socbfm(net).
ir::Assignment lift_solution(const network::Network& net, const pf::PfSolution& sol);

/// Values for every variable of build_opf_acr(net).
ir::Assignment to_acr_assignment(const network::Network& net, const pf::PfSolution& sol);

/// Throws UnsupportedError for delta-connected generators, which the OPF
/// forms do not model.
void require_wye_generators(const network::Network& net, const std::string& form);

}  // namespace mcdist::formulations
