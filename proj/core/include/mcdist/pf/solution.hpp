#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mcdist/common/linalg.hpp"
#include "mcdist/ir/model.hpp"
#include "mcdist/network/types.hpp"

namespace mcdist::pf {

/// Currents are per conductor. `i_fr` flows from the f bus into the branch,
/// `i_to` from the t bus into the branch.
struct BranchFlow {
    std::vector<Complex> i_series;
    std::vector<Complex> i_sh_fr, i_sh_to;
    std::vector<Complex> i_fr, i_to;
    std::vector<Complex> s_fr, s_to;
};

/// Currents flowing from each bus into the ideal transformer.
struct TransformerFlow {
    std::vector<Complex> i_f, i_t;
};

struct PfSolution {
    std::string method;
    bool converged = false;
    int iterations = 0;
    double max_residual = ir::kInf;
    /// Bus id -> phasors in the order of Bus::phases.
    std::map<std::string, std::map<int, Complex>> voltages;
    std::map<std::string, BranchFlow> branches;
    std::map<std::string, TransformerFlow> transformers;
    /// Per element, from terminal p towards q (or ground).
    std::map<std::string, std::vector<Complex>> load_currents;
    /// Per element, injected into terminal p.
    std::map<std::string, std::vector<Complex>> generator_currents;
    std::vector<std::string> diagnostics;

    Complex voltage(const std::string& bus, int phase) const;
};

/// Fill branch, transformer-derived powers, load and generator currents from
/// voltages, series currents and transformer currents already present.
void complete_solution(const network::Network& net, PfSolution& sol);

/// Values for every variable of build_pf_ivr(net).
ir::Assignment to_ivr_assignment(const network::Network& net, const PfSolution& sol);

/// Solution file: schema "mcdist.solution/1" with the IVR variable values
/// plus convergence metadata.
std::string to_json(const network::Network& net, const PfSolution& sol);

/// Voltages and metadata from a solution file; other values are ignored.
PfSolution pf_from_json(const std::string& text);

/// Buses marked floating in the network.
std::set<std::string> floating_buses(const network::Network& net);

}  // namespace mcdist::pf
