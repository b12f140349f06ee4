#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "mcdist/network/types.hpp"
#include "mcdist/pf/solution.hpp"

namespace mcdist::pf {

enum class StartMode { Flat, Provided };

struct NewtonOptions {
    double tolerance = 1e-10;  ///< max |residual|, pu
    int max_iterations = 50;   ///< linear solves
    StartMode start = StartMode::Flat;
    /// Voltages used when start == Provided; currents start at zero.
    std::optional<PfSolution> initial;
};

/// Scalarized IVR equations of a network with the slack voltages fixed:
/// Ohm's law per branch conductor, ideal-transformer coupling and KCL at
/// every non-slack bus phase. Unknowns are the remaining voltages, branch
/// series currents and transformer currents, in rectangular form.
class NewtonSystem {
  public:
    explicit NewtonSystem(const network::Network& net);

    int size() const { return static_cast<int>(unknowns_.size()); }
    /// Row labels, identical to the matching IVR constraint labels.
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::string>& unknowns() const { return unknowns_; }

    RVector flat_start() const;
    /// State from the voltages (and currents, when present) of a solution.
    RVector pack(const PfSolution& sol) const;
    RVector residual(const RVector& x) const;
    Eigen::SparseMatrix<double> jacobian(const RVector& x) const;
    /// Voltages, series and transformer currents, completed with load,
    /// generator and terminal quantities.
    PfSolution unpack(const RVector& x) const;

    struct Slot {
        int index = -1;  ///< position of the real part in x, or -1 for a fixed value
        Complex fixed;
    };
    struct Term {
        Slot slot;
        Complex coef;
    };
    struct Injection {
        int row;         ///< complex KCL row, or -1 at the slack
        double sign;     ///< +1 current leaving the bus
        Slot up, uq;     ///< uq.index == -2 for a wye element
        bool delta;
        Complex s;
        double v_nom;
        network::Zip zip;
    };

  private:
    Complex value(const Slot& s, const RVector& x) const;
    Slot voltage_slot(const std::string& bus, int phase) const;

    const network::Network& net_;
    std::vector<std::string> unknowns_;
    std::vector<std::string> labels_;
    std::map<std::pair<std::string, int>, Slot> voltage_;
    std::map<std::pair<std::string, int>, int> kcl_row_;
    std::vector<std::vector<Term>> rows_;  ///< complex linear rows
    std::vector<Injection> injections_;
};

/// Damped Newton on NewtonSystem. Non-convergence and singular Jacobians
/// are reported through `converged` and `diagnostics`.
PfSolution solve_newton(const network::Network& net, const NewtonOptions& options = {});

}  // namespace mcdist::pf
