#include "mcdist/pf/newton.hpp"

#include <Eigen/SparseLU>

#include "mcdist/common/errors.hpp"
#include "mcdist/formulations/names.hpp"
#include "mcdist/pf/load_models.hpp"

namespace mcdist::pf {

namespace names = formulations::names;

namespace {

double max_abs(const RVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Slack phasor pattern extended to phases the slack does not carry.
Complex flat_voltage(const network::Bus& slack, int phase) {
    const int k = slack.index_of(phase);
    if (k >= 0) return slack.v_set[k];
    return slack.v_set.front() * phase_rotation(phase - slack.phases.front());
}

}  // namespace

NewtonSystem::NewtonSystem(const network::Network& net) : net_(net) {
    auto add_pair = [&](const std::string& re, const std::string& im) {
        Slot s{static_cast<int>(unknowns_.size()), {}};
        unknowns_.push_back(re);
        unknowns_.push_back(im);
        return s;
    };
    auto add_row = [&](const std::string& re, const std::string& im) {
        labels_.push_back(re);
        labels_.push_back(im);
        rows_.emplace_back();
        return static_cast<int>(rows_.size()) - 1;
    };

    for (const auto& b : net.buses) {
        for (std::size_t k = 0; k < b.phases.size(); ++k) {
            const int p = b.phases[k];
            const std::string tag = names::phase_tag(p);
            if (b.type == network::BusType::Slack) {
                voltage_[{b.id, p}] = Slot{-1, b.v_set[k]};
                continue;
            }
            voltage_[{b.id, p}] = add_pair(names::bus("ur", b.id, tag), names::bus("ui", b.id, tag));
            kcl_row_[{b.id, p}] = add_row(names::bus("kcl_re", b.id, tag), names::bus("kcl_im", b.id, tag));
        }
    }
    auto kcl = [&](const std::string& bus, int phase) -> std::vector<Term>* {
        auto it = kcl_row_.find({bus, phase});
        return it == kcl_row_.end() ? nullptr : &rows_[it->second];
    };
    auto add_kcl = [&](const std::string& bus, int phase, Term t) {
        if (auto* row = kcl(bus, phase)) row->push_back(t);
    };

    for (const auto& br : net.branches) {
        if (!br.status) continue;
        const std::size_t n = br.size();
        std::vector<Slot> is(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tag = names::phase_tag(br.f_conn[k]);
            is[k] = add_pair(names::var("csr", br.id, tag), names::var("csi", br.id, tag));
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tag = names::phase_tag(br.f_conn[k]);
            const int r = add_row(names::var("ohm_re", br.id, tag), names::var("ohm_im", br.id, tag));
            rows_[r].push_back({voltage_slot(br.f_bus, br.f_conn[k]), 1.0});
            rows_[r].push_back({voltage_slot(br.t_bus, br.t_conn[k]), -1.0});
            for (std::size_t l = 0; l < n; ++l) {
                if (br.z(k, l) != Complex(0.0, 0.0)) rows_[r].push_back({is[l], -br.z(k, l)});
            }
            add_kcl(br.f_bus, br.f_conn[k], {is[k], 1.0});
            add_kcl(br.t_bus, br.t_conn[k], {is[k], -1.0});
            for (std::size_t l = 0; l < n; ++l) {
                if (br.y_fr(k, l) != Complex(0.0, 0.0)) {
                    add_kcl(br.f_bus, br.f_conn[k], {voltage_slot(br.f_bus, br.f_conn[l]), br.y_fr(k, l)});
                }
                if (br.y_to(k, l) != Complex(0.0, 0.0)) {
                    add_kcl(br.t_bus, br.t_conn[k], {voltage_slot(br.t_bus, br.t_conn[l]), br.y_to(k, l)});
                }
            }
        }
    }

    for (const auto& tr : net.transformers) {
        if (!tr.status) continue;
        const std::size_t n = tr.size();
        std::vector<Slot> i_f(n), i_t(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            i_f[k] = add_pair(names::var("ctfr", tr.id, tf), names::var("ctfi", tr.id, tf));
            i_t[k] = add_pair(names::var("cttr", tr.id, tt), names::var("ctti", tr.id, tt));
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::string tf = names::phase_tag(tr.f_conn[k]);
            const std::string tt = names::phase_tag(tr.t_conn[k]);
            const int rv = add_row(names::var("xfv_re", tr.id, tf), names::var("xfv_im", tr.id, tf));
            rows_[rv].push_back({voltage_slot(tr.f_bus, tr.f_conn[k]), 1.0});
            for (std::size_t l = 0; l < n; ++l) {
                if (tr.t(k, l) != Complex(0.0, 0.0)) rows_[rv].push_back({voltage_slot(tr.t_bus, tr.t_conn[l]), -tr.t(k, l)});
            }
            const int ri = add_row(names::var("xfi_re", tr.id, tt), names::var("xfi_im", tr.id, tt));
            rows_[ri].push_back({i_t[k], 1.0});
            for (std::size_t l = 0; l < n; ++l) {
                if (tr.t(l, k) != Complex(0.0, 0.0)) rows_[ri].push_back({i_f[l], std::conj(tr.t(l, k))});
            }
            add_kcl(tr.f_bus, tr.f_conn[k], {i_f[k], 1.0});
            add_kcl(tr.t_bus, tr.t_conn[k], {i_t[k], 1.0});
        }
    }

    for (const auto& sh : net.shunts) {
        for (std::size_t k = 0; k < sh.conn.size(); ++k) {
            for (std::size_t l = 0; l < sh.conn.size(); ++l) {
                if (sh.y(k, l) != Complex(0.0, 0.0)) add_kcl(sh.bus, sh.conn[k], {voltage_slot(sh.bus, sh.conn[l]), sh.y(k, l)});
            }
        }
    }

    auto inject = [&](const std::string& bus, const network::Element& e, double sign, Complex s, double v_nom,
                      const network::Zip& zip) {
        Injection inj;
        inj.up = voltage_slot(bus, e.p);
        inj.uq = e.delta() ? voltage_slot(bus, e.q) : Slot{-2, {}};
        inj.delta = e.delta();
        inj.s = s;
        inj.v_nom = v_nom;
        inj.zip = zip;
        auto row_of = [&](int phase) {
            auto it = kcl_row_.find({bus, phase});
            return it == kcl_row_.end() ? -1 : it->second;
        };
        inj.row = row_of(e.p);
        inj.sign = sign;
        injections_.push_back(inj);
        if (e.delta()) {
            inj.row = row_of(e.q);
            inj.sign = -sign;
            injections_.push_back(inj);
        }
    };
    for (const auto& ld : net.loads) {
        for (std::size_t k = 0; k < ld.elements.size(); ++k) inject(ld.bus, ld.elements[k], 1.0, ld.s_nom[k], ld.v_nom, ld.zip);
    }
    for (const auto& g : net.generators) {
        if (g.is_source()) {
            if (net.bus(g.bus).type != network::BusType::Slack) {
                throw ModelError("source " + g.id + " is not at a slack bus");
            }
            continue;
        }
        for (std::size_t k = 0; k < g.elements.size(); ++k) {
            inject(g.bus, g.elements[k], -1.0, Complex(g.p_set[k], g.q_set[k]), 1.0, network::Zip{0.0, 0.0, 1.0});
        }
    }

    if (2 * rows_.size() != unknowns_.size()) {
        throw ModelError("power-flow system is not square: " + std::to_string(2 * rows_.size()) + " equations, " +
                         std::to_string(unknowns_.size()) + " unknowns");
    }
}

NewtonSystem::Slot NewtonSystem::voltage_slot(const std::string& bus, int phase) const {
    auto it = voltage_.find({bus, phase});
    if (it == voltage_.end()) {
        throw ModelError("bus " + bus + " has no phase " + std::string(1, phase_letter(phase)));
    }
    return it->second;
}

Complex NewtonSystem::value(const Slot& s, const RVector& x) const {
    return s.index < 0 ? s.fixed : Complex(x[s.index], x[s.index + 1]);
}

RVector NewtonSystem::flat_start() const {
    RVector x = RVector::Zero(size());
    const network::Bus& slack = net_.slack();
    for (const auto& [key, slot] : voltage_) {
        if (slot.index < 0) continue;
        const Complex u = flat_voltage(slack, key.second);
        x[slot.index] = u.real();
        x[slot.index + 1] = u.imag();
    }
    return x;
}

RVector NewtonSystem::pack(const PfSolution& sol) const {
    RVector x = flat_start();
    for (const auto& [key, slot] : voltage_) {
        if (slot.index < 0) continue;
        auto b = sol.voltages.find(key.first);
        if (b == sol.voltages.end()) continue;
        auto p = b->second.find(key.second);
        if (p == b->second.end()) continue;
        x[slot.index] = p->second.real();
        x[slot.index + 1] = p->second.imag();
    }
    auto set = [&](int index, Complex v) {
        x[index] = v.real();
        x[index + 1] = v.imag();
    };
    int pos = 0;
    // currents follow the construction order of unknowns
    std::map<std::string, int> lookup;
    for (const auto& name : unknowns_) lookup[name] = pos++;
    for (const auto& br : net_.branches) {
        auto it = sol.branches.find(br.id);
        if (!br.status || it == sol.branches.end()) continue;
        for (std::size_t k = 0; k < br.size() && k < it->second.i_series.size(); ++k) {
            set(lookup.at(names::var("csr", br.id, names::phase_tag(br.f_conn[k]))), it->second.i_series[k]);
        }
    }
    for (const auto& tr : net_.transformers) {
        auto it = sol.transformers.find(tr.id);
        if (!tr.status || it == sol.transformers.end()) continue;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            set(lookup.at(names::var("ctfr", tr.id, names::phase_tag(tr.f_conn[k]))), it->second.i_f[k]);
            set(lookup.at(names::var("cttr", tr.id, names::phase_tag(tr.t_conn[k]))), it->second.i_t[k]);
        }
    }
    return x;
}

RVector NewtonSystem::residual(const RVector& x) const {
    RVector f = RVector::Zero(2 * static_cast<int>(rows_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        Complex sum = 0.0;
        for (const auto& t : rows_[r]) sum += t.coef * value(t.slot, x);
        f[2 * r] = sum.real();
        f[2 * r + 1] = sum.imag();
    }
    for (const auto& inj : injections_) {
        if (inj.row < 0) continue;
        const Complex u = inj.delta ? value(inj.up, x) - value(inj.uq, x) : value(inj.up, x);
        const Complex i = zip_current(u, inj.s, inj.v_nom, inj.zip).i * inj.sign;
        f[2 * inj.row] += i.real();
        f[2 * inj.row + 1] += i.imag();
    }
    return f;
}

Eigen::SparseMatrix<double> NewtonSystem::jacobian(const RVector& x) const {
    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](int row, int col, Complex d_re, Complex d_im) {
        // d(row)/d(x[col]) = d_re, d(row)/d(x[col+1]) = d_im for the complex row
        trip.emplace_back(2 * row, col, d_re.real());
        trip.emplace_back(2 * row + 1, col, d_re.imag());
        trip.emplace_back(2 * row, col + 1, d_im.real());
        trip.emplace_back(2 * row + 1, col + 1, d_im.imag());
    };
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        for (const auto& t : rows_[r]) {
            if (t.slot.index >= 0) add(static_cast<int>(r), t.slot.index, t.coef, t.coef * Complex(0.0, 1.0));
        }
    }
    for (const auto& inj : injections_) {
        if (inj.row < 0) continue;
        const Complex u = inj.delta ? value(inj.up, x) - value(inj.uq, x) : value(inj.up, x);
        const ZipCurrent z = zip_current(u, inj.s, inj.v_nom, inj.zip);
        if (inj.up.index >= 0) add(inj.row, inj.up.index, inj.sign * z.di_dur, inj.sign * z.di_dui);
        if (inj.delta && inj.uq.index >= 0) add(inj.row, inj.uq.index, -inj.sign * z.di_dur, -inj.sign * z.di_dui);
    }
    Eigen::SparseMatrix<double> j(size(), size());
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

PfSolution NewtonSystem::unpack(const RVector& x) const {
    PfSolution sol;
    for (const auto& [key, slot] : voltage_) sol.voltages[key.first][key.second] = value(slot, x);
    std::map<std::string, int> lookup;
    for (std::size_t i = 0; i < unknowns_.size(); ++i) lookup[unknowns_[i]] = static_cast<int>(i);
    auto get = [&](const std::string& name) {
        const int i = lookup.at(name);
        return Complex(x[i], x[i + 1]);
    };
    for (const auto& br : net_.branches) {
        if (!br.status) continue;
        auto& flow = sol.branches[br.id];
        for (std::size_t k = 0; k < br.size(); ++k) {
            flow.i_series.push_back(get(names::var("csr", br.id, names::phase_tag(br.f_conn[k]))));
        }
    }
    for (const auto& tr : net_.transformers) {
        if (!tr.status) continue;
        auto& flow = sol.transformers[tr.id];
        for (std::size_t k = 0; k < tr.size(); ++k) {
            flow.i_f.push_back(get(names::var("ctfr", tr.id, names::phase_tag(tr.f_conn[k]))));
            flow.i_t.push_back(get(names::var("cttr", tr.id, names::phase_tag(tr.t_conn[k]))));
        }
    }
    complete_solution(net_, sol);
    return sol;
}

namespace {

std::string singular_row(const NewtonSystem& sys, const Eigen::SparseMatrix<double>& j) {
    const RMatrix dense = RMatrix(j).transpose();
    Eigen::FullPivLU<RMatrix> lu(dense);
    if (lu.rank() == dense.rows()) return {};
    const RVector left = lu.kernel().col(0);
    Eigen::Index row = 0;
    left.cwiseAbs().maxCoeff(&row);
    return sys.labels()[static_cast<std::size_t>(row)];
}

}  // namespace

PfSolution solve_newton(const network::Network& net, const NewtonOptions& options) {
    if (!(options.tolerance > 0.0)) throw ModelError("Newton tolerance must be positive");
    const NewtonSystem sys(net);
    RVector x = options.start == StartMode::Provided && options.initial ? sys.pack(*options.initial) : sys.flat_start();
    RVector f = sys.residual(x);
    double norm = max_abs(f);
    int iterations = 0;
    std::vector<std::string> diagnostics;

    while (norm > options.tolerance && iterations < options.max_iterations) {
        const Eigen::SparseMatrix<double> j = sys.jacobian(x);
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(j);
        lu.factorize(j);
        RVector dx;
        if (lu.info() == Eigen::Success) dx = lu.solve(-f);
        if (lu.info() != Eigen::Success || !dx.allFinite()) {
            const std::string label = singular_row(sys, j);
            diagnostics.push_back("singular Jacobian" + (label.empty() ? std::string() : " at equation " + label));
            break;
        }
        ++iterations;
        bool accepted = false;
        double alpha = 1.0;
        for (int halving = 0; halving < 30 && !accepted; ++halving, alpha *= 0.5) {
            RVector xn = x + alpha * dx;
            RVector fn = sys.residual(xn);
            const double nn = max_abs(fn);
            if (nn < norm || nn <= options.tolerance) {
                x = std::move(xn);
                f = std::move(fn);
                norm = nn;
                accepted = true;
            }
        }
        if (!accepted) {
            diagnostics.push_back("line search could not reduce the residual");
            break;
        }
    }

    PfSolution sol = sys.unpack(x);
    sol.method = "newton";
    sol.iterations = iterations;
    sol.max_residual = norm;
    sol.converged = norm <= options.tolerance;
    if (!sol.converged && diagnostics.empty()) {
        Eigen::Index worst = 0;
        f.cwiseAbs().maxCoeff(&worst);
        diagnostics.push_back("no convergence after " + std::to_string(iterations) + " iterations; largest residual at " +
                              sys.labels()[static_cast<std::size_t>(worst)]);
    }
    sol.diagnostics.insert(sol.diagnostics.end(), diagnostics.begin(), diagnostics.end());
    return sol;
}

}  // namespace mcdist::pf
