#include "mcdist/pf/compare.hpp"

#include <algorithm>
#include <cmath>

#include "mcdist/common/errors.hpp"

namespace mcdist::pf {

namespace {

double relative(double a, double b) {
    if (b != 0.0) return std::abs((a - b) / b);
    return a == 0.0 ? 0.0 : ir::kInf;
}

}  // namespace

DeltaReport compare_report(const PfSolution& a, const PfSolution& b, const std::set<std::string>& floating) {
    if (a.voltages.size() != b.voltages.size()) {
        throw ModelError("solutions cover different bus sets (" + std::to_string(a.voltages.size()) + " vs " +
                         std::to_string(b.voltages.size()) + " buses)");
    }
    DeltaReport report;
    for (const auto& [bus, vb] : b.voltages) {
        auto it = a.voltages.find(bus);
        if (it == a.voltages.end()) throw ModelError("bus " + bus + " is missing from the first solution");
        const auto& va = it->second;
        if (va.size() != vb.size() || !std::equal(va.begin(), va.end(), vb.begin(), [](const auto& x, const auto& y) {
                return x.first == y.first;
            })) {
            throw ModelError("bus " + bus + " has different phases in the two solutions");
        }
        if (floating.count(bus)) {
            for (auto p = vb.begin(); p != vb.end(); ++p) {
                for (auto q = std::next(p); q != vb.end(); ++q) {
                    const double ma = std::abs(va.at(p->first) - va.at(q->first));
                    const double mb = std::abs(p->second - q->second);
                    report.entries.push_back({bus, std::string{phase_letter(p->first), phase_letter(q->first)}, ma, mb,
                                              relative(ma, mb)});
                }
            }
            continue;
        }
        for (const auto& [phase, u] : vb) {
            const double ma = std::abs(va.at(phase));
            const double mb = std::abs(u);
            report.entries.push_back({bus, std::string(1, phase_letter(phase)), ma, mb, relative(ma, mb)});
        }
    }
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const DeltaEntry& x, const DeltaEntry& y) { return x.relative > y.relative; });
    if (!report.entries.empty()) report.delta = report.entries.front().relative;
    return report;
}

double compare_delta(const PfSolution& a, const PfSolution& b, const std::set<std::string>& floating) {
    return compare_report(a, b, floating).delta;
}

}  // namespace mcdist::pf
