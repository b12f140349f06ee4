#pragma once

#include <string>

#include "mcdist/common/linalg.hpp"
#include "mcdist/network/types.hpp"

/// Variable naming shared by the model builders, the solvers and the
/// solution files: quantity(component,tag[,tK]).
namespace mcdist::formulations::names {

inline std::string phase_tag(int p) { return std::string(1, phase_letter(p)); }

inline std::string pair_tag(int p, int q) { return phase_tag(p) + phase_tag(q); }

/// "an" for a wye element on phase a, "ab" for a delta element a-b.
inline std::string element_tag(const network::Element& e) {
    return phase_tag(e.p) + (e.delta() ? phase_tag(e.q) : std::string("n"));
}

inline std::string var(const std::string& quantity, const std::string& component, const std::string& tag,
                       int period = -1) {
    std::string out = quantity + "(" + component;
    if (!tag.empty()) out += "," + tag;
    if (period >= 0) out += ",t" + std::to_string(period);
    return out + ")";
}

inline std::string bus(const std::string& quantity, const std::string& bus_id, const std::string& tag,
                       int period = -1) {
    return var(quantity, "bus." + bus_id, tag, period);
}

}  // namespace mcdist::formulations::names
