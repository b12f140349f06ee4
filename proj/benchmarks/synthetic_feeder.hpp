#pragma once

#include <string>

namespace mcdist::bench {

/// Three-phase radial chain of 10 km split into `sections` segments, with a
/// lateral and an unbalanced load at every node. Total demand stays near
/// 2.5 MW whatever the resolution.
inline std::string synthetic_feeder(int sections) {
    const double km = 10.0 / sections, kw = 2000.0 / sections;
    auto num = [](double v) { return std::to_string(v); };
    std::string s =
        "New Circuit.bench basekv=12.47 pu=1.02 phases=3 bus1=n0\n"
        "New Linecode.lc nphases=3 units=km rmatrix=[0.25 | 0.09 0.25 | 0.09 0.09 0.25] "
        "xmatrix=[0.6 | 0.3 0.6 | 0.3 0.3 0.6] cmatrix=[3.0 | -0.8 3.0 | -0.8 -0.8 3.0]\n";
    for (int k = 1; k <= sections; ++k) {
        const std::string a = "n" + std::to_string(k - 1), b = "n" + std::to_string(k);
        s += "New Line.l" + std::to_string(k) + " bus1=" + a + " bus2=" + b + " linecode=lc length=" + num(km) + " units=km\n";
        s += "New Line.lat" + std::to_string(k) + " bus1=" + b + ".1 bus2=x" + std::to_string(k) +
             ".1 phases=1 rmatrix=[0.4] xmatrix=[0.4] cmatrix=[0] length=" + num(km) + " units=km\n";
        s += "New Load.y" + std::to_string(k) + " bus1=" + b + " phases=3 kv=12.47 kw=" + num(kw * (1.0 + 0.1 * (k % 3))) +
             " kvar=" + num(0.4 * kw) + " model=" + std::to_string(1 + k % 2) + "\n";
        s += "New Load.x" + std::to_string(k) + " bus1=x" + std::to_string(k) + ".1 phases=1 kv=7.2 kw=" + num(0.25 * kw) + " kvar=" + num(0.1 * kw) + "\n";
    }
    return s;
}

}  // namespace mcdist::bench
