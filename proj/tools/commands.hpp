#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "run_report.hpp"

namespace mcdist::cli {

struct GlobalOptions {
    double sbase = 1e6;  ///< VA per phase
    unsigned long long seed = 0;
    bool json = false;
};

struct ParseArgs {
    std::string file;
    std::string to = "json";  ///< json | dss | network
    std::string out;
};

struct PfArgs {
    std::string file;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::string method = "newton";
    std::string out;
};

struct OpfArgs {
    std::string file;
    std::string form = "lindistflow";
    std::string periods;
    int pwl = 0;
    std::string out;
};

struct ExportArgs {
    std::string file;
    std::string form;
    std::string periods;
    int pwl = 0;
    bool conic = false;
    std::string out;
};

struct CompareArgs {
    std::string a, b;
    std::vector<std::string> floating;
    double tol = 1e-6;
    int top = 10;
};

/// Shared context of one command run. `out` receives the primary artifact
/// when no --out file is given; `log` is for humans and may be a null sink.
struct Context {
    GlobalOptions global;
    RunReport& report;
    std::ostream& out;
    std::ostream& log;
};

// Each command returns its exit code for expected outcomes (non-convergence,
// infeasibility, tolerance exceeded); input and support problems throw.
int cmd_parse(Context& ctx, const ParseArgs& args);
int cmd_pf(Context& ctx, const PfArgs& args);
int cmd_opf(Context& ctx, const OpfArgs& args);
int cmd_export(Context& ctx, const ExportArgs& args);
int cmd_compare(Context& ctx, const CompareArgs& args);

}  // namespace mcdist::cli
