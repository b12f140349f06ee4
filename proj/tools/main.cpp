// mcdist command-line front end. See README.md for the flag reference and
// exit codes.
#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mcdist/common/errors.hpp"

namespace {

using namespace mcdist;
using namespace mcdist::cli;

/// Discards everything; stands in for the human log under --json.
class NullBuffer : public std::streambuf {
  protected:
    int overflow(int c) override { return c; }
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    // known before CLI11 runs so that usage errors still produce a report
    const bool json = std::find(args.begin() + 1, args.end(), "--json") != args.end();
    RunReport report(args);

    GlobalOptions global;
    ParseArgs parse_args;
    PfArgs pf_args;
    OpfArgs opf_args;
    ExportArgs export_args;
    CompareArgs compare_args;

    CLI::App app{"Unbalanced distribution network power flow, OPF and model export", "mcdist"};
    app.set_config("--config", "", "Read option defaults from a key=value file; command-line flags win");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", global.seed, "Seed for any randomized step")->capture_default_str();
    app.add_option("--sbase", global.sbase, "Per-phase power base in VA")->capture_default_str();
    app.add_flag("--json", global.json, "Write a JSON run report to stderr");

    auto* parse = app.add_subcommand("parse", "Parse a .dss file and print its data model");
    parse->add_option("file", parse_args.file, "Input .dss file")->required();
    parse->add_option("--to", parse_args.to, "json, dss or network")
        ->check(CLI::IsMember({"json", "dss", "network"}))
        ->capture_default_str();
    parse->add_option("--out", parse_args.out, "Write the output here instead of stdout");

    auto* pf = app.add_subcommand("pf", "Solve the unbalanced power flow");
    pf->add_option("file", pf_args.file, "Input .dss file")->required();
    pf->add_option("--tol", pf_args.tol, "Convergence tolerance (pu)");
    pf->add_option("--max-iter", pf_args.max_iter, "Iteration limit");
    pf->add_option("--method", pf_args.method, "newton or bfs")
        ->check(CLI::IsMember({"newton", "bfs"}))
        ->capture_default_str();
    pf->add_option("--out", pf_args.out, "Solution file");

    auto* opf = app.add_subcommand("opf", "Solve the linear OPF with the embedded simplex");
    opf->add_option("file", opf_args.file, "Input .dss file")->required();
    opf->add_option("--form", opf_args.form, "Formulation (lindistflow)")->capture_default_str();
    opf->add_option("--periods", opf_args.periods, "Multi-period data (JSON)");
    opf->add_option("--pwl", opf_args.pwl, "Tangent cuts per quadratic cost")->capture_default_str();
    opf->add_option("--out", opf_args.out, "Dispatch file");

    auto* exp = app.add_subcommand("export", "Write a formulation as a model file");
    exp->add_option("file", export_args.file, "Input .dss file")->required();
    exp->add_option("--form", export_args.form, "ivr, acr, socbfm or lindistflow")->required();
    exp->add_option("--periods", export_args.periods, "Multi-period data (JSON)");
    exp->add_option("--pwl", export_args.pwl, "Tangent cuts per quadratic cost")->capture_default_str();
    exp->add_flag("--conic", export_args.conic, "SOC cones in norm form");
    exp->add_option("--out", export_args.out, "Model file");

    auto* cmp = app.add_subcommand("compare", "Largest relative voltage-magnitude difference of two solutions");
    cmp->add_option("a", compare_args.a, "Solution file")->required();
    cmp->add_option("b", compare_args.b, "Reference solution file")->required();
    cmp->add_option("--floating", compare_args.floating, "Buses compared phase-to-phase")->delimiter(',');
    cmp->add_option("--tol", compare_args.tol, "Exit 5 above this value")->capture_default_str();
    cmp->add_option("--top", compare_args.top, "Buses listed")->capture_default_str();

    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);

    int code = kOk;
    std::string error;
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        app.exit(e, msg, msg);
        report.set_error(msg.str());
        if (json) std::cerr << report.to_json(kInputError);
        else std::cerr << msg.str();
        return kInputError;
    }
    report.set_seed(global.seed);

    Context ctx{global, report, std::cout, json ? null_stream : std::cerr};
    try {
        if (*parse) code = cmd_parse(ctx, parse_args);
        else if (*pf) code = cmd_pf(ctx, pf_args);
        else if (*opf) code = cmd_opf(ctx, opf_args);
        else if (*exp) code = cmd_export(ctx, export_args);
        else if (*cmp) code = cmd_compare(ctx, compare_args);
    } catch (const ParseError& e) {
        error = e.what();
        code = kInputError;
    } catch (const ModelError& e) {
        error = e.what();
        code = kInputError;
    } catch (const UnsupportedError& e) {
        error = e.what();
        code = kUnsupported;
    } catch (const std::exception& e) {
        error = e.what();
        code = kSolveFailed;
    }
    if (!error.empty()) report.set_error(error);
    std::cout.flush();
    if (json) {
        std::cerr << report.to_json(code);
    } else if (!error.empty()) {
        std::cerr << "mcdist: error: " << error << "\n";
    }
    return code;
}
