#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "run_cli.hpp"
#include "test_support.hpp"

using mcdist::test::fixture;
using mcdist::test::golden;
using mcdist::test::read_file;
using mcdist::test::run_cli;
using mcdist::test::scratch_dir;
using nlohmann::json;

TEST(CliParse, MatchesGolden) {
    auto r = run_cli("parse " + fixture("sample_feeder.dss"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, read_file(golden("sample_feeder.parse.json")));
}

TEST(CliParse, EmptyFileIsValid) {
    const auto dir = scratch_dir("empty");
    std::ofstream(dir / "empty.dss").close();
    auto r = run_cli("parse " + (dir / "empty.dss").string());
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(json::parse(r.out)["objects"].empty());
}

TEST(CliParse, RedirectCycleIsAnInputError) {
    auto r = run_cli("parse " + fixture("redirect/cycle_a.dss"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("redirect cycle"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("cycle_a.dss"), std::string::npos) << r.err;
}

TEST(CliParse, MissingFile) { EXPECT_EQ(run_cli("parse /nonexistent/x.dss").code, 2); }

TEST(CliParse, DssRoundTrip) {
    const auto dir = scratch_dir("roundtrip");
    auto first = run_cli("parse " + fixture("mini13.dss") + " --to dss --out " + (dir / "a.dss").string());
    ASSERT_EQ(first.code, 0) << first.err;
    auto again = run_cli("parse " + (dir / "a.dss").string() + " --to dss");
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(again.out, read_file((dir / "a.dss").string()));
}

TEST(CliPf, ZeroLoadConvergesQuickly) {
    auto r = run_cli("--json pf " + fixture("zero_load.dss"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = json::parse(r.err);
    EXPECT_LE(report["result"]["iterations"].get<int>(), 2);
    EXPECT_TRUE(report["result"]["converged"].get<bool>());
}

TEST(CliPf, TwoBusMatchesOracleFile) {
    const auto dir = scratch_dir("twobus");
    const auto out = (dir / "sol.json").string();
    ASSERT_EQ(run_cli("pf " + fixture("two_bus.dss") + " --out " + out).code, 0);
    auto r = run_cli("compare " + out + " " + golden("two_bus_oracle.json") + " --tol 1e-10");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(CliPf, SweepOnMeshedIsUnsupported) {
    auto r = run_cli("pf " + fixture("meshed.dss") + " --method bfs");
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("radial required"), std::string::npos) << r.err;
}

TEST(CliPf, IterationLimitIsASolveFailure) {
    EXPECT_EQ(run_cli("pf " + fixture("mini13.dss") + " --max-iter 1").code, 3);
}

TEST(CliPf, UnknownMethodIsUsageError) {
    EXPECT_EQ(run_cli("pf " + fixture("two_bus.dss") + " --method gauss").code, 2);
}

TEST(CliOpf, CheapGeneratorObjective) {
    auto r = run_cli("opf " + fixture("cheap_gen.dss"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto d = json::parse(r.out);
    EXPECT_EQ(d["status"], "optimal");
    EXPECT_NEAR(d["objective"].get<double>(), 3.6, 1e-9);
}

TEST(CliOpf, InfeasibleReportsCertificate) {
    auto r = run_cli("--json opf " + fixture("infeasible_vmin.dss"));
    EXPECT_EQ(r.code, 3);
    const auto report = json::parse(r.err);
    EXPECT_FALSE(report["result"]["farkas"].empty());
    EXPECT_EQ(report["exit_code"], 3);
}

TEST(CliOpf, StorageChargesWhenCheap) {
    auto r = run_cli("opf " + fixture("storage2.dss") + " --periods " + fixture("periods2.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto d = json::parse(r.out);
    EXPECT_EQ(d["periods"], 2);
    const auto& st = d["storage"]["storage.s1"];
    EXPECT_GT(st["charge"][0].get<double>(), 1e-6);
    EXPECT_GT(st["discharge"][1].get<double>(), 1e-6);
    EXPECT_LE(d["complementarity_violation"].get<double>(), 1e-9);
}

TEST(CliOpf, OtherFormsAreUnsupported) {
    EXPECT_EQ(run_cli("opf " + fixture("two_bus.dss") + " --form socbfm").code, 4);
}

TEST(CliExport, LinDistFlowCounts) {
    auto r = run_cli("export " + fixture("two_bus.dss") + " --form lindistflow");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = json::parse(r.out);
    // w per bus phase, pf/qf per conductor, pg/qg per source element
    EXPECT_EQ(m["variables"].size(), 2u + 2u + 2u);
    // slack, voltage drop, two balance rows per bus phase
    EXPECT_EQ(m["constraints"].size(), 1u + 1u + 4u);
}

TEST(CliExport, SocOnMeshedIsUnsupported) {
    EXPECT_EQ(run_cli("export " + fixture("meshed.dss") + " --form socbfm").code, 4);
}

TEST(CliExport, ConicFlagRewritesCones) {
    auto r = run_cli("export " + fixture("two_bus.dss") + " --form socbfm --conic");
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& c : json::parse(r.out)["constraints"]) EXPECT_NE(c["kind"], "rotated_soc");
}

TEST(CliCompare, IdenticalPerturbedAndCrossMethod) {
    const auto dir = scratch_dir("compare");
    const auto a = (dir / "newton.json").string(), b = (dir / "bfs.json").string();
    ASSERT_EQ(run_cli("pf " + fixture("unbalanced3.dss") + " --out " + a).code, 0);
    ASSERT_EQ(run_cli("pf " + fixture("unbalanced3.dss") + " --method bfs --out " + b).code, 0);
    EXPECT_EQ(run_cli("compare " + a + " " + a).code, 0);
    auto cross = run_cli("compare " + a + " " + b + " --tol 1e-8");
    EXPECT_EQ(cross.code, 0) << cross.out;

    auto doc = json::parse(read_file(a));
    doc["values"]["ur(bus.b2,a)"] = doc["values"]["ur(bus.b2,a)"].get<double>() * 1.01;
    doc["values"]["ui(bus.b2,a)"] = doc["values"]["ui(bus.b2,a)"].get<double>() * 1.01;
    const auto p = (dir / "perturbed.json").string();
    std::ofstream(p) << doc.dump(1);
    auto r = run_cli("compare " + p + " " + a);
    EXPECT_EQ(r.code, 5);
    EXPECT_NE(r.out.find("b2 a"), std::string::npos) << r.out;
}

TEST(CliConfig, FileSuppliesOptionsAndCommandLineWins) {
    const auto dir = scratch_dir("config");
    const auto cfg = dir / "run.toml";
    std::ofstream(cfg) << "seed = 7\n[pf]\nmethod = \"gauss\"\n";
    auto bad = run_cli("--config " + cfg.string() + " pf " + fixture("two_bus.dss"));
    EXPECT_EQ(bad.code, 2);
    auto r = run_cli("--json --config " + cfg.string() + " pf " + fixture("two_bus.dss") + " --method bfs");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = json::parse(r.err);
    EXPECT_EQ(report["seed"], 7);
    EXPECT_EQ(report["result"]["method"], "bfs");
}

TEST(CliReport, JsonModeKeepsStderrMachineReadable) {
    auto r = run_cli("--json pf " + fixture("sample_feeder.dss"));
    ASSERT_EQ(r.code, 0);
    const auto report = json::parse(r.err);
    EXPECT_EQ(report["schema"], "mcdist.report/1");
    EXPECT_EQ(report["inputs"][0]["sha256"].get<std::string>().size(), 64u);
    EXPECT_TRUE(report["timings_ms"].contains("solve"));
    EXPECT_EQ(json::parse(r.out)["schema"], "mcdist.solution/1");
}

TEST(CliReport, ErrorsAreReportedInJson) {
    auto r = run_cli("--json pf " + fixture("meshed.dss") + " --method bfs");
    EXPECT_EQ(r.code, 4);
    const auto report = json::parse(r.err);
    EXPECT_EQ(report["exit_code"], 4);
    EXPECT_NE(report["error"].get<std::string>().find("radial required"), std::string::npos);
}
