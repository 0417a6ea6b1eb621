#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "wnlab/runner.hpp"

using namespace wnlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(testing::TempDir()) / ("wnlab_" + name);
    fs::remove_all(p);
    return p;
}

std::string config_error_pointer(const std::string& text) {
    try {
        parse_config(json::parse(text));
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<no error>";
}

RunOverrides in(const fs::path& dir, unsigned threads = 1) {
    RunOverrides o;
    o.output_dir = dir.string();
    o.threads = threads;
    o.timestamp = "2000-01-01T00:00:00Z";
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// Every number in the results must be wrapped as {value, provenance}.
void check_provenance(const json& j, const std::string& where) {
    if (j.is_object()) {
        if (j.contains("provenance")) {
            EXPECT_TRUE(j.contains("value")) << where;
            const auto p = j["provenance"].get<std::string>();
            EXPECT_TRUE(p == "measured" || p == "fitted" || p == "certificate" || p == "config") << where;
            return;
        }
        for (const auto& [k, v] : j.items()) check_provenance(v, where + "/" + k);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) check_provenance(j[i], where + "/" + std::to_string(i));
    } else {
        EXPECT_FALSE(j.is_number()) << "bare number at " << where;
    }
}

}  // namespace

TEST(Config, Pointers) {
    EXPECT_EQ(config_error_pointer(R"({"action":"classify"})"), "/system");
    EXPECT_EQ(config_error_pointer(R"({"system":"john"})"), "/action");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"classify","epz":1})"), "/epz");
    EXPECT_EQ(config_error_pointer(R"({"system":"nope","action":"classify"})"), "/system");
    EXPECT_EQ(config_error_pointer(R"({"system":["rigid_body",1,"x",3],"action":"classify"})"), "/system/2");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"fly"})"), "/action");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"classify","eps":-1})"), "/eps");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"classify","tol":0.1})"), "/tol");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"classify","trials":0})"), "/trials");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"asymptotic","phi0":[1,2]})"), "/phi0");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"asymptotic","forcing":"wind"})"), "/forcing");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"wave","wave":{"hh":1}})"), "/wave/hh");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"wave","wave":{"u_fixed":[5]}})"), "/wave/u_fixed/0");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"wave","wave":{"bumps":[{"amp":1}]}})"),
              "/wave/bumps/0/amp");
    EXPECT_EQ(config_error_pointer(R"({"system":"john","action":"wave","wave":{"v_range":[0.5,3]}})"), "/wave");
    EXPECT_EQ(config_error_pointer(
                  R"({"system":{"n_fields":1,"bad_coeffs":[[[1]]],"structure":{"dim":2}},"action":"classify"})"),
              "/system/structure/structure");
    EXPECT_EQ(config_error_pointer("[1,2]"), "/");
}

TEST(Config, SystemForms) {
    const auto a = parse_config(json::parse(R"({"system":"john","action":"classify"})"));
    EXPECT_EQ(a.system_name, "john");
    const auto b = parse_config(json::parse(R"({"system":["rigid_body",1,2,3],"action":"condition1"})"));
    EXPECT_TRUE(b.system->structure().has_value());
    EXPECT_EQ(b.system->n_fields(), 3u);
    const auto c = parse_config(json::parse(
        R"({"system":{"n_fields":1,"bad_coeffs":[[[2]]],"label":"twice_john"},"action":"asymptotic","phi0":[0.1]})"));
    EXPECT_EQ(c.system_name, "twice_john");
    EXPECT_EQ(c.system->bad_coeffs()(0, 0, 0), 2.0);
    EXPECT_EQ(c.action, Action::asymptotic);
}

TEST(Config, LoadFromFile) {
    const auto dir = scratch("load");
    fs::create_directories(dir);
    std::ofstream(dir / "ok.json") << R"({"system":"null_form","action":"classify","seed":3})";
    EXPECT_EQ(load_config(dir / "ok.json").seed, 3u);
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
    EXPECT_THROW(load_config(dir / "missing.json"), std::runtime_error);
}

TEST(Run, JohnClassifyFails) {
    const auto dir = scratch("john");
    const auto cfg = parse_config(json::parse(R"({"system":"john","action":"classify","eps":0.1})"));
    const auto res = run(cfg, in(dir));
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_EQ(res.report["results"]["verdict"], "blowup");
    EXPECT_NEAR(res.report["results"]["value"]["value"].get<double>(), 40.0, 0.4);
    EXPECT_EQ(res.report["results"]["value"]["provenance"], "fitted");
    EXPECT_FALSE(res.report["pass"].get<bool>());
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "trials.csv"));
    check_provenance(res.report["results"], "/results");
}

TEST(Run, NullFormClassifiesAsClassicalNull) {
    const auto dir = scratch("null");
    const auto res = run(parse_config(json::parse(R"({"system":"null_form","action":"classify"})")), in(dir));
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_EQ(res.report["results"]["verdict"], "classical_null");
    EXPECT_TRUE(res.report["system"]["classical_null_condition"].get<bool>());
}

TEST(Run, AsymptoticWritesTrajectory) {
    const auto dir = scratch("asym");
    const auto res = run(parse_config(json::parse(
                             R"({"system":["rigid_body",1,2,3],"action":"asymptotic","phi0":[0.05,-0.05,0.05],"s_max":50})")),
                         in(dir));
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_EQ(res.report["results"]["status"], "completed");
    EXPECT_LE(res.report["results"]["hamiltonian_max_relative_drift"]["value"].get<double>(), 1e-8);
    EXPECT_EQ(slurp(dir / "trajectory.csv").rfind("s,phi_0,phi_1,phi_2\n", 0), 0u);
    check_provenance(res.report["results"], "/results");
}

TEST(Run, ReportIsIndependentOfThreadCount) {
    const std::string text = R"({"system":["rigid_body",1,2,3],"action":"condition1","trials":16,"s_max":40,"seed":11})";
    const auto cfg = parse_config(json::parse(text));
    const auto d1 = scratch("t1"), d4 = scratch("t4");
    run(cfg, in(d1, 1));
    run(cfg, in(d4, 4));
    EXPECT_EQ(slurp(d1 / "report.json"), slurp(d4 / "report.json"));
    EXPECT_EQ(slurp(d1 / "trials.csv"), slurp(d4 / "trials.csv"));
}

TEST(Run, SeedOverrideChangesForcing) {
    const std::string text = R"({"system":["rigid_body",1,2,3],"action":"condition1","trials":12,"s_max":40})";
    const auto cfg = parse_config(json::parse(text));
    auto o = in(scratch("seed"));
    o.seed = 5;
    const auto res = run(cfg, o);
    EXPECT_EQ(res.report["config"]["value"]["seed"], 5u);
}

TEST(Run, WaveBlowupAndCompletion) {
    const auto res = run(parse_config(json::parse(
                             R"({"system":"john","action":"wave","wave":{"h":0.02,"u_range":[0,2],"v_range":[4,54],
                                 "bumps":[{"amplitude":2,"center":1,"width":0.5}]}})")),
                         in(scratch("wave_john")));
    EXPECT_EQ(res.report["results"]["status"], "blowup");
    EXPECT_TRUE(res.report["results"].contains("blowup_v"));
    const auto ok = run(parse_config(json::parse(R"({"system":"null_form","action":"wave",
                            "wave":{"h":0.02,"u_range":[0,2],"v_range":[4,54],"export_grid":true}})")),
                        in(scratch("wave_null")));
    EXPECT_EQ(ok.report["results"]["status"], "completed");
    EXPECT_EQ(ok.exit_code, 0);
    EXPECT_NE(std::find(ok.artifacts.begin(), ok.artifacts.end(), "grid.csv"), ok.artifacts.end());
}

TEST(Run, FullPipelineRigidBody) {
    const auto dir = scratch("full");
    const auto res =
        run(parse_config(json::parse(R"({"system":["rigid_body",1,2,3],"action":"full_pipeline","eps":0.01})")),
            in(dir, 4));
    const auto& r = res.report["results"];
    EXPECT_TRUE(r["certificate"]["certified"].get<bool>());
    EXPECT_NEAR(r["certificate"]["increment"]["value"].get<double>(), 0.02, 1e-15);
    EXPECT_TRUE(r["condition1"]["pass"].get<bool>());
    EXPECT_TRUE(r["wave_completed"].get<bool>());
    const auto& tr = r["trace"]["traces"][0];
    EXPECT_LE(tr["comparison"]["sup_deviation"]["value"].get<double>(), 0.1);
    EXPECT_LE(tr["hamiltonian"]["relative_oscillation"]["value"].get<double>(), 0.05);
    EXPECT_TRUE(r["trace"]["within_tolerances"].get<bool>());
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_TRUE(fs::exists(dir / "trace_u0.5.csv"));
    check_provenance(r, "/results");
}

TEST(Catalogue, ListingMentionsEverySystem) {
    const auto text = list_catalogue();
    for (const auto& e : catalogue_entries()) EXPECT_NE(text.find(e.name), std::string::npos) << e.name;
    EXPECT_NE(text.find("rigid_body(I1,I2,I3)"), std::string::npos);
    EXPECT_NE(text.find("all nontrivial solutions blow up"), std::string::npos);
}
