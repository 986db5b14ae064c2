#include "gcmoment/cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace gcmoment;

namespace {

struct Invocation {
    int code = -1;
    std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "gcm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Invocation r;
    r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("gcm_test_cli_" + name);
    std::filesystem::remove_all(p);
    return p;
}

Json read_report(const std::filesystem::path& dir) {
    std::ifstream is(dir / "report.json");
    return Json::parse(is);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, ListAndUsageErrors) {
    const Invocation list = invoke({"list"});
    EXPECT_EQ(list.code, kExitOk);
    for (const auto& n : catalog_names()) EXPECT_NE(list.out.find(n), std::string::npos);
    EXPECT_EQ(invoke({"all", "no_such_example"}).code, kExitUsage);
    EXPECT_EQ(invoke({"--bogus-flag", "all", "sphere_rotation"}).code, kExitUsage);
    EXPECT_EQ(invoke({"--resolution", "8", "all", "sphere_rotation"}).code, kExitUsage);
    EXPECT_EQ(invoke({"--step", "-1", "check-structure", "sphere_rotation"}).code, kExitUsage);
    EXPECT_EQ(invoke({}).code, kExitUsage);
    EXPECT_EQ(invoke({"morse"}).code, kExitUsage);
}

TEST(Cli, FailingCheckIsReported) {
    const auto dir = scratch("broken");
    const Invocation r =
        invoke({"--resolution", "16", "--out", dir.string(), "check-hamiltonian", "broken_moment_control"});
    EXPECT_EQ(r.code, kExitFailed);
    const Json j = read_report(dir);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_FALSE(j["passed"].get<bool>());
    bool found = false;
    for (const auto& c : j["checks"])
        if (c["name"] == "moment_condition") {
            found = true;
            EXPECT_EQ(c["status"], "fail");
            EXPECT_GT(c["value"].get<double>(), 1e-3);
            EXPECT_GE(c["worst_sample"].get<long>(), 0);
        }
    EXPECT_TRUE(found);
    const auto& failed = j["failed_checks"];
    EXPECT_NE(std::find(failed.begin(), failed.end(), "moment_condition"), failed.end());
    EXPECT_NE(r.out.find("worst_sample="), std::string::npos);
}

TEST(Cli, PassingStructureCheck) {
    const auto dir = scratch("structure");
    EXPECT_EQ(invoke({"--resolution", "16", "--out", dir.string(), "check-structure", "sphere_rotation"}).code, kExitOk);
    EXPECT_TRUE(read_report(dir)["passed"].get<bool>());
    const auto bad = scratch("nonint");
    EXPECT_EQ(invoke({"--resolution", "16", "--out", bad.string(), "check-structure", "nonintegrable_control"}).code,
              kExitFailed);
}

TEST(Cli, ConfigFileWithFlagPrecedence) {
    const auto dir = scratch("config");
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "run.toml";
    {
        std::ofstream os(cfg);
        os << "resolution = 20\nseed = 7\ntol-residual = 1e-5\n";
    }
    const auto out = dir / "out";
    EXPECT_EQ(invoke({"--config", cfg.string(), "--resolution", "16", "--out", out.string(), "check-structure",
                      "sphere_rotation"})
                  .code,
              kExitOk);
    const Json j = read_report(out);
    EXPECT_EQ(j["config"]["resolution"], 16);
    EXPECT_EQ(j["config"]["seed"], 7);
    EXPECT_DOUBLE_EQ(j["config"]["tol_residual"].get<double>(), 1e-5);
    EXPECT_EQ(j["example"]["name"], "sphere_rotation");
}

TEST(Cli, DeterministicAcrossRunsAndJobs) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    EXPECT_EQ(invoke({"--resolution", "16", "--grid", "20", "--jobs", "1", "--out", a.string(), "all", "product_spheres_T2"}).code,
              kExitOk);
    EXPECT_EQ(invoke({"--resolution", "16", "--grid", "20", "--jobs", "4", "--out", b.string(), "all", "product_spheres_T2"}).code,
              kExitOk);
    Json ja = read_report(a), jb = read_report(b);
    ja.erase("timestamp");
    jb.erase("timestamp");
    EXPECT_EQ(ja.dump(), jb.dump());
    for (const auto& art : ja["artifacts"]) {
        const std::string f = art.get<std::string>();
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
}
