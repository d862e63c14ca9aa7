#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "girglab/cli/app.hpp"
#include "girglab/graph_io.hpp"
#include "girglab/profile_io.hpp"
#include "girglab/theory.hpp"
#include "oracles.hpp"

using namespace girglab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "girg-lab");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("girglab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

nlohmann::json manifest(const fs::path& p) {
    std::ifstream is(p);
    return nlohmann::json::parse(is);
}

void expect_manifest_digests(const fs::path& mpath) {
    const auto m = manifest(mpath);
    ASSERT_TRUE(m.contains("outputs"));
    ASSERT_FALSE(m["outputs"].empty());
    for (const auto& o : m["outputs"]) {
        const auto f = mpath.parent_path() / o["path"].get<std::string>();
        ASSERT_TRUE(fs::exists(f)) << f;
        EXPECT_EQ(o["sha256"].get<std::string>(), cli::sha256_hex(f));
    }
    EXPECT_EQ(m["version"].get<std::string>(), cli::version_string());
}

std::string value_of(const std::string& text, const std::string& key) {
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        if (line.rfind(key + "=", 0) == 0)
            return line.substr(key.size() + 1);
    return {};
}

} // namespace

TEST(CliBasics, Sha256KnownVectors) {
    const auto dir = scratch("sha");
    std::ofstream(dir / "abc") << "abc";
    std::ofstream(dir / "empty");
    EXPECT_EQ(cli::sha256_hex(dir / "abc"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(cli::sha256_hex(dir / "empty"),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(CliBasics, VersionAndHelp) {
    const auto v = invoke({"--version"});
    EXPECT_EQ(v.code, cli::kExitOk);
    EXPECT_EQ(v.out, cli::version_string() + "\n");
    const auto h = invoke({"--help"});
    EXPECT_EQ(h.code, cli::kExitOk);
    for (const char* s : {"generate", "simulate", "sweep", "meanfield", "subsolution", "check", "erosion"})
        EXPECT_NE(h.out.find(s), std::string::npos) << s;
}

TEST(CliBasics, UsageErrorsExitOne) {
    EXPECT_EQ(invoke({}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"generate", "--n", "10"}).code, cli::kExitUsage); // missing --out-prefix
    const auto dir = scratch("usage");
    const std::string pre = (dir / "g").string();
    EXPECT_EQ(invoke({"generate", "--tau", "2", "--out-prefix", pre}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"generate", "--n", "0", "--out-prefix", pre}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"generate", "--k", "1", "--avg-degree", "5", "--out-prefix", pre}).code,
              cli::kExitUsage);
    EXPECT_EQ(invoke({"simulate", "--shape", "triangle", "--out-prefix", pre}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"subsolution", "--k", "10"}).code, cli::kExitUsage); // below k_min
    EXPECT_EQ(invoke({"--jobs", "-2", "subsolution", "--kmin"}).code, cli::kExitUsage);
    EXPECT_FALSE(fs::exists(pre + ".edges"));
}

TEST(CliBasics, ExecutableExitCodes) {
    const std::string exe = GIRG_LAB_EXE;
    auto status = [&](const std::string& args) {
        const int s = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("--version"), 0);
    EXPECT_EQ(status("subsolution --kmin"), 0);
    EXPECT_EQ(status("subsolution --tau 1.5"), 1);
    EXPECT_EQ(status("no-such-command"), 1);
}

TEST(CliBasics, ReadNumericCsv) {
    const auto dir = scratch("csv");
    std::ofstream(dir / "ok.csv") << "a,b\n1,2.5\nnan,-3e-2\n";
    const auto t = cli::read_numeric_csv(dir / "ok.csv");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
    EXPECT_TRUE(std::isnan(t.rows[1][0]));
    EXPECT_DOUBLE_EQ(t.rows[1][1], -0.03);
    std::ofstream(dir / "bad.csv") << "a,b\n1,x\n";
    EXPECT_THROW(cli::read_numeric_csv(dir / "bad.csv"), std::runtime_error);
    std::ofstream(dir / "ragged.csv") << "a,b\n1\n";
    EXPECT_THROW(cli::read_numeric_csv(dir / "ragged.csv"), std::runtime_error);
}

TEST(CliGenerate, OutputsMatchBruteForce) {
    const auto dir = scratch("gen");
    const std::string pre = (dir / "g").string();
    const auto r = invoke({"generate", "--n", "400", "--tau", "2.5", "--k", "2", "--seed", "7",
                        "--out-prefix", pre});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream vs(pre + ".vertices"), es(pre + ".edges");
    const auto rec = io::read_vertices(vs);
    const auto edges = io::read_edge_list(es);
    ASSERT_EQ(rec.weights.size(), 400u);
    girg::GirgParams p;
    p.n = 400;
    p.tau = 2.5;
    p.k = 2.0;
    p.seed = 7;
    const auto ref = oracle::brute_force_graph(p, rec.weights, rec.coords);
    std::set<std::pair<girg::VertexId, girg::VertexId>> got(edges.begin(), edges.end()), want;
    for (std::size_t u = 0; u < ref.order(); ++u)
        for (auto v : ref.neighbors(static_cast<girg::VertexId>(u)))
            if (static_cast<girg::VertexId>(u) < v)
                want.insert({static_cast<girg::VertexId>(u), v});
    EXPECT_EQ(got, want);
    EXPECT_EQ(value_of(r.out, "edges"), std::to_string(want.size()));
    expect_manifest_digests(pre + ".manifest.json");
    const auto m = manifest(pre + ".manifest.json");
    EXPECT_EQ(m["seed"].get<std::uint64_t>(), 7u);
    EXPECT_EQ(m["subcommand"], "generate");
}

TEST(CliGenerate, AvgDegreeSetsK) {
    const auto dir = scratch("gen_avg");
    const std::string pre = (dir / "g").string();
    const auto r = invoke({"generate", "--n", "3000", "--avg-degree", "12", "--seed", "3",
                        "--out-prefix", pre});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(value_of(r.out, "k")), girg::calibrate_k(12.0, 2, 3.0), 1e-12);
    EXPECT_NEAR(std::stod(value_of(r.out, "mean_degree")), 12.0, 1.5);
}

TEST(CliSimulate, ReproducibleAndConsistent) {
    const auto dir = scratch("sim");
    std::vector<std::string> args{"simulate", "--n", "1500", "--avg-degree", "10", "--seed", "11",
                                  "--shape", "square", "--side", "15", "--snapshot-every", "500"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out-prefix", (dir / "a").string()});
    b.insert(b.end(), {"--out-prefix", (dir / "b").string()});
    const auto ra = invoke(a);
    ASSERT_EQ(ra.code, 0) << ra.err;
    // thread count must not matter
    b.insert(b.begin(), {"--jobs", "1"});
    const auto rb = invoke(b);
    ASSERT_EQ(rb.code, 0) << rb.err;
    EXPECT_EQ(slurp(dir / "a.spins"), slurp(dir / "b.spins"));
    EXPECT_EQ(ra.out, rb.out);

    const auto xy = cli::read_numeric_csv(dir / "a.xy.csv");
    EXPECT_EQ(xy.header, (std::vector<std::string>{"x", "y", "spin"}));
    ASSERT_EQ(xy.rows.size(), 1500u);
    std::size_t blue = 0;
    for (const auto& row : xy.rows) {
        EXPECT_TRUE(row[2] == 1.0 || row[2] == -1.0);
        blue += row[2] > 0;
    }
    EXPECT_EQ(value_of(ra.out, "final_blue"), std::to_string(blue));
    EXPECT_NE(slurp(dir / "a.gp").find("'a.xy.csv'"), std::string::npos);
    const auto traj = cli::read_numeric_csv(dir / "a.trajectory.csv");
    EXPECT_EQ(traj.header, (std::vector<std::string>{"step", "id", "spin"}));
    EXPECT_EQ(traj.rows.size() % 1500, 0u);
    EXPECT_FALSE(traj.rows.empty());
    expect_manifest_digests(dir / "a.manifest.json");
}

TEST(CliSimulate, RandomShapeAndBallRun) {
    const auto dir = scratch("sim_shapes");
    for (const char* shape : {"random", "ball", "halfspace"}) {
        const auto r = invoke({"simulate", "--n", "800", "--k", "2", "--seed", "5", "--shape", shape,
                            "--radius", "6", "--p-blue", "0.7", "--out-prefix",
                            (dir / shape).string()});
        ASSERT_EQ(r.code, 0) << shape << r.err;
        EXPECT_EQ(value_of(r.out, "converged"), "1") << shape;
    }
}

TEST(CliSweep, SmallSweepWritesCurvesAndFits) {
    const auto dir = scratch("sweep");
    std::ofstream(dir / "cfg.json") << R"({"n": 600, "avg_degree": 10, "tau_values": [2.5],
        "side_values": [1, 8, 16, 24.4], "runs_per_point": 3, "seed_base": 9})";
    const auto r = invoke({"sweep", "--config", (dir / "cfg.json").string(), "--out",
                        (dir / "out").string(), "--quiet"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto curves = cli::read_numeric_csv(dir / "out" / "curves.csv");
    ASSERT_EQ(curves.rows.size(), 4u);
    EXPECT_EQ(curves.header.front(), "tau");
    for (const auto& row : curves.rows)
        EXPECT_EQ(row[3], 3.0);
    EXPECT_EQ(curves.rows.back()[2], 3.0); // whole torus blue
    const auto fits = cli::read_numeric_csv(dir / "out" / "fits.csv");
    EXPECT_EQ(fits.rows.size(), 1u);
    expect_manifest_digests(dir / "out" / "manifest.json");
    EXPECT_EQ(manifest(dir / "out" / "manifest.json")["parameters"]["n"], 600);

    std::ofstream(dir / "bad.json") << R"({"n": 600, "sides": [1]})";
    EXPECT_EQ(invoke({"sweep", "--config", (dir / "bad.json").string(), "--out",
                   (dir / "out2").string()})
                  .code,
              cli::kExitUsage);
    std::ofstream(dir / "broken.json") << "{";
    EXPECT_EQ(invoke({"sweep", "--config", (dir / "broken.json").string(), "--out",
                   (dir / "out3").string()})
                  .code,
              cli::kExitUsage);
}

TEST(CliMeanfield, HalfspaceRunAndCheckRoundTrip) {
    const auto dir = scratch("mf");
    const double k = 1.2 * theory::k_min(2, 3.0);
    const std::string ks = io::format_double(k);
    const auto r = invoke({"meanfield", "--k", ks, "--nw", "16", "--nz", "129", "--iters", "30",
                        "--out", (dir / "hs").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GT(std::stod(value_of(r.out, "survival_margin")), 0.0);
    EXPECT_TRUE(value_of(r.out, "warning").empty());
    expect_manifest_digests(dir / "hs" / "manifest.json");
    meanfield::ProfileMeta meta;
    meta.k = k;
    const auto prof = meanfield::read_profile_csv(dir / "hs" / "profile.csv", meta);
    EXPECT_EQ(prof.n_w(), 16u);
    EXPECT_EQ(prof.n_x(), 129u);
    const auto hist = cli::read_numeric_csv(dir / "hs" / "history.csv");
    EXPECT_EQ(static_cast<int>(hist.rows.size()), std::stoi(value_of(r.out, "iterations")));

    // the iterate is a fixed point up to the convergence slack, so only structure is checked
    const auto c = invoke({"check", "--profile", (dir / "hs" / "profile.csv").string(), "--k", ks,
                        "--out", (dir / "chk").string()});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_LT(std::stod(value_of(c.out, "symmetry_max_violation")), 1e-6);
    EXPECT_FALSE(value_of(c.out, "valid").empty());
    expect_manifest_digests(dir / "chk" / "manifest.json");
}

TEST(CliMeanfield, SmallKWarnsAboutLambda) {
    const auto dir = scratch("mf_small");
    const auto r = invoke({"meanfield", "--k", "2", "--nw", "8", "--nz", "65", "--iters", "3",
                        "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_FALSE(value_of(r.out, "warning").empty());
}

TEST(CliMeanfield, RadialRunShrinksCrossing) {
    const auto dir = scratch("mf_rad");
    const auto r = invoke({"meanfield", "--geometry", "radial", "--r", "40", "--k", "150", "--wcap",
                        "2", "--nw", "4", "--spacing", "1", "--extent", "25", "--iters", "3", "--out",
                        dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LE(std::stod(value_of(r.out, "final_crossing")),
              std::stod(value_of(r.out, "initial_crossing")));
    const auto hist = cli::read_numeric_csv(dir / "history.csv");
    EXPECT_EQ(hist.header.back(), "crossing");
    EXPECT_EQ(invoke({"meanfield", "--geometry", "radial", "--k", "150", "--out", dir.string()}).code,
              cli::kExitUsage); // no --r
}

TEST(CliSubsolution, KminAndBuiltProfilePassesCheck) {
    const auto r = invoke({"subsolution", "--kmin"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(value_of(r.out, "k_min")), theory::k_min(2, 3.0), 1e-9);

    const auto dir = scratch("sub");
    const std::string ks = io::format_double(1.3 * theory::k_min(2, 3.0));
    const auto s = invoke({"subsolution", "--k", ks, "--out", dir.string()});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_GT(std::stod(value_of(s.out, "delta_star")), 0.5);
    expect_manifest_digests(dir / "manifest.json");
    const auto c = invoke({"check", "--profile", (dir / "subsolution.csv").string(), "--k", ks});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(value_of(c.out, "valid"), "1") << c.out;
}

TEST(CliCheck, BrokenProfileReportsViolations) {
    const auto dir = scratch("chk_bad");
    auto p = meanfield::halfspace_params(2, 3.0, 200.0, 100.0, 6, 33);
    auto v = meanfield::Profile::halfspace_indicator(p).values();
    v[2 * 33 + 30] = 0.2; // dip on the positive side
    meanfield::write_profile_csv(dir / "bad.csv", meanfield::Profile(p, {}, v));
    const auto c = invoke({"check", "--profile", (dir / "bad.csv").string(), "--k", "200", "--out",
                        (dir / "out").string()});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(value_of(c.out, "valid"), "0");
    const auto viol = cli::read_numeric_csv(dir / "out" / "violations.csv");
    ASSERT_FALSE(viol.rows.empty());
    std::set<double> codes;
    for (const auto& row : viol.rows)
        codes.insert(row[0]);
    EXPECT_TRUE(codes.count(1.0)); // symmetry
    EXPECT_TRUE(codes.count(2.0)); // monotone in z

    std::ofstream(dir / "junk.csv") << "w,z,f\n1,0\n";
    EXPECT_EQ(invoke({"check", "--profile", (dir / "junk.csv").string(), "--k", "1"}).code,
              cli::kExitUsage);
}

TEST(CliErosion, SmallRunWritesSeries) {
    const auto dir = scratch("ero");
    const std::string ks = io::format_double(1.2 * theory::k_min(2, 3.0));
    const auto r = invoke({"erosion", "--r", "30", "--k", ks, "--tmax", "3", "--nw", "4", "--spacing", "1",
                        "--margin", "8", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto series = cli::read_numeric_csv(dir / "erosion_series.csv");
    EXPECT_EQ(series.rows.size(), 4u);
    EXPECT_EQ(series.rows[0][1], 30.0);
    expect_manifest_digests(dir / "manifest.json");
}

TEST(CliBasics, QuadratureFailureExitsTwo) {
    const auto dir = scratch("numfail");
    const auto r = invoke({"meanfield", "--k", "2", "--quad-tol", "1e-16", "--nw", "8", "--nz", "65",
                           "--iters", "2", "--out", dir.string()});
    EXPECT_EQ(r.code, cli::kExitNumerical);
    EXPECT_NE(r.err.find("numerical failure"), std::string::npos);
}

TEST(CliGenerate, RerunGivesIdenticalDigests) {
    const auto dir = scratch("gen_rerun");
    std::vector<nlohmann::json> ms;
    for (const char* name : {"a", "b"}) {
        const auto r = invoke({"generate", "--n", "1000", "--d", "2", "--tau", "3", "--k", "1",
                               "--seed", "7", "--out-prefix", (dir / name).string()});
        ASSERT_EQ(r.code, 0) << r.err;
        ms.push_back(manifest(dir / (std::string(name) + ".manifest.json")));
    }
    ASSERT_EQ(ms[0]["outputs"].size(), ms[1]["outputs"].size());
    for (std::size_t i = 0; i < ms[0]["outputs"].size(); ++i)
        EXPECT_EQ(ms[0]["outputs"][i]["sha256"], ms[1]["outputs"][i]["sha256"]);
    EXPECT_EQ(ms[0]["parameters"], ms[1]["parameters"]);
    // every file written is in the manifest, apart from the manifest itself
    std::set<std::string> listed;
    for (const auto& o : ms[0]["outputs"])
        listed.insert(o["path"].get<std::string>());
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto f = e.path().filename().string();
        if (f.rfind("a.", 0) == 0 && f != "a.manifest.json")
            EXPECT_TRUE(listed.count(f)) << f;
    }
}

TEST(CliGenerate, TauTwoIsRejectedWithReason) {
    const auto dir = scratch("tau2");
    const auto r = invoke({"generate", "--tau", "2", "--out-prefix", (dir / "g").string()});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("tau"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("> 2"), std::string::npos) << r.err;
}

TEST(CliMeanfield, DefaultGridMarginAboveDeltaStar) {
    const auto dir = scratch("mf_default");
    const double k = 1.2 * theory::k_min(2, 3.0);
    const auto r = invoke({"meanfield", "--geometry", "halfspace", "--d", "2", "--tau", "3", "--k",
                           io::format_double(k), "--iters", "200", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    meanfield::ProfileMeta meta;
    meta.k = k;
    const auto f = meanfield::read_profile_csv(dir / "profile.csv", meta);
    const double margin = meanfield::survival_margin(f);
    EXPECT_EQ(io::format_double(margin), value_of(r.out, "survival_margin"));
    const auto ds = theory::solve_delta_star(theory::y_coefficient(2, 3.0, k));
    ASSERT_TRUE(ds.has_value());
    EXPECT_GE(margin, *ds - 0.5 - 0.01);
}

TEST(CliSimulate, SameSeedSameDigests) {
    const auto dir = scratch("sim_digest");
    // same prefix in two directories: the plot script embeds the data file name
    for (const char* sub : {"a", "b"})
        ASSERT_EQ(invoke({"simulate", "--n", "1200", "--k", "3", "--seed", "21", "--shape", "random",
                          "--out-prefix", (dir / sub / "run").string()})
                      .code,
                  0);
    const auto a = manifest(dir / "a" / "run.manifest.json"), b = manifest(dir / "b" / "run.manifest.json");
    ASSERT_EQ(a["outputs"].size(), b["outputs"].size());
    for (std::size_t i = 0; i < a["outputs"].size(); ++i)
        EXPECT_EQ(a["outputs"][i]["sha256"], b["outputs"][i]["sha256"]);
}
