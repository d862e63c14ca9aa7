#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "girglab/experiments.hpp"
#include "girglab/profile_io.hpp"
#include "girglab/theory.hpp"

using namespace girglab;
using namespace girglab::experiments;

namespace {

SurvivalCurve make_curve(const std::vector<double>& s, const std::vector<int>& survived, int runs) {
    SurvivalCurve c{3.0, 1.0, {}};
    for (std::size_t i = 0; i < s.size(); ++i)
        c.points.push_back({s[i], survived[i], runs, 0, static_cast<double>(survived[i]) / runs});
    return c;
}

SurvivalCurve sample_curve(double s0, double b, int runs, std::mt19937_64& gen) {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 12; ++i) {
        const double x = 13.0 + 2.0 * i;
        std::binomial_distribution<int> B(runs, 1.0 / (1.0 + std::exp(-(x - s0) / b)));
        s.push_back(x);
        y.push_back(B(gen));
    }
    return make_curve(s, y, runs);
}

std::string curves_text(const std::vector<SurvivalCurve>& c) {
    std::ostringstream os;
    write_curves_csv(os, c);
    return os.str();
}

SweepConfig small_sweep() {
    SweepConfig c;
    c.n = 1500;
    c.avg_degree = 12.0;
    c.tau_values = {2.5, 3.0};
    c.side_values = {0.5, 12.0, std::sqrt(1500.0)};
    c.runs_per_point = 4;
    c.seed_base = 77;
    return c;
}

} // namespace

TEST(Logistic, SymmetricData) {
    const auto f = fit_logistic(make_curve({10, 20, 30}, {1, 5, 9}, 10));
    EXPECT_TRUE(f.converged);
    EXPECT_NEAR(f.s0, 20.0, 1e-7);
    EXPECT_GT(f.b, 0.0);
    EXPECT_EQ(critical_size(f).s0, f.s0);
    EXPECT_FALSE(critical_size(f).warning);
}

TEST(Logistic, LikelihoodIsMaximal) {
    const auto c = make_curve({5, 10, 15, 20, 25}, {0, 3, 9, 16, 19}, 20);
    const auto f = fit_logistic(c);
    ASSERT_TRUE(f.converged);
    EXPECT_NEAR(f.log_likelihood, log_likelihood(c, f.s0, f.b), 1e-12);
    for (double ds : {-0.01, 0.0, 0.01})
        for (double db : {-0.01, 0.0, 0.01})
            EXPECT_LE(log_likelihood(c, f.s0 + ds, f.b + db), f.log_likelihood + 1e-12);
}

TEST(Logistic, RecoversSyntheticParameters) {
    std::mt19937_64 gen(20261016);
    const auto f = fit_logistic(sample_curve(25.0, 3.0, 200, gen));
    ASSERT_TRUE(f.converged);
    EXPECT_NEAR(f.s0, 25.0, 1.0);
    EXPECT_NEAR(f.b, 3.0, 0.5);
}

TEST(Logistic, StandardErrorCoverage) {
    std::mt19937_64 gen(4242);
    int covered = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto f = fit_logistic(sample_curve(25.0, 3.0, 20, gen));
        ASSERT_TRUE(f.converged);
        if (std::abs(f.s0 - 25.0) <= 2.0 * f.se_s0)
            ++covered;
    }
    EXPECT_GE(covered, 45);
}

TEST(Logistic, SeparatedDataFallsBack) {
    const auto f = fit_logistic(make_curve({16, 18, 20, 24, 26}, {0, 0, 0, 20, 20}, 20));
    EXPECT_FALSE(f.converged);
    EXPECT_DOUBLE_EQ(f.s0, 22.0);
    EXPECT_GT(f.b, 0.0);
    EXPECT_TRUE(critical_size(f).warning);
    EXPECT_EQ(critical_size(f).s0, 22.0);
    EXPECT_TRUE(std::isnan(f.se_s0));
}

TEST(Logistic, RejectsDegenerateCurves) {
    EXPECT_THROW(fit_logistic(make_curve({10}, {3}, 5)), std::invalid_argument);
    EXPECT_THROW(fit_logistic(make_curve({10, 10}, {3, 4}, 5)), std::invalid_argument);
}

TEST(Logistic, IncreasingBeatsDecreasingOnIncreasingData) {
    const auto c = make_curve({5, 10, 15, 20, 25}, {1, 4, 10, 15, 19}, 20);
    SurvivalCurve mirrored = c;
    std::reverse(mirrored.points.begin(), mirrored.points.end());
    for (auto& p : mirrored.points)
        p.side = -p.side;
    EXPECT_GT(fit_logistic(c).log_likelihood, fit_logistic(mirrored).log_likelihood);
}

TEST(Sweep, Validation) {
    auto c = small_sweep();
    c.tau_values = {2.0};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_sweep();
    c.side_values = {100.0};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_sweep();
    c.runs_per_point = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_NO_THROW(small_sweep().validate());
}

TEST(Sweep, RunSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t s = 0; s < 12; ++s)
            for (std::size_t r = 0; r < 20; ++r)
                seen.insert(run_seed(9, t, s, r));
    EXPECT_EQ(seen.size(), 4u * 12u * 20u);
    EXPECT_NE(run_seed(9, 0, 0, 0), run_seed(10, 0, 0, 0));
}

TEST(Sweep, TrivialSizesAndReproducibility) {
    const auto c = small_sweep();
    const auto a = survival_sweep(c);
    ASSERT_EQ(a.size(), 2u);
    for (const auto& curve : a) {
        ASSERT_EQ(curve.points.size(), 3u);
        EXPECT_EQ(curve.points.front().p_hat, 0.0); // too small to hold a vertex cluster
        EXPECT_EQ(curve.points.back().p_hat, 1.0);  // whole torus
        for (const auto& p : curve.points)
            EXPECT_EQ(p.runs + p.non_converged, c.runs_per_point);
    }
    EXPECT_EQ(curves_text(a), curves_text(survival_sweep(c)));
}

TEST(Sweep, CurvesCsvRoundTrip) {
    std::vector<SurvivalCurve> c{make_curve({1.5, 2.25}, {0, 3}, 7), make_curve({4, 8}, {1, 2}, 3)};
    c[1].tau = 2.15;
    c[1].points[0].non_converged = 2;
    std::stringstream ss(curves_text(c));
    const auto back = read_curves_csv(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(curves_text(back), curves_text(c));
    std::stringstream bad("tau,s\n1,2\n");
    EXPECT_THROW(read_curves_csv(bad), std::runtime_error);
}

TEST(PlotScripts, ReferenceDataByRelativeName) {
    std::vector<SurvivalCurve> c{make_curve({10, 20, 30}, {1, 5, 9}, 10),
                                 make_curve({10, 20, 30}, {2, 6, 9}, 10)};
    c[1].tau = 2.5;
    const std::vector<LogisticFit> f{fit_logistic(c[0]), fit_logistic(c[1])};
    const auto s = survival_plot_script("curves.csv", c, f);
    EXPECT_NE(s.find("'curves.csv'"), std::string::npos);
    EXPECT_NE(s.find("f0(x) ="), std::string::npos);
    EXPECT_NE(s.find("f1(x) ="), std::string::npos);
    EXPECT_EQ(s.find("f2(x)"), std::string::npos);
    const auto snap = snapshot_plot_script("snap.csv");
    EXPECT_NE(snap.find("'snap.csv'"), std::string::npos);
    EXPECT_NE(snap.find("$3 > 0 ? 0x1f4fd8 : 0xd81f1f"), std::string::npos);
    const auto prof = profile_plot_script("p.csv", {1, 10, 100});
    EXPECT_EQ(std::count(prof.begin(), prof.end(), '\n'), 7);
}

TEST(MeanFieldSuite, WritesArtifactsAndReportsMargin) {
    MeanFieldSuiteConfig cfg;
    cfg.w_cap = 100.0;
    cfg.n_w = 16;
    cfg.n_z = 201;
    cfg.comparison_t_max = 10;
    cfg.erosion_radii = {120.0, 30.0};
    cfg.erosion_t_max = 4;
    cfg.erosion_grid = {6, 1.0, 10.0};
    const auto dir = std::filesystem::temp_directory_path() / "girglab_suite_test";
    std::filesystem::remove_all(dir);
    const auto rep = run_meanfield_suite(cfg, dir);
    for (const char* name : {"halfspace_profile.csv", "erosion_series.csv", "validity_report.txt",
                             "subsolution_profile.csv", "profile.gp"})
        EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
    EXPECT_EQ(rep.files.size(), 5u);
    const auto f = meanfield::read_profile_csv(dir / "halfspace_profile.csv", {2, 3.0, rep.k});
    EXPECT_EQ(meanfield::survival_margin(f), rep.survival_margin);
    ASSERT_EQ(rep.erosion.size(), 2u);
    EXPECT_EQ(rep.erosion[0].params.r, 30.0);
    EXPECT_LT(rep.erosion[1].recession_per_step, rep.erosion[0].recession_per_step);
    EXPECT_TRUE(rep.comparison.holds);
    EXPECT_TRUE(rep.validity.pass);
    std::ifstream is(dir / "validity_report.txt");
    std::stringstream txt;
    txt << is.rdbuf();
    EXPECT_NE(txt.str().find("pass="), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(KScan, FlagsFollowAnalyticThreshold) {
    const double km = theory::k_min(2, 3.0);
    const auto rows = k_scan(2, 3.0, {0.5 * km, 1.2 * km}, 5, 8, 129);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_FALSE(rows[0].subsolution_exists);
    EXPECT_FALSE(rows[0].valid);
    EXPECT_TRUE(rows[1].subsolution_exists);
    EXPECT_TRUE(rows[1].valid);
    for (const auto& r : rows)
        EXPECT_GT(r.margin, 0.4) << r.k;
}
