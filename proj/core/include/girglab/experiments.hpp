#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "girglab/dynamics.hpp"
#include "girglab/theory.hpp"

namespace girglab::experiments {

struct SweepConfig {
    std::int64_t n = 10000;
    int d = 2;
    double avg_degree = 20.0; // k is calibrated per tau
    std::vector<double> tau_values{2.15, 2.5, 3.0};
    std::vector<double> side_values;
    int runs_per_point = 20;
    std::uint64_t seed_base = 1;
    dynamics::SurvivalCriterion survival;
    std::int64_t max_steps = 0; // 0: dynamics default

    void validate() const;
};

// seed of run `run` at (tau_values[tau_idx], side_values[s_idx]);
// the graph uses it directly, the dynamics use CounterRng(seed).split(3)
std::uint64_t run_seed(std::uint64_t seed_base, std::size_t tau_idx, std::size_t s_idx,
                       std::size_t run);

struct CurvePoint {
    double side = 0.0;
    int survived = 0;
    int runs = 0;          // converged runs, the denominator of p_hat
    int non_converged = 0; // excluded
    double p_hat = 0.0;
};

struct SurvivalCurve {
    double tau = 0.0;
    double k = 0.0;
    std::vector<CurvePoint> points; // sorted by side
};

using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

// one run: build graph, square init, run to stability, classify
dynamics::RunStats survival_run(const girg::GirgParams& graph, double side,
                                const SweepConfig& cfg);
std::vector<SurvivalCurve> survival_sweep(const SweepConfig& cfg,
                                          const SweepProgress& progress = {});

struct LogisticFit {
    double s0 = 0.0;
    double b = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
    double se_s0 = 0.0; // from the observed information, NaN when not converged
    double se_b = 0.0;
    int newton_iterations = 0;
};

double logistic(double s, double s0, double b);
double log_likelihood(const SurvivalCurve& c, double s0, double b);
// binomial MLE of p(s) = 1 / (1 + exp(-(s - s0) / b))
LogisticFit fit_logistic(const SurvivalCurve& curve);

struct CriticalSize {
    double s0 = 0.0;
    bool warning = false; // the fit did not converge
};
CriticalSize critical_size(const LogisticFit& fit);

void write_curves_csv(std::ostream& os, const std::vector<SurvivalCurve>& curves);
std::vector<SurvivalCurve> read_curves_csv(std::istream& is);
void write_fits_csv(std::ostream& os, const std::vector<SurvivalCurve>& curves,
                    const std::vector<LogisticFit>& fits);

// gnuplot scripts; data files are referenced by the given relative names
std::string survival_plot_script(const std::string& curves_csv,
                                 const std::vector<SurvivalCurve>& curves,
                                 const std::vector<LogisticFit>& fits);
// snapshot rows "x,y,spin"
std::string snapshot_plot_script(const std::string& snapshot_csv);
// three weight slices of a half-space profile CSV
std::string profile_plot_script(const std::string& profile_csv, const std::vector<double>& weights);

struct MeanFieldSuiteConfig {
    int d = 2;
    double tau = 3.0;
    double k_factor = 1.2; // k = k_factor * k_min
    double w_cap = 1000.0;
    std::size_t n_w = 64;
    std::size_t n_z = 512;
    int iterations = 200;
    double conv_tol = 1e-7;
    int comparison_t_max = 100;
    std::vector<double> erosion_radii{50.0, 100.0, 200.0};
    double eps = 0.5;
    int erosion_t_max = 20;
    theory::ErosionGrid erosion_grid;
};

struct MeanFieldSuiteReport {
    double k = 0.0;
    double k_min = 0.0;
    double delta_star = 0.0;
    int iterations = 0;
    double last_sup_delta = 0.0;
    double survival_margin = 0.0;
    theory::ValidityReport validity;
    theory::ComparisonResult comparison;
    std::vector<theory::ErosionReport> erosion;
    std::vector<std::filesystem::path> files;
    bool pass = false;
};

// writes halfspace_profile.csv, subsolution_profile.csv, erosion_series.csv,
// validity_report.txt and profile.gp into out_dir
MeanFieldSuiteReport run_meanfield_suite(const MeanFieldSuiteConfig& cfg,
                                         const std::filesystem::path& out_dir);

struct KScanRow {
    double k = 0.0;
    bool subsolution_exists = false; // k above k_min
    bool valid = false;              // the built subsolution passes check_valid
    double margin = 0.0;             // survival margin after `iterations` steps of T
};
// per k: subsolution validity and the survival margin reached from the indicator
std::vector<KScanRow> k_scan(int d, double tau, const std::vector<double>& ks, int iterations,
                             std::size_t n_w = 64, std::size_t n_z = 512);

// flat key=value rendering
std::string format_validity(const theory::ValidityReport& r);
std::string format_comparison(const theory::ComparisonResult& r);
std::string format_erosion(const theory::ErosionReport& r);

} // namespace girglab::experiments
