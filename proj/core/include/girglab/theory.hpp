#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "girglab/meanfield.hpp"

namespace girglab::theory {

// C(d) = pi^{(d-1)/2} / (2^{(d+1)/2} d Gamma((d+1)/2))
double cone_constant(int d);
// y with delta = Phi(y (delta - 1/2)) the self-consistency equation at (w, z) = (1, k^{1/d})
double y_coefficient(int d, double tau, double k);
// smallest k with y_coefficient > sqrt(pi)
double k_min(int d, double tau);

struct DeltaStar {
    std::optional<double> root; // smallest root above 1/2 + 1e-6
    std::vector<std::pair<double, double>> brackets;
};
// roots of Phi(y (delta - 1/2)) = delta on (1/2, 1)
DeltaStar solve_delta_star_all(double y);
std::optional<double> solve_delta_star(double y);

struct SubsolutionSpec {
    int d = 2;
    double tau = 3.0;
    double k = 1.0;
    double delta_star = 0.5;
    double cone_constant = 0.0;
    double y_coefficient = 0.0;
};

// throws std::invalid_argument below k_min
SubsolutionSpec subsolution_spec(int d, double tau, double k);
// the explicit lower bound of the blue advantage at (w, z), z >= 0
double blue_lower_bound(const SubsolutionSpec& s, double w, double z);
// closed form of the subsolution, any z
double subsolution_value(const SubsolutionSpec& s, double w, double z);

struct Subsolution {
    SubsolutionSpec spec;
    meanfield::Profile profile;
};
// on halfspace_params(d, tau, k)
Subsolution build_subsolution(int d, double tau, double k);
// on a caller-chosen half-space grid (untruncated lambda)
Subsolution build_subsolution(const meanfield::MeanFieldParams& params);

struct Violation {
    std::string condition;
    double w = 0.0;
    double z = 0.0;
    double amount = 0.0;
    double tolerance = 0.0;
};

struct ValidityTolerances {
    double symmetry = 1e-12;
    double monotonicity = 1e-12;
    double error_factor = 10.0; // multiple of the estimated error of T f
};

struct ValidityReport {
    double symmetry_max_violation = 0.0;
    double z_monotonicity_max_violation = 0.0;
    double w_monotonicity_max_violation = 0.0;
    double subsolution_max_violation = 0.0; // max over nodes of f - T f, clipped at 0
    double subsolution_tolerance = 0.0;     // largest per-node tolerance used
    bool operator_checked = false;
    bool pass = false;
    std::vector<Violation> violations; // entries beyond tolerance, capped in number
};

ValidityReport check_valid(const meanfield::Profile& f, bool use_operator,
                           const ValidityTolerances& tol = {});
ValidityReport check_valid(const meanfield::Profile& f, const meanfield::UpdateOperator& op,
                           const ValidityTolerances& tol = {});

struct ComparisonViolation {
    int t = 0;
    double w = 0.0;
    double z = 0.0;
    double sub = 0.0;
    double f_t = 0.0;
    double tolerance = 0.0;
};

struct ComparisonResult {
    bool holds = true;
    int iterations = 0;
    double min_slack = 0.0; // min over t, nodes with z >= 0 of f_t - sub
    std::optional<ComparisonViolation> first_violation;
};

// sub <= T^t f0 on z >= 0 for t = 0..t_max
ComparisonResult check_comparison(const meanfield::Profile& sub, const meanfield::Profile& f0,
                                  int t_max, double error_factor = 10.0);
ComparisonResult check_comparison(const meanfield::UpdateOperator& op,
                                  const meanfield::Profile& sub, const meanfield::Profile& f0,
                                  int t_max, double error_factor = 10.0);

struct ErosionParams {
    double r = 0.0;
    double eps = 0.0;
    int d = 2;
    double k = 1.0;
    double r_max = 0.0;
    double w_max = 0.0;
    // sup over the r_max-neighbourhood of |distance to sphere - distance to tangent plane|,
    // r_max^2 / (2 r) = k^{2/d} r^{-eps} / 2
    double delta_bound = 0.0;
    // r^{-eps} / 2, the k = 1 value
    double delta_unit = 0.0;
};

ErosionParams erosion_params(double r, double eps, int d, double k);

struct ErosionGrid {
    std::size_t n_w = 12;
    double h = 0.5;
    double margin = 20.0; // radial grid covers r +- (R_max + margin)
};

struct ErosionViolation {
    int t = 0;
    double w = 0.0;
    double rho = 0.0;
    double g = 0.0;
    double f_shifted = 0.0;
    double tolerance = 0.0;
};

struct ErosionReport {
    ErosionParams params;
    double tau = 3.0;
    int t_max = 0;
    double delta = 0.0; // shift per step used for the check
    bool holds = true;
    double min_slack = 0.0;
    std::optional<ErosionViolation> first_violation;
    // same check with delta_unit per step
    bool holds_unit_delta = true;
    std::optional<ErosionViolation> first_violation_unit_delta;
    std::vector<double> crossing; // crossing radius at t = 0..t_max (NaN when absent)
    bool crossing_monotone = true;
    double recession_per_step = 0.0;
    double value_error_radial = 0.0;
    double value_error_halfspace = 0.0;
    double seconds = 0.0;
};

ErosionReport check_erosion_domination(double r, double eps, double tau, double k, int t_max,
                                       const ErosionGrid& grid = {});

} // namespace girglab::theory
