#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace girglab::meanfield {

enum class GeometryKind { HalfSpace, Radial };

struct Geometry {
    GeometryKind kind = GeometryKind::HalfSpace;
    double radius = 0.0; // initial ball radius, radial only (informational)

    static Geometry halfspace() { return {}; }
    static Geometry radial(double r) { return {GeometryKind::Radial, r}; }
    bool is_radial() const { return kind == GeometryKind::Radial; }
};

struct MeanFieldParams {
    int d = 2;
    double tau = 3.0;
    double k = 1.0;
    double w_cap = 1000.0;
    std::vector<double> w_grid; // log-spaced on [1, w_cap]
    std::vector<double> x_grid; // z on [-Z, Z] or rho on [rho_lo, rho_hi]; uniform
    double quad_tol = 1e-8;
    bool truncated_lambda = false;

    void validate(GeometryKind kind) const;
    double spacing() const;
    bool same_grid(const MeanFieldParams& o) const;
};

std::vector<double> log_grid(double lo, double hi, std::size_t n);
// n uniform nodes on [-Z, Z] with z[n-1-j] == -z[j] exactly
std::vector<double> symmetric_grid(double Z, std::size_t n);
// uniform nodes with spacing h on [lo, hi], containing the anchor point as a node
std::vector<double> anchored_grid(double lo, double hi, double h, double anchor);

// defaults: 64 weights, 512 z nodes, Z = 8 (k w_cap)^{1/d}
MeanFieldParams halfspace_params(int d, double tau, double k, double w_cap = 1000.0,
                                 std::size_t n_w = 64, std::size_t n_z = 512,
                                 double z_extent = 0.0);
// d = 2; nodes of spacing h covering [r - A, r + A] clipped at 0, with r a node
MeanFieldParams radial_params(double tau, double k, double w_cap, double r, double h, double A,
                              std::size_t n_w = 16);

class Profile {
public:
    Profile(MeanFieldParams params, Geometry geometry, std::vector<double> values);

    static Profile constant(const MeanFieldParams& params, Geometry geometry, double value);
    // 1 for z > 0, 1/2 at z == 0, 0 below
    static Profile halfspace_indicator(const MeanFieldParams& params);
    // 1 for rho < r, 1/2 at rho == r, 0 beyond
    static Profile ball_indicator(const MeanFieldParams& params, double r);

    const MeanFieldParams& params() const { return params_; }
    Geometry geometry() const { return geometry_; }
    std::size_t n_w() const { return params_.w_grid.size(); }
    std::size_t n_x() const { return params_.x_grid.size(); }
    const std::vector<double>& values() const { return values_; }
    double at(std::size_t i, std::size_t j) const { return values_[i * n_x() + j]; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_x(), n_x()};
    }

    // bilinear in (log w, x), constant beyond the grid
    double operator()(double w, double x) const;
    // interpolation along x within weight row i
    double along_row(std::size_t i, double x) const;

    // max |f(w, z) + f(w, -z) - 1| over mirrored node pairs
    double symmetry_violation() const;

private:
    MeanFieldParams params_;
    Geometry geometry_;
    std::vector<double> values_;
    std::vector<double> log_w_;
};

struct AdvantageResult {
    double mu = 0.0;
    double lambda_total = 0.0; // truncated to [1, w_cap], by quadrature
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double quad_error_estimate = 0.0;
};

// lambda(w) of the update operator; untruncated unless params.truncated_lambda
double lambda_of_w(double w, const MeanFieldParams& params);
// expected neighbours with weight in [1, w_cap] (what the integrals see)
double truncated_mass(double w, const MeanFieldParams& params);

AdvantageResult advantage_halfspace(const Profile& f, double w, double z);
AdvantageResult advantage_radial(const Profile& g, double w, double rho);

// The operator T on a fixed grid. Construction integrates the weight kernel once;
// apply() is then a fixed linear map followed by Phi.
class UpdateOperator {
public:
    UpdateOperator(const MeanFieldParams& params, Geometry geometry);

    const MeanFieldParams& params() const;
    Geometry geometry() const;

    // mu at every grid node, row-major
    std::vector<double> advantage(const Profile& f) const;
    Profile apply(const Profile& f) const;
    double lambda(std::size_t i) const;
    // bound on the absolute error of mu at any node of row i, for any f in [0, 1]
    double mu_error(std::size_t i) const;
    // the same bound converted to f units, max over rows
    double value_error() const;

    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
};

Profile apply_T(const Profile& f);

struct IterationResult {
    Profile profile;
    int iterations = 0;
    std::vector<double> sup_deltas;
};

using IterationObserver = std::function<void(int t, const Profile&)>;

IterationResult iterate(const Profile& f0, int max_iter, double conv_tol);
IterationResult iterate(const UpdateOperator& op, const Profile& f0, int max_iter,
                        double conv_tol, const IterationObserver& observer = {});

// min over grid weights of f(w, (k w)^{1/d}) - 1/2
double survival_margin(const Profile& f);
// rho where g(w_min, .) falls through 1/2; empty if it never does
std::optional<double> crossing_radius(const Profile& g);

} // namespace girglab::meanfield
