#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "girglab/theory.hpp"

namespace girglab::theory {

using meanfield::Geometry;
using meanfield::Profile;
using meanfield::UpdateOperator;

ErosionParams erosion_params(double r, double eps, int d, double k) {
    if (!(r > 1.0) || !(eps > 0.0 && eps < 1.0) || d < 1 || !(k > 0.0))
        throw std::invalid_argument("erosion_params: need r > 1, eps in (0, 1), d >= 1, k > 0");
    ErosionParams e;
    e.r = r;
    e.eps = eps;
    e.d = d;
    e.k = k;
    e.r_max = std::pow(k, 1.0 / d) * std::pow(r, (1.0 - eps) / 2.0);
    e.w_max = std::pow(r, d * (1.0 - eps) / 4.0);
    e.delta_bound = e.r_max * e.r_max / (2.0 * r);
    e.delta_unit = std::pow(r, -eps) / 2.0;
    return e;
}

ErosionReport check_erosion_domination(double r, double eps, double tau, double k, int t_max,
                                       const ErosionGrid& grid) {
    const auto start = std::chrono::steady_clock::now();
    if (t_max < 0)
        throw std::invalid_argument("check_erosion_domination: t_max must be >= 0");
    ErosionReport rep;
    rep.params = erosion_params(r, eps, 2, k);
    rep.tau = tau;
    rep.t_max = t_max;
    rep.delta = rep.params.delta_bound;
    const double W = rep.params.w_max;
    const double R_max = std::sqrt(k) * W; // edge radius between two weight-W vertices
    const double A = R_max + grid.margin;

    const auto rp = meanfield::radial_params(tau, k, W, r, grid.h, A, grid.n_w);
    // same spacing, so z = r - rho lands on half-space nodes
    const auto m = static_cast<std::size_t>(std::ceil((A + 2.0 * R_max) / grid.h));
    const auto hp = meanfield::halfspace_params(2, tau, k, W, grid.n_w, 2 * m + 1,
                                                static_cast<double>(m) * grid.h);
    const UpdateOperator rop(rp, Geometry::radial(r));
    const UpdateOperator hop(hp, Geometry::halfspace());
    rep.value_error_radial = rop.value_error();
    rep.value_error_halfspace = hop.value_error();
    const double step_err = 10.0 * (rep.value_error_radial + rep.value_error_halfspace);

    Profile g = Profile::ball_indicator(rp, r);
    Profile f = Profile::halfspace_indicator(hp);
    rep.min_slack = std::numeric_limits<double>::infinity();
    const std::size_t nw = g.n_w(), nx = g.n_x();
    for (int t = 0; t <= t_max; ++t) {
        const double tol = t * step_err + 1e-12;
        for (std::size_t i = 0; i < nw; ++i)
            for (std::size_t j = 0; j < nx; ++j) {
                const double rho = rp.x_grid[j], z = r - rho, gv = g.at(i, j);
                const double fs = f.along_row(i, z - t * rep.delta);
                rep.min_slack = std::min(rep.min_slack, gv - fs);
                if (gv < fs - tol && !rep.first_violation) {
                    rep.holds = false;
                    rep.first_violation = ErosionViolation{t, rp.w_grid[i], rho, gv, fs, tol};
                }
                const double fu = f.along_row(i, z - t * rep.params.delta_unit);
                if (gv < fu - tol && !rep.first_violation_unit_delta) {
                    rep.holds_unit_delta = false;
                    rep.first_violation_unit_delta =
                        ErosionViolation{t, rp.w_grid[i], rho, gv, fu, tol};
                }
            }
        const auto c = meanfield::crossing_radius(g);
        rep.crossing.push_back(c ? *c : std::numeric_limits<double>::quiet_NaN());
        if (t == t_max)
            break;
        g = rop.apply(g);
        f = hop.apply(f);
    }
    for (std::size_t t = 1; t < rep.crossing.size(); ++t)
        if (!(rep.crossing[t] <= rep.crossing[t - 1] + 1e-9))
            rep.crossing_monotone = false;
    rep.recession_per_step =
        t_max > 0 ? (rep.crossing.front() - rep.crossing.back()) / t_max : 0.0;
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace girglab::theory
