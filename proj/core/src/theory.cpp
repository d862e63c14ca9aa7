#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "girglab/numerics.hpp"
#include "girglab/theory.hpp"

namespace girglab::theory {

using meanfield::Geometry;
using meanfield::MeanFieldParams;
using meanfield::Profile;
using meanfield::UpdateOperator;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxListed = 100;

double untruncated_lambda(const SubsolutionSpec& s, double w) {
    return unit_ball_volume(s.d) * s.k * w * (1.0 + 1.0 / (s.tau - 2.0));
}

// per-row error of T f in f units
std::vector<double> row_errors(const UpdateOperator& op, double factor) {
    const auto& p = op.params();
    std::vector<double> e(p.w_grid.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double lam = op.lambda(i);
        e[i] = factor * std::max(p.quad_tol * lam, op.mu_error(i)) / std::sqrt(2.0 * kPi * lam);
    }
    return e;
}

std::vector<double> apply_values(const UpdateOperator& op, const Profile& f) {
    std::vector<double> mu = op.advantage(f);
    const std::size_t nx = f.n_x();
    for (std::size_t q = 0; q < mu.size(); ++q)
        mu[q] = phi(mu[q] / std::sqrt(2.0 * op.lambda(q / nx)));
    return mu;
}

} // namespace

double cone_constant(int d) {
    if (d < 1)
        throw std::invalid_argument("cone_constant: d must be >= 1");
    const double dd = d;
    return std::pow(kPi, (dd - 1.0) / 2.0) /
           (std::pow(2.0, (dd + 1.0) / 2.0) * dd * std::tgamma((dd + 1.0) / 2.0));
}

double y_coefficient(int d, double tau, double k) {
    if (!(tau > 2.0) || !(k > 0.0))
        throw std::invalid_argument("y_coefficient: need tau > 2 and k > 0");
    const double blue = 1.0 - std::pow(1.5, d * (1.0 - tau));
    const double lam1 = unit_ball_volume(d) * k * (1.0 + 1.0 / (tau - 2.0));
    return 2.0 * cone_constant(d) * blue * k / std::sqrt(2.0 * lam1);
}

double k_min(int d, double tau) {
    const double y1 = y_coefficient(d, tau, 1.0);
    return kPi / (y1 * y1);
}

DeltaStar solve_delta_star_all(double y) {
    if (!std::isfinite(y))
        throw std::invalid_argument("solve_delta_star: y must be finite");
    DeltaStar out;
    // g'(1/2) = y / sqrt(pi) - 1 and g' falls off away from 1/2, so no root for y <= sqrt(pi)
    if (y <= std::sqrt(kPi))
        return out;
    auto g = [y](double d) { return phi(y * (d - 0.5)) - d; };
    const double lo = 0.5 + 1e-6, hi = 1.0;
    const int n = 1000;
    double a = lo, ga = g(a);
    for (int s = 1; s <= n; ++s) {
        const double b = lo + (hi - lo) * s / n;
        const double gb = g(b);
        if (ga == 0.0)
            out.brackets.emplace_back(a, a);
        else if ((ga > 0.0) != (gb > 0.0) && gb != 0.0)
            out.brackets.emplace_back(a, b);
        a = b;
        ga = gb;
    }
    if (ga == 0.0)
        out.brackets.emplace_back(a, a);
    for (auto& [u, v] : out.brackets) {
        double gu = g(u);
        for (int it = 0; it < 200 && v - u > 0.0; ++it) {
            const double m = 0.5 * (u + v);
            if (m <= u || m >= v)
                break;
            const double gm = g(m);
            if (gm == 0.0) {
                u = v = m;
                break;
            }
            if ((gm > 0.0) == (gu > 0.0)) {
                u = m;
                gu = gm;
            } else {
                v = m;
            }
        }
    }
    if (!out.brackets.empty()) {
        const auto [u, v] = out.brackets.front();
        out.root = std::abs(g(u)) <= std::abs(g(v)) ? u : v;
    }
    return out;
}

std::optional<double> solve_delta_star(double y) { return solve_delta_star_all(y).root; }

SubsolutionSpec subsolution_spec(int d, double tau, double k) {
    SubsolutionSpec s;
    s.d = d;
    s.tau = tau;
    s.k = k;
    s.cone_constant = cone_constant(d);
    s.y_coefficient = y_coefficient(d, tau, k);
    const auto root = solve_delta_star(s.y_coefficient);
    if (!root)
        throw std::invalid_argument("subsolution: k = " + std::to_string(k) +
                                    " is below k_min = " + std::to_string(k_min(d, tau)));
    s.delta_star = *root;
    return s;
}

double blue_lower_bound(const SubsolutionSpec& s, double w, double z) {
    if (z <= 0.0)
        return 0.0;
    const double dd = s.d;
    const double rI = std::pow(s.k * w, 1.0 / dd);
    return 2.0 * s.cone_constant * std::pow(z, (dd + 1.0) / 2.0) *
           std::pow(rI, (dd - 1.0) / 2.0) *
           (1.0 - std::pow(1.0 + z / (2.0 * rI), dd * (1.0 - s.tau))) * (s.delta_star - 0.5);
}

double subsolution_value(const SubsolutionSpec& s, double w, double z) {
    if (z < 0.0)
        return 1.0 - subsolution_value(s, w, -z);
    const double rI = std::pow(s.k * w, 1.0 / s.d);
    const double mu = blue_lower_bound(s, w, std::min(z, rI));
    return phi(mu / std::sqrt(2.0 * untruncated_lambda(s, w)));
}

Subsolution build_subsolution(int d, double tau, double k) {
    return build_subsolution(meanfield::halfspace_params(d, tau, k));
}

Subsolution build_subsolution(const MeanFieldParams& params) {
    params.validate(meanfield::GeometryKind::HalfSpace);
    if (params.truncated_lambda)
        throw std::invalid_argument("build_subsolution: needs the untruncated lambda");
    const SubsolutionSpec s = subsolution_spec(params.d, params.tau, params.k);
    const std::size_t nw = params.w_grid.size(), nx = params.x_grid.size();
    std::vector<double> v(nw * nx);
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = nx / 2; j < nx; ++j) {
            const double z = params.x_grid[j];
            const double val = subsolution_value(s, params.w_grid[i], z);
            v[i * nx + j] = val;
            v[i * nx + (nx - 1 - j)] = z == 0.0 ? val : 1.0 - val;
        }
    return {s, Profile(params, Geometry::halfspace(), std::move(v))};
}

ValidityReport check_valid(const Profile& f, bool use_operator, const ValidityTolerances& tol) {
    if (!use_operator) {
        if (f.geometry().is_radial())
            throw std::invalid_argument("check_valid: half-space profiles only");
        ValidityReport r;
        const auto& p = f.params();
        const std::size_t nw = f.n_w(), nx = f.n_x();
        auto note = [&](const char* what, double w, double z, double amount, double t) {
            if (amount > t && r.violations.size() < kMaxListed)
                r.violations.push_back({what, w, z, amount, t});
        };
        r.symmetry_max_violation = f.symmetry_violation();
        for (std::size_t i = 0; i < nw; ++i)
            for (std::size_t j = 0; j < nx; ++j)
                note("symmetry", p.w_grid[i], p.x_grid[j],
                     std::abs(f.at(i, j) + f.at(i, nx - 1 - j) - 1.0), tol.symmetry);
        for (std::size_t i = 0; i < nw; ++i)
            for (std::size_t j = 0; j + 1 < nx; ++j) {
                const double drop = f.at(i, j) - f.at(i, j + 1);
                r.z_monotonicity_max_violation = std::max(r.z_monotonicity_max_violation, drop);
                note("z-monotonicity", p.w_grid[i], p.x_grid[j], drop, tol.monotonicity);
            }
        const double z_lo = std::pow(p.k, 1.0 / p.d);
        for (std::size_t j = 0; j < nx; ++j) {
            const double z = p.x_grid[j];
            if (z < z_lo)
                continue;
            const double w_hi = std::pow(z, p.d) / p.k;
            for (std::size_t i = 0; i + 1 < nw && p.w_grid[i + 1] <= w_hi; ++i) {
                const double drop = f.at(i, j) - f.at(i + 1, j);
                r.w_monotonicity_max_violation = std::max(r.w_monotonicity_max_violation, drop);
                note("w-monotonicity", p.w_grid[i], z, drop, tol.monotonicity);
            }
        }
        r.pass = r.symmetry_max_violation <= tol.symmetry &&
                 r.z_monotonicity_max_violation <= tol.monotonicity &&
                 r.w_monotonicity_max_violation <= tol.monotonicity;
        return r;
    }
    return check_valid(f, UpdateOperator(f.params(), f.geometry()), tol);
}

ValidityReport check_valid(const Profile& f, const UpdateOperator& op,
                           const ValidityTolerances& tol) {
    ValidityReport r = check_valid(f, false, tol);
    r.operator_checked = true;
    const auto& p = f.params();
    const std::size_t nw = f.n_w(), nx = f.n_x();
    const std::vector<double> Tf = apply_values(op, f);
    const std::vector<double> err = row_errors(op, tol.error_factor);
    bool ok = true;
    for (std::size_t i = 0; i < nw; ++i) {
        r.subsolution_tolerance = std::max(r.subsolution_tolerance, err[i]);
        for (std::size_t j = 0; j < nx; ++j) {
            if (p.x_grid[j] < 0.0)
                continue;
            const double excess = f.at(i, j) - Tf[i * nx + j];
            r.subsolution_max_violation = std::max(r.subsolution_max_violation, excess);
            if (excess > err[i]) {
                ok = false;
                if (r.violations.size() < kMaxListed)
                    r.violations.push_back({"subsolution", p.w_grid[i], p.x_grid[j], excess, err[i]});
            }
        }
    }
    r.pass = r.pass && ok;
    return r;
}

ComparisonResult check_comparison(const Profile& sub, const Profile& f0, int t_max,
                                  double error_factor) {
    return check_comparison(UpdateOperator(f0.params(), f0.geometry()), sub, f0, t_max,
                            error_factor);
}

ComparisonResult check_comparison(const UpdateOperator& op, const Profile& sub, const Profile& f0,
                                  int t_max, double error_factor) {
    if (t_max < 0)
        throw std::invalid_argument("check_comparison: t_max must be >= 0");
    if (sub.geometry().is_radial() || !sub.params().same_grid(f0.params()))
        throw std::invalid_argument("check_comparison: sub and f0 must share a half-space grid");
    const auto& p = f0.params();
    const std::size_t nw = f0.n_w(), nx = f0.n_x();
    const std::vector<double> err = row_errors(op, error_factor);
    ComparisonResult res;
    res.min_slack = std::numeric_limits<double>::infinity();
    Profile f = f0;
    for (int t = 0; t <= t_max; ++t) {
        for (std::size_t i = 0; i < nw; ++i)
            for (std::size_t j = 0; j < nx; ++j) {
                if (p.x_grid[j] < 0.0)
                    continue;
                const double slack = f.at(i, j) - sub.at(i, j);
                res.min_slack = std::min(res.min_slack, slack);
                const double tol = t * err[i];
                if (slack < -tol && !res.first_violation) {
                    res.holds = false;
                    res.first_violation =
                        ComparisonViolation{t, p.w_grid[i], p.x_grid[j], sub.at(i, j), f.at(i, j), tol};
                }
            }
        res.iterations = t;
        if (res.first_violation || t == t_max)
            break;
        Profile next = op.apply(f);
        const bool fixed = next.values() == f.values();
        f = std::move(next);
        if (fixed) {
            // every later iterate is the same
            res.iterations = t_max;
            break;
        }
    }
    return res;
}

} // namespace girglab::theory
