#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "girglab/meanfield.hpp"
#include "kernels.hpp"

namespace girglab::meanfield {

double lambda_of_w(double w, const MeanFieldParams& p) {
    const double near = unit_ball_volume(p.d) * p.k * w;
    if (!p.truncated_lambda)
        return near * (1.0 + 1.0 / (p.tau - 2.0));
    // far term restricted to w' <= w_cap
    const double W = p.w_cap;
    const double all = (p.tau - 1.0) / (p.tau - 2.0) * (1.0 - std::pow(W, 2.0 - p.tau));
    const double inside = 1.0 - std::pow(W, 1.0 - p.tau);
    return near * (1.0 + all - inside);
}

double truncated_mass(double w, const MeanFieldParams& p) {
    return unit_ball_volume(p.d) * p.k * w * (p.tau - 1.0) / (p.tau - 2.0) *
           (1.0 - std::pow(p.w_cap, 2.0 - p.tau));
}

namespace {

// Outer integral over w' cell by cell; inner(R, c, th) gives the two-row inner value. The
// inner value has kinks wherever R crosses one of the radii in `kinks`; cells are split there.
template <class Inner>
AdvantageResult outer_integral(const MeanFieldParams& p, double w, std::vector<double> kinks,
                               Inner&& inner) {
    AdvantageResult res;
    const std::size_t nw = p.w_grid.size();
    if (nw < 2)
        return res;
    const geometry::BallSlices S(p.d);
    const double log_kw = std::log(p.k * w);
    std::vector<double> cuts;
    for (double R : kinks)
        if (R > 0.0)
            cuts.push_back(p.d * std::log(R) - log_kw);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < nw; ++c) {
        const double s0 = std::log(p.w_grid[c]), s1 = std::log(p.w_grid[c + 1]);
        auto f = [&](double s, double* v) {
            const double R = detail::edge_radius(p.k, w, std::exp(s), p.d);
            const double dens = detail::log_density(s, p.tau);
            const double th = (s - s0) / (s1 - s0);
            v[0] = dens * inner(R, c, th);
            v[1] = dens * S.total(R);
        };
        double u = s0;
        auto it = std::upper_bound(cuts.begin(), cuts.end(), s0);
        while (u < s1) {
            double e = s1;
            if (it != cuts.end() && *it < s1)
                e = *it++;
            if (e > u) {
                double out[2];
                res.quad_error_estimate +=
                    integrate_adaptive_vec(f, u, e, 2, 0.0, p.quad_tol, out, 4000);
                res.mu += out[0];
                res.lambda_total += out[1];
            }
            u = e;
        }
    }
    res.lambda_plus = 0.5 * (res.lambda_total + res.mu);
    res.lambda_minus = 0.5 * (res.lambda_total - res.mu);
    return res;
}

} // namespace

AdvantageResult advantage_halfspace(const Profile& f, double w, double z) {
    if (f.geometry().is_radial())
        throw std::invalid_argument("advantage_halfspace: profile is radial");
    const auto& p = f.params();
    const geometry::BallSlices S(p.d);
    std::vector<double> kinks;
    for (double zb : p.x_grid)
        kinks.push_back(std::abs(zb - z));
    return outer_integral(p, w, std::move(kinks), [&](double R, std::size_t c, double th) {
        const double a = detail::halfspace_row_integral(S, f.row(c).data(), p.x_grid, z, R);
        const double b = detail::halfspace_row_integral(S, f.row(c + 1).data(), p.x_grid, z, R);
        return (1.0 - th) * a + th * b;
    });
}

AdvantageResult advantage_radial(const Profile& g, double w, double rho) {
    if (!g.geometry().is_radial())
        throw std::invalid_argument("advantage_radial: profile is not radial");
    const auto& p = g.params();
    if (p.d != 2)
        throw std::invalid_argument("advantage_radial: d = 2 only");
    const detail::RadialGrid G{p.x_grid.data(), p.x_grid.size(), p.spacing()};
    std::vector<double> kinks;
    for (double xb : p.x_grid) {
        kinks.push_back(std::abs(xb - rho));
        kinks.push_back(xb + rho);
    }
    return outer_integral(p, w, std::move(kinks), [&](double R, std::size_t c, double th) {
        const auto ra = g.row(c), rb = g.row(c + 1);
        double a = 0.0, b = 0.0, tin = 0.0, tout = 0.0;
        detail::radial_weights(
            rho, R, G,
            [&](std::size_t q, double wt) {
                a += wt * (2.0 * ra[q] - 1.0);
                b += wt * (2.0 * rb[q] - 1.0);
            },
            tin, tout);
        const std::size_t n = G.n;
        a += tin * (2.0 * ra[0] - 1.0) + tout * (2.0 * ra[n - 1] - 1.0);
        b += tin * (2.0 * rb[0] - 1.0) + tout * (2.0 * rb[n - 1] - 1.0);
        return (1.0 - th) * a + th * b;
    });
}

struct UpdateOperator::Impl {
    MeanFieldParams params;
    Geometry geometry;
    detail::HalfspaceKernel hs;
    detail::RadialKernel rad;
    std::vector<double> lambda;
    std::vector<double> mu_err;
};

UpdateOperator::UpdateOperator(const MeanFieldParams& params, Geometry geometry) {
    params.validate(geometry.kind);
    auto impl = std::make_shared<Impl>();
    impl->params = params;
    impl->geometry = geometry;
    const std::size_t nw = params.w_grid.size();
    impl->lambda.resize(nw);
    impl->mu_err.assign(nw, 0.0);
    for (std::size_t i = 0; i < nw; ++i)
        impl->lambda[i] = lambda_of_w(params.w_grid[i], params);
    if (geometry.is_radial()) {
        impl->rad = detail::build_radial_kernel(params);
        const std::size_t nx = params.x_grid.size();
        for (std::size_t q = 0; q < impl->rad.err.size(); ++q)
            impl->mu_err[q / nx] = std::max(impl->mu_err[q / nx], impl->rad.err[q]);
    } else {
        impl->hs = detail::build_halfspace_kernel(params);
        impl->mu_err = impl->hs.err;
    }
    impl_ = std::move(impl);
}

const MeanFieldParams& UpdateOperator::params() const { return impl_->params; }
Geometry UpdateOperator::geometry() const { return impl_->geometry; }
double UpdateOperator::lambda(std::size_t i) const { return impl_->lambda[i]; }
double UpdateOperator::mu_error(std::size_t i) const { return impl_->mu_err[i]; }

double UpdateOperator::value_error() const {
    double e = 0.0;
    for (std::size_t i = 0; i < impl_->lambda.size(); ++i)
        e = std::max(e, impl_->mu_err[i] / std::sqrt(2.0 * std::numbers::pi * impl_->lambda[i]));
    return e;
}

std::vector<double> UpdateOperator::advantage(const Profile& f) const {
    if (f.geometry().kind != impl_->geometry.kind || !f.params().same_grid(impl_->params))
        throw std::invalid_argument("UpdateOperator: profile grid does not match the operator");
    const auto& v = f.values();
    std::vector<double> g(v.size()), mu(v.size());
    for (std::size_t q = 0; q < v.size(); ++q)
        g[q] = 2.0 * v[q] - 1.0;
    if (impl_->geometry.is_radial())
        detail::radial_apply(impl_->rad, g.data(), mu.data());
    else
        detail::halfspace_apply(impl_->hs, g.data(), mu.data());
    return mu;
}

Profile UpdateOperator::apply(const Profile& f) const {
    std::vector<double> mu = advantage(f);
    const std::size_t nx = f.n_x();
    for (std::size_t q = 0; q < mu.size(); ++q)
        mu[q] = phi(mu[q] / std::sqrt(2.0 * impl_->lambda[q / nx]));
    return Profile(f.params(), f.geometry(), std::move(mu));
}

Profile apply_T(const Profile& f) { return UpdateOperator(f.params(), f.geometry()).apply(f); }

IterationResult iterate(const UpdateOperator& op, const Profile& f0, int max_iter,
                        double conv_tol, const IterationObserver& observer) {
    if (max_iter < 1)
        throw std::invalid_argument("iterate: max_iter must be >= 1");
    IterationResult res{f0, 0, {}};
    for (int t = 1; t <= max_iter; ++t) {
        Profile next = op.apply(res.profile);
        double delta = 0.0;
        for (std::size_t q = 0; q < next.values().size(); ++q)
            delta = std::max(delta, std::abs(next.values()[q] - res.profile.values()[q]));
        res.profile = std::move(next);
        res.iterations = t;
        res.sup_deltas.push_back(delta);
        if (observer)
            observer(t, res.profile);
        if (delta < conv_tol)
            break;
    }
    return res;
}

IterationResult iterate(const Profile& f0, int max_iter, double conv_tol) {
    return iterate(UpdateOperator(f0.params(), f0.geometry()), f0, max_iter, conv_tol);
}

double survival_margin(const Profile& f) {
    if (f.geometry().is_radial())
        throw std::invalid_argument("survival_margin: half-space profiles only");
    const auto& p = f.params();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.n_w(); ++i) {
        const double z0 = std::pow(p.k * p.w_grid[i], 1.0 / p.d);
        m = std::min(m, f.along_row(i, z0) - 0.5);
    }
    return m;
}

std::optional<double> crossing_radius(const Profile& g) {
    if (!g.geometry().is_radial())
        throw std::invalid_argument("crossing_radius: radial profiles only");
    const auto row = g.row(0);
    const auto& x = g.params().x_grid;
    const std::size_t n = row.size();
    if (row[n - 1] >= 0.5)
        return std::nullopt;
    for (std::size_t j = n - 1; j-- > 0;) {
        if (row[j] >= 0.5) {
            const double t = (row[j] - 0.5) / (row[j] - row[j + 1]);
            return x[j] + t * (x[j + 1] - x[j]);
        }
    }
    return std::nullopt;
}

} // namespace girglab::meanfield
