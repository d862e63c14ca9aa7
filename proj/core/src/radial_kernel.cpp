#include <algorithm>
#include <cmath>
#include <numbers>

#include "girglab/parallel.hpp"
#include "kernels.hpp"

namespace girglab::meanfield::detail {

namespace {

constexpr double kPi = std::numbers::pi;

// Psi(t): mass of the weight hat a (in s = log w') whose edge radius with w_i is at least t.
// Swapping the order of integration turns the kernel into int hat_b(|y|) Psi(|y - c|) dy.
struct HatTail {
    double gamma = 0.0, log_kw = 0.0;
    double s_lo = 0.0, s_mid = 0.0, s_hi = 0.0;
    double R_lo = 0.0, R_mid = 0.0, R_hi = 0.0;
    double psi0 = 0.0, total = 0.0;

    HatTail(const MeanFieldParams& p, std::size_t i, std::size_t a, const std::vector<double>& lw) {
        const std::size_t nw = lw.size();
        gamma = p.tau - 1.0;
        log_kw = std::log(p.k * p.w_grid[i]);
        s_mid = lw[a];
        s_lo = a > 0 ? lw[a - 1] : lw[a];
        s_hi = a + 1 < nw ? lw[a + 1] : lw[a];
        auto radius = [&](double s) { return std::exp(0.5 * (log_kw + s)); };
        R_lo = radius(s_lo);
        R_mid = radius(s_mid);
        R_hi = radius(s_hi);
        psi0 = H(s_lo);
        // pi R(s)^2 integrated against the hat
        const auto& gl = gauss_legendre(8);
        auto half = [&](double u, double v, bool rising) {
            double acc = 0.0;
            if (v <= u)
                return acc;
            const double m = 0.5 * (u + v), hl = 0.5 * (v - u);
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double s = m + hl * gl.nodes[q];
                const double hat = rising ? (s - u) / (v - u) : (v - s) / (v - u);
                acc += gl.weights[q] * hat * gamma * std::exp(-gamma * s) * kPi * std::exp(log_kw + s);
            }
            return acc * hl;
        };
        total = half(s_lo, s_mid, true) + half(s_mid, s_hi, false);
    }

    // int_u^v (s - c) gamma e^{-gamma s} ds
    double F(double u, double v, double c) const {
        auto g = [&](double s) { return std::exp(-gamma * s) * ((s - c) + 1.0 / gamma); };
        return g(u) - g(v);
    }
    // hat mass above sigma
    double H(double sigma) const {
        double acc = 0.0;
        if (sigma < s_mid && s_mid > s_lo)
            acc += (F(std::max(sigma, s_lo), s_mid, s_lo)) / (s_mid - s_lo);
        if (s_hi > s_mid) {
            const double u = std::max(sigma, s_mid);
            if (u < s_hi)
                acc -= F(u, s_hi, s_hi) / (s_hi - s_mid);
        }
        return acc;
    }
    double operator()(double t) const {
        if (t <= R_lo)
            return psi0;
        if (t >= R_hi)
            return 0.0;
        return H(2.0 * std::log(t) - log_kw);
    }
};

// int_0^{2 pi} Psi(|rho' e^{i theta} - rho|) d theta
double ring_integral(const HatTail& P, double rho, double rho2) {
    if (rho * rho2 == 0.0)
        return 2.0 * kPi * P(rho + rho2);
    const double tmin = std::abs(rho - rho2), tmax = rho + rho2;
    if (P.R_hi <= tmin)
        return 0.0;
    if (P.R_lo >= tmax)
        return 2.0 * kPi * P.psi0;
    const double a = rho * rho + rho2 * rho2, b = 2.0 * rho * rho2;
    auto angle = [&](double R) {
        if (R <= tmin)
            return 0.0;
        if (R >= tmax)
            return kPi;
        return std::acos(std::clamp((a - R * R) / b, -1.0, 1.0));
    };
    const double th_lo = angle(P.R_lo), th_mid = angle(P.R_mid), th_hi = angle(P.R_hi);
    double acc = P.psi0 * th_lo;
    const auto& gl = gauss_legendre(6);
    auto piece = [&](double u, double v) {
        if (v <= u)
            return;
        const int n = std::max(1, static_cast<int>(std::ceil((v - u) / (kPi / 6.0))));
        const double step = (v - u) / n;
        for (int p = 0; p < n; ++p) {
            const double m = u + (p + 0.5) * step, hl = 0.5 * step;
            double s = 0.0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double th = m + hl * gl.nodes[q];
                s += gl.weights[q] * P(std::sqrt(std::max(0.0, a - b * std::cos(th))));
            }
            acc += s * hl;
        }
    };
    piece(th_lo, th_mid);
    piece(th_mid, th_hi);
    return 2.0 * acc;
}

} // namespace

RadialKernel build_radial_kernel(const MeanFieldParams& p) {
    RadialKernel K;
    K.n_w = p.w_grid.size();
    K.n_x = p.x_grid.size();
    const std::size_t nw = K.n_w, nx = K.n_x;
    K.rows.assign(nw * nx * nw, {});
    K.err.assign(nw * nx, 0.0);
    if (nw < 2)
        return K;
    const RadialGrid G{p.x_grid.data(), nx, p.spacing()};
    const double x0 = G.x[0], xN = G.x[nx - 1];
    std::vector<double> lw(nw);
    for (std::size_t a = 0; a < nw; ++a)
        lw[a] = std::log(p.w_grid[a]);

    parallel_for(nw * nx, [&](std::size_t q) {
        const std::size_t i = q / nx, j = q % nx;
        const double rho = G.x[j];
        RadialKernel::Row* rows = K.rows.data() + q * nw;
        std::vector<double> cuts;
        for (std::size_t a = 0; a < nw; ++a) {
            const HatTail P(p, i, a, lw);
            RadialKernel::Row& row = rows[a];
            const double lo = std::max(0.0, rho - P.R_hi), hi = rho + P.R_hi;
            // breakpoints of the ring integral in rho'
            cuts.clear();
            for (double R : {P.R_lo, P.R_mid, P.R_hi})
                for (double c : {rho + R, std::abs(rho - R)})
                    if (c > lo && c < hi)
                        cuts.push_back(c);
            std::sort(cuts.begin(), cuts.end());

            // K7 over [u, v] of ring(rho') rho' times (hat weights at nodes b, b + 1)
            auto integrate = [&](double u, double v, auto&& sink) {
                const double m = 0.5 * (u + v), hl = 0.5 * (v - u);
                double kr = 0.0, gr = 0.0;
                for (int t = 0; t < 7; ++t) {
                    const int idx = t < 4 ? t : 6 - t;
                    const double x = m + (t < 3 ? -1.0 : 1.0) * hl * gk7::xgk[idx];
                    const double val = x * ring_integral(P, rho, x) * hl;
                    kr += gk7::wgk[idx] * val;
                    if (idx == 1)
                        gr += gk7::wg[0] * val;
                    else if (idx == 3)
                        gr += gk7::wg[1] * val;
                    sink(x, gk7::wgk[idx] * val);
                }
                K.err[q] += std::abs(kr - gr);
                return kr;
            };
            auto walk = [&](double u, double v, double max_len, auto&& sink) {
                double acc = 0.0;
                auto it = std::upper_bound(cuts.begin(), cuts.end(), u);
                while (u < v) {
                    double e = std::min(v, u + max_len);
                    if (it != cuts.end() && *it < e)
                        e = *it++;
                    if (e > u)
                        acc += integrate(u, e, sink);
                    u = e;
                }
                return acc;
            };

            const double blo = std::max(lo, x0), bhi = std::min(hi, xN);
            double inner = 0.0;
            if (blo < bhi) {
                const std::size_t c_lo = G.cell_of(blo), c_hi = G.cell_of(bhi);
                row.b_lo = c_lo;
                row.w.assign(c_hi - c_lo + 2, 0.0);
                for (std::size_t c = c_lo; c <= c_hi; ++c) {
                    const double u = std::max(blo, G.x[c]), v = std::min(bhi, G.x[c + 1]);
                    if (!(u < v))
                        continue;
                    const double xl = G.x[c], xr = G.x[c + 1];
                    inner += walk(u, v, xr - xl, [&](double x, double wt) {
                        const double t = (x - xl) / (xr - xl);
                        row.w[c - c_lo] += wt * (1.0 - t);
                        row.w[c + 1 - c_lo] += wt * t;
                    });
                }
            } else {
                row.b_lo = 0;
                row.w.clear();
            }
            row.tail_in = lo < x0 ? walk(lo, std::min(hi, x0), G.h, [](double, double) {}) : 0.0;
            row.tail_out = P.total - row.tail_in - inner;
            if (hi <= xN)
                row.tail_out = 0.0;
        }
    });
    return K;
}

void radial_apply(const RadialKernel& K, const double* g, double* mu) {
    const std::size_t nw = K.n_w, nx = K.n_x;
    parallel_for(nw * nx, [&](std::size_t q) {
        double s = 0.0;
        const RadialKernel::Row* rows = K.rows.data() + q * nw;
        for (std::size_t a = 0; a < nw; ++a) {
            const RadialKernel::Row& r = rows[a];
            const double* ga = g + a * nx;
            for (std::size_t m = 0; m < r.w.size(); ++m)
                s += r.w[m] * ga[r.b_lo + m];
            s += r.tail_in * ga[0] + r.tail_out * ga[nx - 1];
        }
        mu[q] = s;
    });
}

} // namespace girglab::meanfield::detail
