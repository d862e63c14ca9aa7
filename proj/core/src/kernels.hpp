#pragma once

// Internal: discretised weight kernels of the mean-field operator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "girglab/geometry.hpp"
#include "girglab/meanfield.hpp"
#include "girglab/numerics.hpp"

namespace girglab::meanfield::detail {

// (tau - 1) e^{-(tau - 1) s}: weight density in s = log w'
inline double log_density(double s, double tau) { return (tau - 1.0) * std::exp((1.0 - tau) * s); }

inline double edge_radius(double k, double w, double w2, int d) {
    const double a = k * (w * w2);
    return d == 2 ? std::sqrt(a) : std::pow(a, 1.0 / d);
}

// ---- half-space ----

struct HalfspaceKernel {
    std::size_t n_w = 0, n_z = 0;
    double h = 0.0;
    // band[i * n_w + a][m], m = 0..M: weight of node j +- m on node j
    std::vector<std::vector<double>> band;
    // tail[i * n_w + a][l]: weight of the top node (constant beyond) for a node l steps below it;
    // mirrored for the bottom node
    std::vector<std::vector<double>> tail;
    std::vector<double> err; // per row i
};

HalfspaceKernel build_halfspace_kernel(const MeanFieldParams& p);
// mu at every node for g = 2f - 1 (row-major)
void halfspace_apply(const HalfspaceKernel& K, const double* g, double* mu);

// int (2 f(z') - 1) S(z' - z) dz' for one weight row of f (piecewise linear, constant outside)
double halfspace_row_integral(const geometry::BallSlices& S, const double* f_row,
                              const std::vector<double>& z, double zc, double R);

// ---- radial (d = 2) ----

struct RadialGrid {
    const double* x = nullptr;
    std::size_t n = 0;
    double h = 0.0;
    std::size_t cell_of(double r) const {
        if (r <= x[0])
            return 0;
        auto c = static_cast<std::size_t>(std::min<double>(std::floor((r - x[0]) / h), n - 2.0));
        while (c > 0 && r < x[c])
            --c;
        while (c + 2 < n && r > x[c + 1])
            ++c;
        return c;
    }
};

inline constexpr int kRadialGaussPoints = 4;

// Distributes int g(rho') arc(rho, rho', R) d rho' over the grid nodes of the piecewise-linear
// interpolant: sink(b, weight). Returns the weights of the constant extensions below the first
// node (tail_in) and above the last (tail_out).
template <class Sink>
void radial_weights(double rho, double R, const RadialGrid& G, Sink&& sink, double& tail_in,
                    double& tail_out) {
    const double x0 = G.x[0], xN = G.x[G.n - 1];
    tail_in = x0 > 0.0 ? geometry::lens_area(rho, x0, R) : 0.0;
    tail_out = std::numbers::pi * R * R - geometry::lens_area(rho, xN, R);

    auto deposit = [&](double r, double wt) {
        const std::size_t c = G.cell_of(r);
        const double t = std::clamp((r - G.x[c]) / (G.x[c + 1] - G.x[c]), 0.0, 1.0);
        sink(c, wt * (1.0 - t));
        sink(c + 1, wt * t);
    };

    // full circles: rho' in [0, R - rho]
    if (R > rho) {
        const double q1 = x0, q2 = std::min(R - rho, xN);
        if (q1 < q2) {
            const auto& gl = gauss_legendre(2);
            for (std::size_t c = G.cell_of(q1); c + 1 < G.n && G.x[c] < q2; ++c) {
                const double u = std::max(G.x[c], q1), v = std::min(G.x[c + 1], q2);
                if (v <= u)
                    continue;
                const double m = 0.5 * (u + v), hl = 0.5 * (v - u);
                for (int q = 0; q < 2; ++q) {
                    const double r = m + hl * gl.nodes[q];
                    deposit(r, 2.0 * std::numbers::pi * r * hl * gl.weights[q]);
                }
            }
        }
    }
    if (rho <= 0.0)
        return;
    // partial circles: rho' in [|rho - R|, rho + R], mapped by rho' = c0 - c1 cos(theta)
    const double p1 = std::abs(rho - R), p2 = rho + R;
    const double q1 = std::max(p1, x0), q2 = std::min(p2, xN);
    if (!(q1 < q2))
        return;
    const double c0 = 0.5 * (p1 + p2), c1 = 0.5 * (p2 - p1);
    auto theta = [&](double r) { return std::acos(std::clamp((c0 - r) / c1, -1.0, 1.0)); };
    const auto& gl = gauss_legendre(kRadialGaussPoints);
    const double two_rho = 2.0 * rho, base = rho * rho - R * R;
    auto segment = [&](double u, double v) {
        // pieces end at fixed multiples of pi/12 so the rule moves continuously with R
        constexpr double piece = std::numbers::pi / 12.0;
        const double ta = theta(u), tb = theta(v);
        for (double lo = ta; lo < tb;) {
            const double hi = std::min(tb, (std::floor(lo / piece) + 1.0) * piece);
            const double m = 0.5 * (lo + hi), hl = 0.5 * (hi - lo);
            lo = hi;
            for (int q = 0; q < kRadialGaussPoints; ++q) {
                const double th = m + hl * gl.nodes[q];
                const double r = c0 - c1 * std::cos(th);
                if (r <= 0.0)
                    continue;
                const double c = std::clamp((base + r * r) / (two_rho * r), -1.0, 1.0);
                const double arc = 2.0 * r * std::acos(c);
                deposit(r, arc * c1 * std::sin(th) * hl * gl.weights[q]);
            }
        }
    };
    double u = q1;
    for (std::size_t c = G.cell_of(q1); c + 1 < G.n && u < q2; ++c) {
        const double v = std::min(G.x[c + 1], q2);
        if (v > u)
            segment(u, v);
        u = std::max(u, v);
    }
}

struct RadialKernel {
    std::size_t n_w = 0, n_x = 0;
    struct Row {
        std::size_t b_lo = 0;
        std::vector<double> w;
        double tail_in = 0.0, tail_out = 0.0;
    };
    std::vector<Row> rows; // [(i * n_x + j) * n_w + a]
    std::vector<double> err;
};

RadialKernel build_radial_kernel(const MeanFieldParams& p);
void radial_apply(const RadialKernel& K, const double* g, double* mu);

} // namespace girglab::meanfield::detail
