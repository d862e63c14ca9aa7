#include <algorithm>
#include <cmath>

#include "girglab/parallel.hpp"
#include "kernels.hpp"

namespace girglab::meanfield::detail {

namespace {

// Hat-function integrals of the slice volume for a ball of radius R, at offsets m*h.
struct HatMoments {
    std::vector<double> C, M1; // at l*h for l = -1 .. lmax+1, stored shifted by one
    void fill(const geometry::BallSlices& S, double R, double h, std::size_t lmax) {
        C.resize(lmax + 3);
        M1.resize(lmax + 3);
        for (std::size_t q = 0; q < lmax + 3; ++q) {
            const double t = (static_cast<double>(q) - 1.0) * h;
            C[q] = S.cdf(t, R);
            M1[q] = S.first_moment(t, R);
        }
    }
    // cell [l h, (l+1) h]: zeroth moment and first moment about l h
    double p0(long l) const { return C[l + 2] - C[l + 1]; }
    double p1(long l, double h) const {
        return (M1[l + 2] - M1[l + 1]) - static_cast<double>(l) * h * p0(l);
    }
};

} // namespace

HalfspaceKernel build_halfspace_kernel(const MeanFieldParams& p) {
    HalfspaceKernel K;
    K.n_w = p.w_grid.size();
    K.n_z = p.x_grid.size();
    K.h = p.spacing();
    const std::size_t nw = K.n_w, nz = K.n_z;
    const double h = K.h;
    K.band.assign(nw * nw, {});
    K.tail.assign(nw * nw, {});
    K.err.assign(nw, 0.0);
    if (nw < 2)
        return K; // w' ranges over a single point: no mass

    std::vector<double> lw(nw);
    for (std::size_t a = 0; a < nw; ++a)
        lw[a] = std::log(p.w_grid[a]);

    auto band_of = [&](std::size_t i, std::size_t c) {
        const double Rmax = edge_radius(p.k, p.w_grid[i], p.w_grid[c + 1], p.d) * (1.0 + 1e-12);
        return std::min<std::size_t>(nz - 1, static_cast<std::size_t>(std::ceil(Rmax / h)) + 1);
    };

    parallel_for(nw, [&](std::size_t i) {
        const geometry::BallSlices S(p.d);
        for (std::size_t a = 0; a < nw; ++a) {
            std::size_t M = 0;
            if (a > 0)
                M = std::max(M, band_of(i, a - 1));
            if (a + 1 < nw)
                M = std::max(M, band_of(i, a));
            K.band[i * nw + a].assign(M + 1, 0.0);
            K.tail[i * nw + a].assign(std::min(nz, M + 1), 0.0);
        }
        HatMoments hm;
        std::vector<double> out;
        for (std::size_t c = 0; c + 1 < nw; ++c) {
            const std::size_t M = band_of(i, c);
            const std::size_t Lt = std::min(nz, M + 1);
            const std::size_t dim = 2 * (M + 1) + 2 * Lt;
            out.assign(dim, 0.0);
            const double s0 = lw[c], s1 = lw[c + 1], ds = s1 - s0;
            auto integrand = [&](double s, double* v) {
                const double R = edge_radius(p.k, p.w_grid[i], std::exp(s), p.d);
                const double rho = log_density(s, p.tau);
                const double th = (s - s0) / ds;
                const double lo = (1.0 - th) * rho, hi = th * rho;
                hm.fill(S, R, h, M);
                const double total = S.total(R);
                for (std::size_t m = 0; m <= M; ++m) {
                    const auto l = static_cast<long>(m);
                    const double val = hm.p1(l - 1, h) / h + hm.p0(l) - hm.p1(l, h) / h;
                    v[m] = lo * val;
                    v[M + 1 + m] = hi * val;
                }
                for (std::size_t l = 0; l < Lt; ++l) {
                    const auto ll = static_cast<long>(l);
                    const double val = hm.p1(ll, h) / h + (total - hm.C[l + 2]);
                    v[2 * (M + 1) + l] = lo * val;
                    v[2 * (M + 1) + Lt + l] = hi * val;
                }
            };
            // the hat moments kink where R crosses a multiple of h
            const double log_kw = std::log(p.k * p.w_grid[i]);
            const double R0 = edge_radius(p.k, p.w_grid[i], p.w_grid[c], p.d);
            const double R1 = edge_radius(p.k, p.w_grid[i], p.w_grid[c + 1], p.d);
            std::vector<double> part(dim);
            double u = s0;
            for (double q = std::floor(R0 / h) + 1.0;; q += 1.0) {
                const double e = q * h < R1 ? std::clamp(p.d * std::log(q * h) - log_kw, u, s1) : s1;
                if (e > u) {
                    K.err[i] += integrate_adaptive_vec(integrand, u, e, dim, 0.0, p.quad_tol,
                                                       part.data(), 2000);
                    for (std::size_t m = 0; m < dim; ++m)
                        out[m] += part[m];
                }
                u = e;
                if (u >= s1)
                    break;
            }
            auto& blo = K.band[i * nw + c];
            auto& bhi = K.band[i * nw + c + 1];
            auto& tlo = K.tail[i * nw + c];
            auto& thi = K.tail[i * nw + c + 1];
            for (std::size_t m = 0; m <= M; ++m) {
                blo[m] += out[m];
                bhi[m] += out[M + 1 + m];
            }
            for (std::size_t l = 0; l < Lt; ++l) {
                tlo[l] += out[2 * (M + 1) + l];
                thi[l] += out[2 * (M + 1) + Lt + l];
            }
        }
    });
    return K;
}

void halfspace_apply(const HalfspaceKernel& K, const double* g, double* mu) {
    const std::size_t nw = K.n_w, nz = K.n_z;
    parallel_for(nw, [&](std::size_t i) {
        double* out = mu + i * nz;
        std::fill(out, out + nz, 0.0);
        for (std::size_t a = 0; a < nw; ++a) {
            const auto& b = K.band[i * nw + a];
            const auto& t = K.tail[i * nw + a];
            if (b.empty())
                continue;
            const double* ga = g + a * nz;
            const std::size_t M = b.size() - 1;
            const double top = ga[nz - 1], bottom = ga[0];
            for (std::size_t j = 0; j < nz; ++j) {
                double s = 0.0;
                const std::size_t up = std::min(M, nz - 1 - j);
                for (std::size_t m = 0; m <= up; ++m)
                    s += b[m] * ga[j + m];
                const std::size_t down = std::min(M, j);
                for (std::size_t m = 1; m <= down; ++m)
                    s += b[m] * ga[j - m];
                const std::size_t l_top = nz - 1 - j;
                if (l_top < t.size())
                    s += t[l_top] * top;
                if (j < t.size())
                    s += t[j] * bottom;
                out[j] += s;
            }
        }
    });
}

double halfspace_row_integral(const geometry::BallSlices& S, const double* f, const std::vector<double>& z,
                              double zc, double R) {
    const std::size_t n = z.size();
    const double total = S.total(R);
    double acc = 0.0;
    // constant extensions
    const double below = S.cdf(z.front() - zc, R);
    acc += (2.0 * f[0] - 1.0) * below;
    acc += (2.0 * f[n - 1] - 1.0) * (total - S.cdf(z.back() - zc, R));
    const double lo = zc - R, hi = zc + R;
    if (hi <= z.front() || lo >= z.back())
        return acc;
    const double h = (z.back() - z.front()) / static_cast<double>(n - 1);
    auto b0 = static_cast<std::size_t>(std::max(0.0, std::floor((lo - z.front()) / h) - 1.0));
    for (std::size_t b = b0; b + 1 < n; ++b) {
        if (z[b] >= hi)
            break;
        if (z[b + 1] <= lo)
            continue;
        const double t0 = std::max(z[b] - zc, -R), t1 = std::min(z[b + 1] - zc, R);
        if (t1 <= t0)
            continue;
        const double beta = 2.0 * (f[b + 1] - f[b]) / (z[b + 1] - z[b]);
        const double tc = 0.5 * (t0 + t1);
        const double alpha = 2.0 * f[b] - 1.0 + beta * (zc + tc - z[b]); // value at the cell-part centre
        const double dC = S.cdf(t1, R) - S.cdf(t0, R);
        const double dM = S.first_moment(t1, R) - S.first_moment(t0, R);
        acc += alpha * dC + beta * (dM - tc * dC);
    }
    return acc;
}

} // namespace girglab::meanfield::detail
