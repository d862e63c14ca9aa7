#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace girglab {

// Thrown when an integral or solver cannot reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Phi(x) = (1 + erf(x)) / 2, i.e. the N(0, 1/2) distribution function.
double phi(double x);

// volume of the unit ball in R^d (d >= 0)
double unit_ball_volume(int d);

struct GaussRule {
    std::vector<double> nodes; // on [-1, 1]
    std::vector<double> weights;
};
// n-point Gauss-Legendre rule, cached per n
const GaussRule& gauss_legendre(int n);

namespace gk15 {
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at xgk[1], xgk[3], xgk[5], xgk[7]
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
} // namespace gk15

// 7-point Kronrod extension of the 3-point Gauss rule
namespace gk7 {
inline constexpr std::array<double, 4> xgk = {0.960491268708020283423507092629080,
                                              0.774596669241483377035853079956480,
                                              0.434243749346802558002071502844628, 0.0};
inline constexpr std::array<double, 4> wgk = {0.104656226026467265193823857192073,
                                              0.268488089868333440728569280666710,
                                              0.401397414775962222905051818618432,
                                              0.450916538658474142345110087045571};
// Gauss weights at xgk[1] and xgk[3]
inline constexpr std::array<double, 2> wg = {0.555555555555555555555555555555556,
                                             0.888888888888888888888888888888889};
} // namespace gk7

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

// Globally adaptive G7/K15 for a vector-valued integrand f(x, out[dim]).
// Stops when the summed L1 error <= max(abs_tol, rel_tol * |I|_1).
// Returns the L1 error estimate; the integral is written to result[dim].
template <class F>
double integrate_adaptive_vec(F&& f, double a, double b, std::size_t dim, double abs_tol,
                              double rel_tol, double* result, int max_intervals = 400) {
    struct Interval {
        double a, b, err;
        std::size_t slot;
    };
    std::vector<double> store; // per-interval K15 values
    std::vector<double> fx(15 * dim);
    std::vector<std::size_t> free_slots;

    auto rule = [&](double lo, double hi, std::size_t slot) {
        const double c = 0.5 * (lo + hi), hl = 0.5 * (hi - lo);
        double* k = store.data() + slot * dim;
        // node order: centre, then +-xgk[0..6]
        f(c, fx.data());
        for (int j = 0; j < 7; ++j) {
            f(c - hl * gk15::xgk[j], fx.data() + (1 + 2 * j) * dim);
            f(c + hl * gk15::xgk[j], fx.data() + (2 + 2 * j) * dim);
        }
        double err = 0.0;
        for (std::size_t q = 0; q < dim; ++q) {
            double kr = gk15::wgk[7] * fx[q];
            double gr = gk15::wg[3] * fx[q];
            for (int j = 0; j < 7; ++j) {
                const double s = fx[(1 + 2 * j) * dim + q] + fx[(2 + 2 * j) * dim + q];
                kr += gk15::wgk[j] * s;
                if (j % 2 == 1)
                    gr += gk15::wg[j / 2] * s;
            }
            k[q] = kr * hl;
            err += std::abs((kr - gr) * hl);
        }
        return err;
    };
    auto alloc = [&]() {
        if (!free_slots.empty()) {
            const std::size_t s = free_slots.back();
            free_slots.pop_back();
            return s;
        }
        store.resize(store.size() + dim);
        return store.size() / dim - 1;
    };
    auto cmp = [](const Interval& x, const Interval& y) { return x.err < y.err; };
    std::priority_queue<Interval, std::vector<Interval>, decltype(cmp)> heap(cmp);

    const std::size_t s0 = alloc();
    const double e0 = rule(a, b, s0);
    heap.push({a, b, e0, s0});
    double total_err = e0;
    int count = 1;
    auto total_norm = [&]() {
        std::vector<double> acc(dim, 0.0);
        auto copy = heap;
        while (!copy.empty()) {
            const Interval& it = copy.top();
            for (std::size_t q = 0; q < dim; ++q)
                acc[q] += store[it.slot * dim + q];
            copy.pop();
        }
        double s = 0.0;
        for (double v : acc)
            s += std::abs(v);
        return s;
    };
    double norm = 0.0;
    for (std::size_t q = 0; q < dim; ++q)
        norm += std::abs(store[s0 * dim + q]);
    while (total_err > std::max(abs_tol, rel_tol * norm)) {
        if (count >= max_intervals)
            throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(a) +
                                 ", " + std::to_string(b) + "], error " +
                                 std::to_string(total_err));
        const Interval worst = heap.top();
        heap.pop();
        free_slots.push_back(worst.slot);
        const double mid = 0.5 * (worst.a + worst.b);
        const std::size_t sl = alloc();
        const std::size_t sr = alloc();
        const double el = rule(worst.a, mid, sl);
        const double er = rule(mid, worst.b, sr);
        heap.push({worst.a, mid, el, sl});
        heap.push({mid, worst.b, er, sr});
        total_err += el + er - worst.err;
        ++count;
        if (count % 8 == 0 || total_err <= std::max(abs_tol, rel_tol * norm))
            norm = total_norm();
    }
    std::fill(result, result + dim, 0.0);
    double err = 0.0;
    while (!heap.empty()) {
        const Interval& it = heap.top();
        for (std::size_t q = 0; q < dim; ++q)
            result[q] += store[it.slot * dim + q];
        err += it.err;
        heap.pop();
    }
    return err;
}

template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                              int max_intervals = 400) {
    QuadResult r;
    r.error = integrate_adaptive_vec([&](double x, double* out) { out[0] = f(x); }, a, b, 1,
                                     abs_tol, rel_tol, &r.value, max_intervals);
    return r;
}

} // namespace girglab
