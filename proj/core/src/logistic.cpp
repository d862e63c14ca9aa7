#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "girglab/experiments.hpp"

namespace girglab::experiments {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct Derivs {
    double ll = 0.0;
    double g[2] = {0.0, 0.0};
    double H[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

Derivs derivs(const SurvivalCurve& c, double s0, double b) {
    Derivs D;
    for (const auto& pt : c.points) {
        if (pt.runs == 0)
            continue;
        const double n = pt.runs, y = pt.survived;
        const double u = (pt.side - s0) / b;
        const double p = logistic(pt.side, s0, b), q = 1.0 - p;
        D.ll += -y * softplus(-u) - (n - y) * softplus(u);
        const double r = y - n * p, npq = n * p * q;
        D.g[0] += -r / b;
        D.g[1] += -r * u / b;
        D.H[0][0] += -npq / (b * b);
        D.H[0][1] += (-npq * u + r) / (b * b);
        D.H[1][1] += (-npq * u * u + 2.0 * r * u) / (b * b);
    }
    D.H[1][0] = D.H[0][1];
    return D;
}

} // namespace

double logistic(double s, double s0, double b) {
    const double u = (s - s0) / b;
    return u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

double log_likelihood(const SurvivalCurve& c, double s0, double b) { return derivs(c, s0, b).ll; }

LogisticFit fit_logistic(const SurvivalCurve& curve) {
    std::vector<const CurvePoint*> pts;
    for (const auto& p : curve.points)
        if (p.runs > 0)
            pts.push_back(&p);
    if (pts.size() < 2)
        throw std::invalid_argument("fit_logistic: need at least two sizes with runs");
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (!(pts[i]->side > pts[i - 1]->side))
            throw std::invalid_argument("fit_logistic: sides must be strictly increasing");
    const double lo = pts.front()->side, hi = pts.back()->side, span = hi - lo;
    const double b_min = span * 1e-3, b_max = span * 10.0;

    LogisticFit fit;
    fit.se_s0 = fit.se_b = std::numeric_limits<double>::quiet_NaN();

    // perfectly separated (or one-sided) data has no finite maximum
    bool separated = true;
    bool seen_one = false;
    for (const auto* p : pts) {
        if (p->survived != 0 && p->survived != p->runs)
            separated = false;
        if (p->survived == p->runs)
            seen_one = true;
        else if (seen_one)
            separated = false;
    }
    if (separated) {
        double last_fail = -std::numeric_limits<double>::infinity();
        double first_ok = std::numeric_limits<double>::infinity();
        for (const auto* p : pts) {
            if (p->survived == 0)
                last_fail = std::max(last_fail, p->side);
            else
                first_ok = std::min(first_ok, p->side);
        }
        if (std::isinf(last_fail))
            fit.s0 = first_ok;
        else if (std::isinf(first_ok))
            fit.s0 = last_fail;
        else
            fit.s0 = 0.5 * (last_fail + first_ok);
        fit.b = b_min;
        fit.log_likelihood = log_likelihood(curve, fit.s0, fit.b);
        return fit;
    }

    // coarse grid
    double best = -std::numeric_limits<double>::infinity(), s0 = lo, b = span;
    for (int i = 0; i <= 200; ++i) {
        const double cs = lo - span + 3.0 * span * i / 200.0;
        for (int j = 0; j <= 60; ++j) {
            const double cb = b_min * std::pow(b_max / b_min, j / 60.0);
            const double ll = log_likelihood(curve, cs, cb);
            if (ll > best) {
                best = ll;
                s0 = cs;
                b = cb;
            }
        }
    }

    // damped Newton, gradient ascent where the Hessian is not negative definite
    Derivs D = derivs(curve, s0, b);
    int it = 0;
    for (; it < 200; ++it) {
        const double gn = std::hypot(D.g[0], D.g[1]);
        if (gn < 1e-8) {
            fit.converged = true;
            break;
        }
        const double a = D.H[0][0], c = D.H[0][1], e = D.H[1][1];
        const double det = a * e - c * c;
        double ds, db;
        if (a < 0 && det > 0) {
            ds = -(e * D.g[0] - c * D.g[1]) / det;
            db = -(-c * D.g[0] + a * D.g[1]) / det;
        } else {
            const double scale = span / (10.0 * gn);
            ds = D.g[0] * scale;
            db = D.g[1] * scale;
        }
        double t = 1.0;
        bool moved = false;
        for (int h = 0; h < 60; ++h, t *= 0.5) {
            const double ns = s0 + t * ds, nb = b + t * db;
            if (!(nb > 0.0))
                continue;
            const Derivs N = derivs(curve, ns, nb);
            if (N.ll >= D.ll - 1e-12 * std::abs(D.ll)) {
                s0 = ns;
                b = nb;
                D = N;
                moved = true;
                break;
            }
        }
        if (!moved)
            break;
    }
    fit.newton_iterations = it;
    fit.s0 = s0;
    fit.b = b;
    fit.log_likelihood = D.ll;
    const double det = D.H[0][0] * D.H[1][1] - D.H[0][1] * D.H[0][1];
    if (fit.converged && D.H[0][0] < 0 && det > 0) {
        fit.se_s0 = std::sqrt(-D.H[1][1] / det);
        fit.se_b = std::sqrt(-D.H[0][0] / det);
    }
    return fit;
}

CriticalSize critical_size(const LogisticFit& fit) { return {fit.s0, !fit.converged}; }

} // namespace girglab::experiments
