#include "girglab/numerics.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace girglab {

double phi(double x) {
    if (x >= 0.0)
        return 0.5 * (1.0 + std::erf(x));
    return 0.5 * std::erfc(-x);
}

double unit_ball_volume(int d) {
    if (d < 0)
        throw std::invalid_argument("unit_ball_volume: d must be >= 0");
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex m;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(m);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1)
                p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        r.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(r)).first->second;
}

} // namespace girglab
