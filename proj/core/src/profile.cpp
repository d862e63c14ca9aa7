#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "girglab/meanfield.hpp"

namespace girglab::meanfield {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok)
        throw std::invalid_argument("MeanFieldParams: " + what);
}

} // namespace

void MeanFieldParams::validate(GeometryKind kind) const {
    require(d >= 1, "d must be >= 1");
    require(kind != GeometryKind::Radial || d == 2, "radial geometry is implemented for d = 2 only");
    require(tau > 2.0 && std::isfinite(tau), "tau must be > 2");
    require(k > 0.0 && std::isfinite(k), "k must be > 0");
    require(w_cap >= 1.0 && std::isfinite(w_cap), "w_cap must be finite and >= 1");
    require(quad_tol > 0.0 && quad_tol <= 1e-3, "quad_tol must be in (0, 1e-3]");
    require(!w_grid.empty(), "empty weight grid");
    require(std::abs(w_grid.front() - 1.0) <= 1e-12, "weight grid must start at 1");
    require(std::abs(w_grid.back() - w_cap) <= 1e-12 * w_cap, "weight grid must end at w_cap");
    for (std::size_t i = 1; i < w_grid.size(); ++i)
        require(w_grid[i] > w_grid[i - 1], "weight grid must be strictly increasing");
    require(x_grid.size() >= 2, "spatial grid needs at least 2 nodes");
    for (std::size_t j = 1; j < x_grid.size(); ++j)
        require(x_grid[j] > x_grid[j - 1], "spatial grid must be strictly increasing");
    const double h = spacing();
    const double span = x_grid.back() - x_grid.front();
    for (std::size_t j = 1; j < x_grid.size(); ++j)
        require(std::abs(x_grid[j] - x_grid[j - 1] - h) <= 1e-9 * std::max(h, span),
                "spatial grid must be uniform");
    if (kind == GeometryKind::HalfSpace) {
        const std::size_t n = x_grid.size();
        for (std::size_t j = 0; j < n; ++j)
            require(std::abs(x_grid[j] + x_grid[n - 1 - j]) <= 1e-12 * span,
                    "z grid must be symmetric about 0");
    } else {
        require(x_grid.front() >= 0.0, "rho grid must be non-negative");
    }
}

double MeanFieldParams::spacing() const {
    return (x_grid.back() - x_grid.front()) / static_cast<double>(x_grid.size() - 1);
}

bool MeanFieldParams::same_grid(const MeanFieldParams& o) const {
    return d == o.d && tau == o.tau && k == o.k && w_cap == o.w_cap && w_grid == o.w_grid &&
           x_grid == o.x_grid && truncated_lambda == o.truncated_lambda;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (n == 0 || !(lo > 0.0) || hi < lo)
        throw std::invalid_argument("log_grid: need n >= 1 and 0 < lo <= hi");
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> symmetric_grid(double Z, std::size_t n) {
    if (n < 2 || !(Z > 0.0))
        throw std::invalid_argument("symmetric_grid: need n >= 2 and Z > 0");
    std::vector<double> z(n);
    const double h = 2.0 * Z / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n / 2; ++j) {
        z[j] = -Z + h * static_cast<double>(j);
        z[n - 1 - j] = -z[j];
    }
    if (n % 2 == 1)
        z[n / 2] = 0.0;
    return z;
}

std::vector<double> anchored_grid(double lo, double hi, double h, double anchor) {
    if (!(h > 0.0) || hi <= lo || anchor < lo || anchor > hi)
        throw std::invalid_argument("anchored_grid: need h > 0 and lo <= anchor <= hi");
    const auto m_lo = -static_cast<long long>(std::floor((anchor - lo) / h + 1e-9));
    const auto m_hi = static_cast<long long>(std::floor((hi - anchor) / h + 1e-9));
    std::vector<double> g;
    for (long long m = m_lo; m <= m_hi; ++m)
        g.push_back(anchor + static_cast<double>(m) * h);
    if (g.size() < 2)
        throw std::invalid_argument("anchored_grid: fewer than 2 nodes");
    return g;
}

MeanFieldParams halfspace_params(int d, double tau, double k, double w_cap, std::size_t n_w,
                                 std::size_t n_z, double z_extent) {
    MeanFieldParams p;
    p.d = d;
    p.tau = tau;
    p.k = k;
    p.w_cap = w_cap;
    p.w_grid = log_grid(1.0, w_cap, w_cap > 1.0 ? n_w : 1);
    const double Z = z_extent > 0.0 ? z_extent : 8.0 * std::pow(k * w_cap, 1.0 / d);
    p.x_grid = symmetric_grid(Z, n_z);
    p.validate(GeometryKind::HalfSpace);
    return p;
}

MeanFieldParams radial_params(double tau, double k, double w_cap, double r, double h, double A,
                              std::size_t n_w) {
    MeanFieldParams p;
    p.d = 2;
    p.tau = tau;
    p.k = k;
    p.w_cap = w_cap;
    p.w_grid = log_grid(1.0, w_cap, w_cap > 1.0 ? n_w : 1);
    p.x_grid = anchored_grid(std::max(0.0, r - A), r + A, h, r);
    p.validate(GeometryKind::Radial);
    return p;
}

Profile::Profile(MeanFieldParams params, Geometry geometry, std::vector<double> values)
    : params_(std::move(params)), geometry_(geometry), values_(std::move(values)) {
    params_.validate(geometry_.kind);
    if (values_.size() != params_.w_grid.size() * params_.x_grid.size())
        throw std::invalid_argument("Profile: value count does not match the grid");
    for (double v : values_)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("Profile: values must lie in [0, 1]");
    log_w_.resize(params_.w_grid.size());
    for (std::size_t i = 0; i < log_w_.size(); ++i)
        log_w_[i] = std::log(params_.w_grid[i]);
}

Profile Profile::constant(const MeanFieldParams& params, Geometry geometry, double value) {
    return Profile(params, geometry,
                   std::vector<double>(params.w_grid.size() * params.x_grid.size(), value));
}

Profile Profile::halfspace_indicator(const MeanFieldParams& params) {
    std::vector<double> v;
    v.reserve(params.w_grid.size() * params.x_grid.size());
    for (std::size_t i = 0; i < params.w_grid.size(); ++i)
        for (double z : params.x_grid)
            v.push_back(z > 0.0 ? 1.0 : z < 0.0 ? 0.0 : 0.5);
    return Profile(params, Geometry::halfspace(), std::move(v));
}

Profile Profile::ball_indicator(const MeanFieldParams& params, double r) {
    std::vector<double> v;
    v.reserve(params.w_grid.size() * params.x_grid.size());
    for (std::size_t i = 0; i < params.w_grid.size(); ++i)
        for (double rho : params.x_grid)
            v.push_back(rho < r ? 1.0 : rho > r ? 0.0 : 0.5);
    return Profile(params, Geometry::radial(r), std::move(v));
}

double Profile::along_row(std::size_t i, double x) const {
    const auto& g = params_.x_grid;
    const std::size_t n = g.size();
    const double* v = values_.data() + i * n;
    if (x <= g.front())
        return v[0];
    if (x >= g.back())
        return v[n - 1];
    const double h = params_.spacing();
    auto j = static_cast<std::size_t>(std::min<double>(std::floor((x - g.front()) / h), n - 2.0));
    while (j > 0 && x < g[j])
        --j;
    while (j + 2 < n && x > g[j + 1])
        ++j;
    const double t = (x - g[j]) / (g[j + 1] - g[j]);
    return v[j] + t * (v[j + 1] - v[j]);
}

double Profile::operator()(double w, double x) const {
    const double lw = std::log(w);
    const std::size_t m = log_w_.size();
    if (m == 1 || lw <= log_w_.front())
        return along_row(0, x);
    if (lw >= log_w_.back())
        return along_row(m - 1, x);
    const auto it = std::upper_bound(log_w_.begin(), log_w_.end(), lw);
    const auto i = static_cast<std::size_t>(it - log_w_.begin()) - 1;
    const double t = (lw - log_w_[i]) / (log_w_[i + 1] - log_w_[i]);
    const double a = along_row(i, x), b = along_row(i + 1, x);
    return a + t * (b - a);
}

double Profile::symmetry_violation() const {
    const std::size_t n = n_x();
    double worst = 0.0;
    for (std::size_t i = 0; i < n_w(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(at(i, j) + at(i, n - 1 - j) - 1.0));
    return worst;
}

} // namespace girglab::meanfield
