#include "girglab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "girglab/numerics.hpp"

namespace girglab::geometry {

namespace {

// I_n(x) = int_{-1}^{x} (1 - s^2)^{n/2} ds
double power_integral(int n, double x) {
    x = std::clamp(x, -1.0, 1.0);
    const double q = std::max(0.0, 1.0 - x * x);
    const double sq = std::sqrt(q);
    double even = x + 1.0;                                        // I_0
    double odd = 0.5 * (x * sq + std::asin(x) + 0.5 * std::numbers::pi); // I_1
    if (n == 0)
        return even;
    if (n == 1)
        return odd;
    // (1 - x^2)^{m/2} built incrementally
    double pe = 1.0; // q^{0}
    double po = sq;  // q^{1/2}
    for (int m = 2; m <= n; ++m) {
        if (m % 2 == 0) {
            pe *= q;
            even = (x * pe + m * even) / (m + 1);
        } else {
            po *= q;
            odd = (x * po + m * odd) / (m + 1);
        }
    }
    return n % 2 == 0 ? even : odd;
}

} // namespace

BallSlices::BallSlices(int d) : d_(d), v_(unit_ball_volume(d - 1)) {
    if (d < 1)
        throw std::invalid_argument("BallSlices: d must be >= 1");
}

double BallSlices::rpow(double x, double e) const {
    if (e == 0.5)
        return std::sqrt(x);
    if (e == 1.0)
        return x;
    if (e == 1.5)
        return x * std::sqrt(x);
    return std::pow(x, e);
}

double BallSlices::volume(double t, double R) const {
    if (std::abs(t) > R)
        return 0.0;
    return v_ * rpow(std::max(0.0, R * R - t * t), 0.5 * (d_ - 1));
}

double BallSlices::cdf(double u, double R) const {
    if (u <= -R)
        return 0.0;
    const double x = std::min(u / R, 1.0);
    const double Rd = d_ == 1 ? R : d_ == 2 ? R * R : std::pow(R, d_);
    return Rd * v_ * power_integral(d_ - 1, x);
}

double BallSlices::first_moment(double u, double R) const {
    if (u <= -R || u >= R)
        return 0.0;
    return -v_ / (d_ + 1) * rpow(R * R - u * u, 0.5 * (d_ + 1));
}

double slice_volume(double t, double R, int d) { return BallSlices(d).volume(t, R); }
double slice_cdf(double u, double R, int d) { return BallSlices(d).cdf(u, R); }
double slice_first_moment(double u, double R, int d) { return BallSlices(d).first_moment(u, R); }

double circle_arc(double rho, double rho2, double R) {
    if (rho2 <= 0.0)
        return 0.0;
    if (rho + rho2 <= R)
        return 2.0 * std::numbers::pi * rho2;
    if (rho2 >= rho + R || rho2 <= rho - R)
        return 0.0;
    const double c = (rho * rho + rho2 * rho2 - R * R) / (2.0 * rho * rho2);
    return 2.0 * rho2 * std::acos(std::clamp(c, -1.0, 1.0));
}

double lens_area(double rho, double s, double R) {
    if (s <= 0.0 || R <= 0.0)
        return 0.0;
    if (rho >= s + R)
        return 0.0;
    if (rho <= std::abs(s - R)) {
        const double m = std::min(s, R);
        return std::numbers::pi * m * m;
    }
    const double a1 = std::acos(std::clamp((rho * rho + s * s - R * R) / (2.0 * rho * s), -1.0, 1.0));
    const double a2 = std::acos(std::clamp((rho * rho + R * R - s * s) / (2.0 * rho * R), -1.0, 1.0));
    const double k = (-rho + s + R) * (rho + s - R) * (rho - s + R) * (rho + s + R);
    return s * s * a1 + R * R * a2 - 0.5 * std::sqrt(std::max(0.0, k));
}

} // namespace girglab::geometry
