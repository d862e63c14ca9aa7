#pragma once

namespace girglab::geometry {

// Cross-section of the radius-R ball in R^d at offset t from the centre:
// the (d-1)-volume V_{d-1} (R^2 - t^2)^{(d-1)/2}, zero for |t| > R.
double slice_volume(double t, double R, int d);
// int_{-R}^{u} slice_volume(t) dt
double slice_cdf(double u, double R, int d);
// int_{-R}^{u} t * slice_volume(t) dt
double slice_first_moment(double u, double R, int d);

// Same as above with the dimension constants cached (hot loops).
class BallSlices {
public:
    explicit BallSlices(int d);
    int dim() const { return d_; }
    double volume(double t, double R) const;
    double cdf(double u, double R) const;
    double first_moment(double u, double R) const;
    // full ball volume through the same formula as cdf(R, R)
    double total(double R) const { return cdf(R, R); }

private:
    double rpow(double R, double e) const;
    int d_;
    double v_; // V_{d-1}
};

// Length of the circle of radius rho2 (centred at the origin) inside the disc of radius R
// centred at distance rho from the origin.
double circle_arc(double rho, double rho2, double R);
// Area of the disc of radius s (origin) intersected with the disc of radius R at distance rho.
double lens_area(double rho, double s, double R);

} // namespace girglab::geometry
