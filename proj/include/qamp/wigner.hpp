#pragma once
// Wigner function on phase-space grids via displaced parity:
//   W(x,p) = (1/pi) sum_n (-1)^n <n| D^+(beta) rho D(beta) |n>,
//   beta = (x + i p)/sqrt(2),
// so the vacuum gives W(0,0) = 1/pi. Axes are in vacuum-variance-1/2 units.
// The evaluation enlarges the Fock space internally so the displaced state
// fits at the farthest grid point.

#include "qamp/fock.hpp"

#include <vector>

namespace qamp {

struct WignerGrid {
    std::vector<double> x_axis, p_axis;
    std::vector<double> values; // values[ix * p_axis.size() + ip]

    double at(std::size_t ix, std::size_t ip) const
    {
        return values[ix * p_axis.size() + ip];
    }
    // Riemann sum of W dx dp (trapezoid in both axes)
    double integral() const;
    double min_value() const;
    double max_abs() const;
};

// max_internal_cutoff < 0: grow as needed; otherwise error out when the
// displaced support would leak past the cap (tail above 1e-6).
WignerGrid wigner(const FockVector& psi, const std::vector<double>& x_axis,
                  const std::vector<double>& p_axis, int max_internal_cutoff = -1,
                  int threads = 1);
WignerGrid wigner(const DensityOperator& rho, const std::vector<double>& x_axis,
                  const std::vector<double>& p_axis, int max_internal_cutoff = -1,
                  int threads = 1);

double wigner_value(const DensityOperator& rho, double x, double p);

struct SqueezingEllipse {
    double major = 0.5, minor = 0.5;
    double angle = 0.0;              // of the minor axis w.r.t. x_theta, radians
    bool orientation_defined = true; // false for isotropic covariance
};

// principal variances of the (x_theta, p_theta) covariance ellipse
SqueezingEllipse squeezing_ellipse(const DensityOperator& rho, double theta);

std::vector<double> linear_axis(double lo, double hi, std::size_t points);

} // namespace qamp
