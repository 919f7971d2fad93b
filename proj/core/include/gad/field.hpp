#pragma once

// Waveguide photon amplitude reconstructed from the retarded atomic history,
//
//   phi(x,t) = -i sqrt(gamma/2) [ Ce(t - |x-d|/v) e^{-i phi |x-d|/d} Theta(.)
//                               + Ce(t - |x|/v)   e^{-i phi |x|/d}   Theta(.) ],
//
// its density p = |phi|^2, and the single-excitation balance check
// |Ce|^2 + |Cs|^2 + integral of p over the light cone = 1.

#include <complex>
#include <iosfwd>
#include <vector>

#include "gad/dde.hpp"
#include "gad/params.hpp"

namespace gad {

struct FieldProfile {
    std::vector<double> x;
    std::vector<Complex> phi;
    std::vector<double> p;  // |phi|^2 pointwise
    double t = 0.0;
};

// Retarded evaluation at one point. Terms with negative retarded time
// vanish; a retarded time past the trajectory end throws std::out_of_range.
Complex field_amplitude(const Trajectory& traj, const SystemParams& params,
                        double x, double t);

FieldProfile density_profile(const Trajectory& traj, const SystemParams& params,
                             const std::vector<double>& x_grid, double t);

std::vector<double> uniform_grid(double lo, double hi, int n);

struct BalanceResult {
    double balance = 0.0;          // |Ce|^2 + |Cs|^2 + int p dx - 1
    double field_integral = 0.0;
    double atom_population = 0.0;
    bool extent_truncated = false;  // light cone wider than [x_lo, x_hi]
};

// Composite trapezoid with the domain split at the field's known kinks
// (coupling points, light-cone fronts, and the first delay echo), so the
// quadrature converges at second order.
BalanceResult excitation_balance(const Trajectory& traj,
                                 const SystemParams& params, double t,
                                 double x_lo, double x_hi,
                                 int n_cells = 1 << 15);

// Cell count that resolves the fastest spatial density oscillation
// (wavelength pi / (|alpha| + Omega)) with ~16 points per period over the
// given extent; never below 32768.
int suggest_quadrature_cells(const SystemParams& params, double extent);

// CSV schema: x, re_phi, im_phi, p
void write_field_csv(const FieldProfile& profile, std::ostream& os);

}  // namespace gad
