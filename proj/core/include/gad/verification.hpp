#pragma once

// Cross-route consistency checks: delay integration vs residue series vs
// closed forms, excitation conservation, photon trapping, and the
// drive-off reductions. `verify_scenario` bundles the applicable checks
// for one scenario into a pass/fail report.

#include <string>
#include <vector>

#include "gad/analytic.hpp"
#include "gad/dde.hpp"
#include "gad/field.hpp"
#include "gad/poles.hpp"
#include "gad/scenario.hpp"

namespace gad {

struct Check {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::string scenario;
    std::vector<Check> checks;
    bool all_pass() const;
};

// max over sampled t in [t_lo, t_hi] of ||Ce|^2_dde - |Ce|^2_series|.
double route_equivalence_max_dev(const Trajectory& traj,
                                 const ResidueSeries& series, double t_lo,
                                 double t_hi);

// Mean of |Ce|^2 over trajectory nodes with t >= t_from.
double tail_average_population(const Trajectory& traj, double t_from);

// Time for the slowest quasi-bound pole to decay by e^{-decades};
// 0 when the set has no quasi-bound poles.
double quasibound_settle_time(const PoleSet& poles, double decades = 10.0);

struct OscillationFit {
    double amplitude = 0.0;   // mean peak of |Ce|^2
    double period = 0.0;      // mean peak spacing
    double peak_decay = 0.0;  // first peak minus last peak
    int peaks = 0;
};

// Locates successive maxima of |Ce(t)|^2 on [t_from, t_to] with parabolic
// refinement between grid samples.
OscillationFit fit_population_oscillation(const Trajectory& traj,
                                          double t_from, double t_to);

// Exact drive-off amplitude on [0, 2 tau] built interval-by-interval:
// e^{at} for t < tau, then e^{at} - gamma e^{-i phi} (t - tau) e^{a(t-tau)},
// with a = -i alpha_e - gamma.
Complex two_level_method_of_steps(const SystemParams& params, double t);

VerifyReport verify_scenario(const Scenario& scenario);

}  // namespace gad
