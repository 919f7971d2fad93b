#pragma once

// Time-domain integration of the coupled excited/metastable amplitudes
//
//   dCe/dt = (-i alpha_e - gamma) Ce(t)
//            - gamma e^{-i phi} Ce(t - tau) Theta(t - tau) - i Omega Cs(t)
//   dCs/dt = -i alpha_s Cs(t) - i Omega Ce(t)
//
// with Ce(0) = 1, Cs(0) = 0 and Ce(t) = 0 for t < 0. Theta(0) = 1.
//
// The stepper is classical RK4 advanced interval-by-interval of length tau
// (method of steps); dt is snapped so that tau is an integer number of
// steps and the delayed samples at full-step stage times are grid values.
// Midpoint stages read the history through the same cubic Hermite
// interpolant that serves dense output.
//
// Internally the system may be integrated in a frame co-rotating at
// lambda = (alpha_e + alpha_s)/2, which maps the parameters to
// alpha -> alpha - lambda, phi -> phi - lambda tau exactly and removes the
// fast optical phase from the stepped variables. Samples and dense output
// are always reported back in the original frame.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gad/params.hpp"

namespace gad {

using Complex = std::complex<double>;

struct Amplitudes {
    Complex ce;
    Complex cs;
};

enum class CoRotating { Auto, On, Off };

struct IntegrationOptions {
    std::optional<double> dt;  // must divide tau evenly (within 1e-9 relative)
    CoRotating co_rotating = CoRotating::Auto;
};

class Trajectory {
public:
    double dt() const { return dt_; }
    double tau() const { return tau_; }
    double t_max() const { return static_cast<double>(size_ - 1) * dt_; }
    std::size_t size() const { return size_; }
    double time(std::size_t i) const { return static_cast<double>(i) * dt_; }
    double frame_shift() const { return lambda_; }
    static constexpr int interpolation_order() { return 3; }

    const std::vector<Complex>& ce_samples() const { return ce_; }
    const std::vector<Complex>& cs_samples() const { return cs_; }

    // Dense output: (0, 0) for t < 0, stored samples bit-exactly at grid
    // points, cubic Hermite in between. Throws std::out_of_range past the
    // end of the trajectory.
    Amplitudes at(double t) const;

private:
    friend Trajectory integrate(const SystemParams&, double,
                                const IntegrationOptions&);

    double dt_ = 0.0;
    double tau_ = 0.0;
    double lambda_ = 0.0;
    std::size_t size_ = 0;
    std::size_t delay_steps_ = 0;  // tau / dt (0 when tau == 0)

    // Rotated-frame samples and departure slopes per node.
    std::vector<Complex> de_, ds_;
    std::vector<Complex> de_slope_, ds_slope_;
    // Left-limit slope of De at the node t = tau, where the delayed term
    // switches on and the first derivative jumps.
    Complex de_arrival_at_delay_{0.0, 0.0};
    bool has_arrival_fix_ = false;

    // Original-frame samples.
    std::vector<Complex> ce_, cs_;

    Complex de_arrival_slope(std::size_t node) const;
    Complex rotated_ce(double t) const;
    Complex rotated_cs(double t) const;
};

Trajectory integrate(const SystemParams& params, double t_max,
                     const IntegrationOptions& options = {});
// Spec-shaped overload with an explicit step.
Trajectory integrate(const SystemParams& params, double t_max, double dt);

inline Amplitudes amplitude_at(const Trajectory& traj, double t) {
    return traj.at(t);
}

// Self-consistency diagnostic: recompute Cs from the stored Ce history by
// composite-trapezoid quadrature of
//   Cs(t) = -i Omega \int_0^t Ce(t') e^{i alpha_s (t' - t)} dt'
// and return the max |difference| against the integrated Cs.
double metastable_check(const Trajectory& traj, const SystemParams& params);

// CSV schema: t, re_ce, im_ce, re_cs, im_cs, pe, ps
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace gad
