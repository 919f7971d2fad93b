#pragma once

// Time-domain amplitudes reconstructed from the pole set,
//
//   Ce(t) = sum_p e^{s_p t} / f'(s_p),
//   Cs(t) = sum_p [-i Omega / (s_p + i alpha_s)] e^{s_p t} / f'(s_p),
//
// plus the closed-form bound-state solutions used to cross-check both the
// series and the delay integration.

#include <complex>
#include <vector>

#include "gad/params.hpp"
#include "gad/poles.hpp"

namespace gad {

struct ResidueSeries {
    PoleSet poles;
    // |sum of weights - 1|: the exact series sums to Ce(0) = 1, so this
    // measures how much the window truncation leaves out.
    double truncation_diagnostic = 0.0;

    bool truncation_warning() const { return truncation_diagnostic > 0.05; }
};

ResidueSeries make_residue_series(PoleSet poles);

// Truncated sums over an explicit pole list (deterministic order).
Complex residue_sum_ce(const std::vector<Pole>& poles, double t);
Complex residue_sum_cs(const std::vector<Pole>& poles,
                       const SystemParams& params, double t);

Complex residue_ce(const ResidueSeries& series, double t);
Complex residue_cs(const ResidueSeries& series, const SystemParams& params,
                   double t);

struct BoundAmplitudes {
    Complex ce;
    Complex cs;
};

// Closed-form amplitudes when exactly one dressed frequency is dark:
//   Ce^b(t) = w e^{-i Omega_p t},
//   Cs^b(t) = Omega w (e^{-i Omega_p t} - e^{-i alpha_s t}) / (Omega_p - alpha_s),
// with w the branch residue weight. |Ce^b| is constant in t.
// Throws std::invalid_argument unless exactly one dark frequency exists.
BoundAmplitudes static_bound(const SystemParams& params, double t);

// Closed-form excited amplitude when both dressed frequencies are dark:
//   Ce^b(t) = w1 e^{-i Omega_p1 t} + w2 e^{-i Omega_p2 t},
// which on resonance reduces to (2/(gamma tau + 2)) e^{-i alpha t} cos(Omega t).
// Throws std::invalid_argument unless both dark frequencies exist.
Complex oscillating_bound(const SystemParams& params, double t);

// Long-time excited-state population in the single-dark-mode regime:
// |w|^2 of the matched dark mode, which on resonance is 1/(gamma tau + 2)^2.
// When no unique dark mode matches, returns the resonant-form value
// 1/(gamma tau + 2)^2 (the formula's tau -> 0 limit is 1/4).
double steady_population(const SystemParams& params);

}  // namespace gad
