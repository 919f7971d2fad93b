#pragma once

// Poles of the Laplace-domain amplitude response
//
//   f(s) = s + i alpha_e + gamma + gamma e^{-i phi} e^{-s tau}
//            + Omega^2 / (s + i alpha_s) = 0.
//
// Roots with Re s = 0 are non-decaying (dark) modes; roots with Re s < 0
// are quasi-bound modes whose decay rate is -Re s. The residue weight of
// each pole in the time-domain series is 1 / f'(s).

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gad/params.hpp"

namespace gad {

using Complex = std::complex<double>;

enum class PoleKind { Dark, QuasiBound };

struct Pole {
    Complex s;               // Re = -decay rate, Im = -mode frequency
    double residual = 0.0;   // |f(s)| after refinement
    PoleKind kind = PoleKind::QuasiBound;
    Complex weight;          // 1 / f'(s)
};

struct Window {
    double re_min = 0.0, re_max = 0.0;
    double im_min = 0.0, im_max = 0.0;

    double re_width() const { return re_max - re_min; }
    double im_width() const { return im_max - im_min; }
    bool contains(Complex s, double margin_frac = 0.0) const {
        const double mr = margin_frac * re_width();
        const double mi = margin_frac * im_width();
        return s.real() >= re_min - mr && s.real() <= re_max + mr &&
               s.imag() >= im_min - mi && s.imag() <= im_max + mi;
    }
};

struct PoleSearchDiagnostics {
    int seeds = 0;                   // grid local minima fed to Newton
    int converged = 0;
    int dropped_nonconverged = 0;
    int dropped_outside = 0;         // converged beyond the window (truncation)
    int dropped_singular = 0;        // seeds inside the singularity guard
    int dropped_unstable = 0;        // converged with Re s above the dark band
};

struct PoleSet {
    std::vector<Pole> poles;         // sorted by Im(s), deduplicated
    Window window;
    int grid_n = 0;
    double tol = 0.0;
    PoleSearchDiagnostics diag;

    std::size_t dark_count() const;
    std::vector<Pole> dark_poles() const;
    std::vector<Pole> quasi_bound_poles() const;
    // Smallest decay rate among quasi-bound poles; 0 if there are none.
    double slowest_quasi_bound_decay() const;
};

// Transfer denominator and its s-derivative. Both throw std::domain_error
// exactly at the simple pole s = -i alpha_s (when the drive is on).
Complex f_eval(Complex s, const SystemParams& params);
Complex f_prime(Complex s, const SystemParams& params);

// Search window that captures the dressed doublet plus several
// delay-lattice quasi-bound poles around it.
Window default_window(const SystemParams& params);

// Grid-scan |f| for local minima, refine each seed by Newton iteration,
// deduplicate and classify. tol <= 0 selects 1e-12 * max(gamma, Omega).
PoleSet find_poles(const SystemParams& params, const Window& window,
                   int grid_n = 1024, double tol = -1.0);

// Dark poles constructed analytically from the matched dressed frequencies,
// with closed-form residue weights 1/(gamma tau + 1/cos^2 theta) on the
// plus branch and 1/(gamma tau + 1/sin^2 theta) on the minus branch.
std::vector<Pole> dark_pole_predict(const SystemParams& params);

// Number of zeros of f strictly inside the window, via the winding number
// of f along the rectangle boundary (argument principle, corrected for the
// simple pole of f at -i alpha_s). Sampling is refined adaptively.
long long count_zeros(const SystemParams& params, const Window& window,
                      int min_samples_per_edge = 256);

// CSV schema: re_s, im_s, residual, kind, re_weight, im_weight
void write_poles_csv(const PoleSet& set, std::ostream& os);

}  // namespace gad
