#pragma once

// Physical parameters of a driven three-level emitter coupled to a 1D
// waveguide at two points, plus the quantities derived from them
// (dressed frequencies, mixing angle, dark-mode bookkeeping).
//
// Unit conventions: hbar = 1, group velocity v = 1, so the coupling-point
// separation d and the propagation delay tau coincide numerically. All
// frequencies are plain doubles in whatever unit the caller fixes (the
// bundled scenarios use the drive strength as the unit).

#include <optional>
#include <vector>

namespace gad {

inline constexpr double kGroupVelocity = 1.0;

struct SystemParams {
    double rabi_omega = 1.0;  // classical drive strength (e <-> s)
    double gamma = 1.0;       // relaxation rate per coupling point
    double alpha_e = 0.0;     // shifted excited-state frequency
    double alpha_s = 0.0;     // shifted metastable-state frequency
    double phi = 0.0;         // propagation phase between the legs
    double d = 0.0;           // coupling-point separation (v = 1 units)

    double tau() const { return d / kGroupVelocity; }
    double delta() const { return alpha_e - alpha_s; }

    // Throws std::invalid_argument on rabi_omega < 0, gamma < 0, d < 0
    // or any non-finite field.
    void validate() const;
};

enum class Branch { Plus, Minus };

// Dressed-state quantities of the driven e/s doublet.
struct DerivedQuantities {
    double tau = 0.0;
    double delta = 0.0;        // alpha_e - alpha_s
    double omega_eff = 0.0;    // sqrt(delta^2 + 4 Omega^2)
    double omega_plus = 0.0;   // (delta + omega_eff) / 2
    double omega_minus = 0.0;  // (delta - omega_eff) / 2
    double omega_p1 = 0.0;     // (alpha_e + alpha_s + omega_eff) / 2
    double omega_p2 = 0.0;     // (alpha_e + alpha_s - omega_eff) / 2
    double sin_theta = 0.0;    // sqrt((omega_eff - delta) / (2 omega_eff))
    double cos_theta = 0.0;    // sqrt((omega_eff + delta) / (2 omega_eff))

    // alpha_e / rabi_omega; defined only on resonance (|delta| <= 1e-12 Omega)
    // with a nonzero drive.
    std::optional<double> q;
};

DerivedQuantities derive(const SystemParams& params);

// One dressed frequency that satisfies the non-decaying-mode condition
// Omega_p * tau - phi = (2p + 1) pi.
struct DarkFrequency {
    double omega_p = 0.0;
    Branch branch = Branch::Plus;
    long long p = 0;
};

// Dressed frequencies whose round-trip phase is an odd multiple of pi
// (within 1e-9 rad absolute). Empty when neither branch matches.
std::vector<DarkFrequency> dark_frequencies(const SystemParams& params);

// A separation at which both dressed frequencies support a dark mode
// simultaneously, with the matching phase integers.
struct CoexistencePoint {
    long long n = 0;
    double d = 0.0;     // (2n + 1) pi / rabi_omega
    long long p1 = 0;   // q/2 + (q+1) n
    long long p2 = 0;   // q/2 - 1 + (q-1) n
};

// Separations d_n = (2n+1) pi / Omega for n = 0..n_max. Requires resonance
// (delta = 0), phi = 0 and q = alpha/Omega an even positive integer; throws
// std::invalid_argument ("no coexistence") otherwise.
std::vector<CoexistencePoint> coexistence_distances(const SystemParams& params,
                                                    long long n_max);

}  // namespace gad
