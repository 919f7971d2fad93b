#include "gad/params.hpp"

#include <cmath>
#include <stdexcept>

namespace gad {

namespace {

bool all_finite(const SystemParams& p) {
    return std::isfinite(p.rabi_omega) && std::isfinite(p.gamma) &&
           std::isfinite(p.alpha_e) && std::isfinite(p.alpha_s) &&
           std::isfinite(p.phi) && std::isfinite(p.d);
}

}  // namespace

void SystemParams::validate() const {
    if (!all_finite(*this))
        throw std::invalid_argument("SystemParams: all fields must be finite");
    if (rabi_omega < 0.0)
        throw std::invalid_argument("SystemParams: rabi_omega must be >= 0");
    if (gamma < 0.0)
        throw std::invalid_argument("SystemParams: gamma must be >= 0");
    if (d < 0.0)
        throw std::invalid_argument("SystemParams: d must be >= 0");
}

DerivedQuantities derive(const SystemParams& params) {
    params.validate();

    DerivedQuantities out;
    out.tau = params.tau();
    out.delta = params.delta();
    out.omega_eff = std::sqrt(out.delta * out.delta +
                              4.0 * params.rabi_omega * params.rabi_omega);
    out.omega_plus = 0.5 * (out.delta + out.omega_eff);
    out.omega_minus = 0.5 * (out.delta - out.omega_eff);

    const double mean = 0.5 * (params.alpha_e + params.alpha_s);
    out.omega_p1 = mean + 0.5 * out.omega_eff;
    out.omega_p2 = mean - 0.5 * out.omega_eff;

    if (out.omega_eff > 0.0) {
        out.sin_theta = std::sqrt((out.omega_eff - out.delta) / (2.0 * out.omega_eff));
        out.cos_theta = std::sqrt((out.omega_eff + out.delta) / (2.0 * out.omega_eff));
    } else {
        // No drive and no detuning: the doublet is degenerate and the mixing
        // angle is immaterial; pick the symmetric value so identities hold.
        out.sin_theta = out.cos_theta = std::sqrt(0.5);
    }

    if (params.rabi_omega > 0.0 &&
        std::abs(out.delta) <= 1e-12 * params.rabi_omega) {
        out.q = params.alpha_e / params.rabi_omega;
    }
    return out;
}

std::vector<DarkFrequency> dark_frequencies(const SystemParams& params) {
    const DerivedQuantities dq = derive(params);
    std::vector<DarkFrequency> out;
    if (!(dq.tau > 0.0)) return out;

    constexpr double kPi = 3.14159265358979323846;
    constexpr double kParityTol = 1e-9;  // rad, absolute

    const auto try_branch = [&](double omega_p, Branch branch) {
        const double x = omega_p * dq.tau - params.phi;
        // nearest odd multiple of pi: x ~ (2p+1) pi
        const double p_real = 0.5 * (x / kPi - 1.0);
        const long long p = static_cast<long long>(std::llround(p_real));
        const double residual = x - (2.0 * static_cast<double>(p) + 1.0) * kPi;
        if (std::abs(residual) <= kParityTol)
            out.push_back({omega_p, branch, p});
    };

    try_branch(dq.omega_p1, Branch::Plus);
    try_branch(dq.omega_p2, Branch::Minus);
    return out;
}

std::vector<CoexistencePoint> coexistence_distances(const SystemParams& params,
                                                    long long n_max) {
    const DerivedQuantities dq = derive(params);
    constexpr double kPi = 3.14159265358979323846;

    if (n_max < 0)
        throw std::invalid_argument("coexistence_distances: n_max must be >= 0");
    if (params.phi != 0.0)
        throw std::invalid_argument("coexistence_distances: requires phi = 0");
    if (!dq.q)
        throw std::invalid_argument(
            "no coexistence: requires resonance (delta = 0) and a nonzero drive");

    const double q_real = *dq.q;
    const long long q = static_cast<long long>(std::llround(q_real));
    if (std::abs(q_real - static_cast<double>(q)) > 1e-9 || q <= 0 || q % 2 != 0)
        throw std::invalid_argument(
            "no coexistence: q = alpha/Omega must be an even positive integer");

    std::vector<CoexistencePoint> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (long long n = 0; n <= n_max; ++n) {
        CoexistencePoint pt;
        pt.n = n;
        pt.d = (2.0 * static_cast<double>(n) + 1.0) * kPi / params.rabi_omega;
        pt.p1 = q / 2 + (q + 1) * n;
        pt.p2 = q / 2 - 1 + (q - 1) * n;
        out.push_back(pt);
    }
    return out;
}

}  // namespace gad
