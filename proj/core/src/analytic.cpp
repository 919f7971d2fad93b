#include "gad/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace gad {

namespace {

constexpr Complex kI{0.0, 1.0};

double dark_weight(const SystemParams& params, const DerivedQuantities& dq,
                   Branch branch) {
    const double gt = params.gamma * dq.tau;
    return branch == Branch::Plus
               ? 1.0 / (gt + 1.0 / (dq.cos_theta * dq.cos_theta))
               : 1.0 / (gt + 1.0 / (dq.sin_theta * dq.sin_theta));
}

}  // namespace

ResidueSeries make_residue_series(PoleSet poles) {
    ResidueSeries series;
    series.poles = std::move(poles);
    Complex sum{0.0, 0.0};
    for (const Pole& p : series.poles.poles) sum += p.weight;
    series.truncation_diagnostic = std::abs(sum - Complex{1.0, 0.0});
    return series;
}

Complex residue_sum_ce(const std::vector<Pole>& poles, double t) {
    if (t < 0.0)
        throw std::invalid_argument("residue_ce: t must be >= 0");
    Complex sum{0.0, 0.0};
    for (const Pole& p : poles) sum += p.weight * std::exp(p.s * t);
    return sum;
}

Complex residue_sum_cs(const std::vector<Pole>& poles,
                       const SystemParams& params, double t) {
    if (t < 0.0)
        throw std::invalid_argument("residue_cs: t must be >= 0");
    Complex sum{0.0, 0.0};
    for (const Pole& p : poles) {
        const Complex coupling =
            -kI * params.rabi_omega / (p.s + kI * params.alpha_s);
        sum += coupling * p.weight * std::exp(p.s * t);
    }
    return sum;
}

Complex residue_ce(const ResidueSeries& series, double t) {
    return residue_sum_ce(series.poles.poles, t);
}

Complex residue_cs(const ResidueSeries& series, const SystemParams& params,
                   double t) {
    return residue_sum_cs(series.poles.poles, params, t);
}

BoundAmplitudes static_bound(const SystemParams& params, double t) {
    const auto darks = dark_frequencies(params);
    if (darks.size() != 1)
        throw std::invalid_argument(
            "static_bound: requires exactly one dark frequency");

    const DerivedQuantities dq = derive(params);
    const DarkFrequency& df = darks.front();
    const double w = dark_weight(params, dq, df.branch);

    BoundAmplitudes out;
    out.ce = w * std::exp(-kI * (df.omega_p * t));
    // Omega_p - alpha_s = +-(omega_eff -+ delta)/2, never zero with a drive.
    const double offset = df.omega_p - params.alpha_s;
    out.cs = params.rabi_omega * w *
             (std::exp(-kI * (df.omega_p * t)) -
              std::exp(-kI * (params.alpha_s * t))) /
             offset;
    return out;
}

Complex oscillating_bound(const SystemParams& params, double t) {
    const auto darks = dark_frequencies(params);
    if (darks.size() != 2)
        throw std::invalid_argument(
            "oscillating_bound: requires both dark frequencies");

    const DerivedQuantities dq = derive(params);
    Complex sum{0.0, 0.0};
    for (const DarkFrequency& df : darks) {
        const double w = dark_weight(params, dq, df.branch);
        sum += w * std::exp(-kI * (df.omega_p * t));
    }
    return sum;
}

double steady_population(const SystemParams& params) {
    const auto darks = dark_frequencies(params);
    if (darks.size() == 1) {
        const double w =
            dark_weight(params, derive(params), darks.front().branch);
        return w * w;
    }
    const double gt = params.gamma * params.tau();
    return 1.0 / ((gt + 2.0) * (gt + 2.0));
}

}  // namespace gad
