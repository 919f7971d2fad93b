#include "gad/field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gad/csv.hpp"

namespace gad {

namespace {

constexpr Complex kI{0.0, 1.0};

// One retarded term: Ce(t - r) with the per-leg propagation phase. The
// phase accumulates as phi per separation d; with d = 0 the factor is
// inert (phi = 0 whenever tau = 0).
Complex retarded_term(const Trajectory& traj, const SystemParams& params,
                      double distance, double t) {
    const double r = distance / kGroupVelocity;
    if (t - r < 0.0) return Complex{0.0, 0.0};
    const Complex ce = traj.at(t - r).ce;
    const double phase = params.d > 0.0 ? params.phi * distance / params.d : 0.0;
    return ce * std::exp(-kI * phase);
}

}  // namespace

Complex field_amplitude(const Trajectory& traj, const SystemParams& params,
                        double x, double t) {
    const double leg1 = std::abs(x - params.d);
    const double leg2 = std::abs(x);
    if (t - std::min(leg1, leg2) / kGroupVelocity > traj.t_max())
        throw std::out_of_range(
            "field_amplitude: retarded time beyond trajectory end");
    const Complex sum = retarded_term(traj, params, leg1, t) +
                        retarded_term(traj, params, leg2, t);
    return -kI * std::sqrt(0.5 * params.gamma) * sum;
}

FieldProfile density_profile(const Trajectory& traj, const SystemParams& params,
                             const std::vector<double>& x_grid, double t) {
    FieldProfile profile;
    profile.t = t;
    profile.x = x_grid;
    profile.phi.reserve(x_grid.size());
    profile.p.reserve(x_grid.size());
    for (const double x : x_grid) {
        const Complex amp = field_amplitude(traj, params, x, t);
        profile.phi.push_back(amp);
        profile.p.push_back(std::norm(amp));
    }
    return profile;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo))
        throw std::invalid_argument("uniform_grid: need hi > lo and n >= 2");
    std::vector<double> x(static_cast<std::size_t>(n));
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = lo + h * i;
    x.back() = hi;
    return x;
}

BalanceResult excitation_balance(const Trajectory& traj,
                                 const SystemParams& params, double t,
                                 double x_lo, double x_hi, int n_cells) {
    if (t < 0.0 || t > traj.t_max())
        throw std::invalid_argument("excitation_balance: t outside trajectory");
    if (!(x_hi > x_lo))
        throw std::invalid_argument("excitation_balance: empty extent");
    if (n_cells < 16)
        throw std::invalid_argument("excitation_balance: n_cells too small");

    BalanceResult result;
    const double v = kGroupVelocity;
    result.extent_truncated = (x_lo > -v * t) || (x_hi < params.d + v * t);

    // Breakpoints where p(x, t) or its slope jumps: the coupling points,
    // both light-cone fronts, and the first delay echo of each front.
    std::vector<double> cuts = {x_lo, x_hi, 0.0, params.d};
    const double tau = params.d / v;
    for (const double r : {v * t, v * (t - tau)}) {
        if (r < 0.0) continue;
        cuts.push_back(-r);
        cuts.push_back(r);
        cuts.push_back(params.d - r);
        cuts.push_back(params.d + r);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) {
                               return std::abs(a - b) < 1e-14;
                           }),
               cuts.end());

    const double total = x_hi - x_lo;
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = std::max(cuts[k], x_lo);
        const double b = std::min(cuts[k + 1], x_hi);
        if (!(b > a)) continue;
        const int m = std::max(
            1, static_cast<int>(std::ceil(n_cells * (b - a) / total)));
        const double h = (b - a) / m;
        // p jumps across segment boundaries (light-cone fronts); sample the
        // endpoints one-sidedly so each segment sees its own limit value.
        const double nudge = 1e-9 * (b - a);
        double seg = 0.0;
        double p_prev = std::norm(field_amplitude(traj, params, a + nudge, t));
        for (int j = 1; j <= m; ++j) {
            const double x = (j == m) ? b - nudge : a + h * j;
            const double p = std::norm(field_amplitude(traj, params, x, t));
            seg += 0.5 * h * (p_prev + p);
            p_prev = p;
        }
        integral += seg;
    }

    const Amplitudes amps = traj.at(t);
    result.field_integral = integral;
    result.atom_population = std::norm(amps.ce) + std::norm(amps.cs);
    result.balance = result.atom_population + integral - 1.0;
    return result;
}

int suggest_quadrature_cells(const SystemParams& params, double extent) {
    const double rate = std::max(std::abs(params.alpha_e),
                                 std::abs(params.alpha_s)) +
                        params.rabi_omega;
    // Density cross terms oscillate at spatial frequency up to 2 rate / v;
    // ~64 points per period keeps the trapezoid error on the oscillatory
    // part below ~1e-3 of its amplitude.
    const double wavelength =
        rate > 0.0 ? 3.14159265358979323846 * kGroupVelocity / rate : extent;
    const double cells = 64.0 * extent / wavelength;
    const double capped = std::min(cells, 4.0e6);
    return std::max(1 << 15, static_cast<int>(capped));
}

void write_field_csv(const FieldProfile& profile, std::ostream& os) {
    CsvWriter csv(os);
    csv.header("x,re_phi,im_phi,p");
    for (std::size_t i = 0; i < profile.x.size(); ++i) {
        csv.field(profile.x[i])
            .field(profile.phi[i].real())
            .field(profile.phi[i].imag())
            .field(profile.p[i]);
        csv.end_row();
    }
}

}  // namespace gad
