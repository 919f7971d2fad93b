#include "gad/verification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gad {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

std::size_t node_floor(const Trajectory& traj, double t) {
    const double pos = t / traj.dt();
    if (pos <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(pos), traj.size() - 1);
}

}  // namespace

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.pass; });
}

double route_equivalence_max_dev(const Trajectory& traj,
                                 const ResidueSeries& series, double t_lo,
                                 double t_hi) {
    t_lo = std::max(t_lo, 0.0);
    t_hi = std::min(t_hi, traj.t_max());
    if (!(t_hi > t_lo))
        throw std::invalid_argument("route_equivalence: empty time window");

    const std::size_t i_lo = node_floor(traj, t_lo);
    const std::size_t i_hi = node_floor(traj, t_hi);
    const std::size_t span = i_hi - i_lo + 1;
    const std::size_t stride = std::max<std::size_t>(1, span / 4000);

    double max_dev = 0.0;
    for (std::size_t i = i_lo; i <= i_hi; i += stride) {
        const double t = traj.time(i);
        const double p_dde = std::norm(traj.ce_samples()[i]);
        const double p_res = std::norm(residue_ce(series, t));
        max_dev = std::max(max_dev, std::abs(p_dde - p_res));
    }
    return max_dev;
}

double tail_average_population(const Trajectory& traj, double t_from) {
    const std::size_t i_lo = node_floor(traj, t_from);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = i_lo; i < traj.size(); ++i) {
        sum += std::norm(traj.ce_samples()[i]);
        ++count;
    }
    if (count == 0)
        throw std::invalid_argument("tail_average: window past trajectory end");
    return sum / static_cast<double>(count);
}

double quasibound_settle_time(const PoleSet& poles, double decades) {
    const double slowest = poles.slowest_quasi_bound_decay();
    if (slowest <= 0.0) return 0.0;
    return decades / slowest;
}

OscillationFit fit_population_oscillation(const Trajectory& traj,
                                          double t_from, double t_to) {
    t_to = std::min(t_to, traj.t_max());
    const std::size_t i_lo = std::max<std::size_t>(node_floor(traj, t_from), 1);
    const std::size_t i_hi = node_floor(traj, t_to);

    std::vector<double> peak_t, peak_v;
    for (std::size_t i = i_lo; i + 1 <= i_hi && i + 1 < traj.size(); ++i) {
        const double y0 = std::norm(traj.ce_samples()[i - 1]);
        const double y1 = std::norm(traj.ce_samples()[i]);
        const double y2 = std::norm(traj.ce_samples()[i + 1]);
        if (!(y1 >= y0 && y1 > y2)) continue;
        // Parabolic refinement through the three samples.
        const double denom = y0 - 2.0 * y1 + y2;
        double dt_off = 0.0, value = y1;
        if (denom < 0.0) {
            dt_off = 0.5 * (y0 - y2) / denom;
            value = y1 - 0.25 * (y0 - y2) * dt_off;
        }
        peak_t.push_back(traj.time(i) + dt_off * traj.dt());
        peak_v.push_back(value);
    }

    OscillationFit fit;
    fit.peaks = static_cast<int>(peak_t.size());
    if (peak_t.size() >= 2) {
        fit.period = (peak_t.back() - peak_t.front()) /
                     static_cast<double>(peak_t.size() - 1);
        double sum = 0.0;
        for (const double v : peak_v) sum += v;
        fit.amplitude = sum / static_cast<double>(peak_v.size());
        fit.peak_decay = peak_v.front() - peak_v.back();
    } else if (peak_t.size() == 1) {
        fit.amplitude = peak_v.front();
    }
    return fit;
}

Complex two_level_method_of_steps(const SystemParams& params, double t) {
    if (params.rabi_omega != 0.0)
        throw std::invalid_argument("two_level_method_of_steps: requires Omega = 0");
    const double tau = params.tau();
    if (t < 0.0 || (tau > 0.0 && t > 2.0 * tau + 1e-12))
        throw std::invalid_argument("two_level_method_of_steps: t outside [0, 2 tau]");

    const Complex a = -kI * params.alpha_e - params.gamma;
    if (tau == 0.0)  // both legs act instantaneously
        return std::exp((a - params.gamma * std::exp(-kI * params.phi)) * t);
    Complex value = std::exp(a * t);
    if (t >= tau) {
        value -= params.gamma * std::exp(-kI * params.phi) * (t - tau) *
                 std::exp(a * (t - tau));
    }
    return value;
}

namespace {

void add_check(VerifyReport& report, const std::string& name, double measured,
               double threshold) {
    report.checks.push_back({name, measured, threshold, measured <= threshold});
}

void verify_variant(VerifyReport& report, const Scenario& scenario,
                    std::size_t variant) {
    const SystemParams params = scenario.variant_params(variant);
    const std::string prefix =
        scenario.variant_tags[variant].empty()
            ? std::string{}
            : scenario.variant_tags[variant] + ":";
    const double tau = params.tau();

    const Window window =
        scenario.solver.window.value_or(default_window(params));
    const PoleSet poles =
        find_poles(params, window, scenario.solver.grid_n.value_or(1024));
    const ResidueSeries series = make_residue_series(poles);

    const auto darks = dark_frequencies(params);
    const DerivedQuantities dq = derive(params);
    const double beat_period =
        dq.omega_eff > 0.0 ? 2.0 * kPi / dq.omega_eff : 0.0;

    const double settle = quasibound_settle_time(poles);
    double t_max = scenario.solver.t_max.value_or(scenario.default_t_max(variant));
    t_max = std::max(t_max, settle + 22.0 * beat_period);

    IntegrationOptions options;
    options.dt = scenario.solver.dt;
    options.co_rotating = scenario.solver.co_rotating;
    const Trajectory traj = integrate(params, t_max, options);

    if (tau > 0.0 && traj.t_max() > 5.0 * tau) {
        const double dev = route_equivalence_max_dev(
            traj, series, 5.0 * tau, std::min(50.0 * tau, traj.t_max()));
        add_check(report, prefix + "route_equivalence", dev,
                  std::max(1e-2, 3.0 * series.truncation_diagnostic));
    }

    {
        // Early/mid times keep the light cone (and the quadrature) small.
        const double t_cons =
            tau > 0.0 ? std::min(traj.t_max(), 20.0 * tau) : traj.t_max();
        double worst = 0.0;
        for (const double frac : {0.3, 0.6, 0.9}) {
            const double t = frac * t_cons;
            if (t <= 0.0) continue;
            const double lo = -t - 0.1 * (params.d + 1.0);
            const double hi = params.d + t + 0.1 * (params.d + 1.0);
            const int cells = scenario.solver.quad_cells.value_or(
                suggest_quadrature_cells(params, hi - lo));
            const BalanceResult bal =
                excitation_balance(traj, params, t, lo, hi, cells);
            worst = std::max(worst, std::abs(bal.balance));
        }
        add_check(report, prefix + "conservation", worst, 1e-3);
    }

    if (darks.size() == 1) {
        const double tail_from = std::max(settle, 0.8 * traj.t_max());
        const double err = std::abs(tail_average_population(traj, tail_from) -
                                    steady_population(params));
        add_check(report, prefix + "steady_state_error", err, 1e-3);
    }

    if (darks.size() == 2 && beat_period > 0.0) {
        const double fit_from = std::min(settle, traj.t_max() * 0.5);
        const OscillationFit fit = fit_population_oscillation(
            traj, fit_from, fit_from + 11.0 * beat_period);
        const double w1 = std::abs(dark_pole_predict(params)[0].weight);
        const double w2 = std::abs(dark_pole_predict(params)[1].weight);
        add_check(report, prefix + "oscillation_period",
                  std::abs(fit.period - beat_period) / beat_period, 1e-3);
        add_check(report, prefix + "oscillation_amplitude",
                  std::abs(fit.amplitude - (w1 + w2) * (w1 + w2)), 1e-3);
        add_check(report, prefix + "oscillation_decay", std::abs(fit.peak_decay),
                  1e-4);
    }

    if (!darks.empty() && tau > 0.0) {
        const double t_eval = traj.t_max();
        const auto grid = uniform_grid(-params.d, 2.0 * params.d, 3073);
        const FieldProfile profile = density_profile(traj, params, grid, t_eval);
        double inside = 0.0, outside = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid[i];
            if (x >= 0.0 && x <= params.d)
                inside = std::max(inside, profile.p[i]);
            else if (x < -1e-9 * params.d || x > params.d * (1.0 + 1e-9))
                outside = std::max(outside, profile.p[i]);
        }
        add_check(report, prefix + "photon_trapping",
                  inside > 0.0 ? outside / inside : 0.0, 1e-3);

        if (darks.size() == 1) {
            const double w = std::abs(dark_pole_predict(params)[0].weight);
            const double expected = 2.0 * params.gamma * w * w;
            const double mid =
                std::norm(field_amplitude(traj, params, 0.5 * params.d, t_eval));
            add_check(report, prefix + "midpoint_density",
                      std::abs(mid - expected), 1e-3);
        }
    }

    if (params.rabi_omega == 0.0) {
        if (tau > 0.0 && traj.t_max() >= 2.0 * tau) {
            double worst = 0.0;
            const std::size_t last = node_floor(traj, 2.0 * tau);
            for (std::size_t i = 0; i <= last; ++i) {
                const Complex exact =
                    two_level_method_of_steps(params, traj.time(i));
                worst = std::max(worst,
                                 std::abs(traj.ce_samples()[i] - exact));
            }
            add_check(report, prefix + "two_level_steps", worst, 1e-8);
        } else if (tau == 0.0) {
            double worst = 0.0;
            const double t_end = std::min(traj.t_max(), 2.0 / params.gamma);
            const std::size_t last = node_floor(traj, t_end);
            for (std::size_t i = 1; i <= last; ++i) {
                const double expected =
                    std::exp(-4.0 * params.gamma * traj.time(i));
                const double got = std::norm(traj.ce_samples()[i]);
                worst = std::max(worst, std::abs(got - expected) / expected);
            }
            add_check(report, prefix + "exp_decay_rel", worst, 1e-6);
        }
    }
}

}  // namespace

VerifyReport verify_scenario(const Scenario& scenario) {
    VerifyReport report;
    report.scenario = scenario.name;
    for (std::size_t v = 0; v < scenario.separations.size(); ++v)
        verify_variant(report, scenario, v);
    return report;
}

}  // namespace gad
