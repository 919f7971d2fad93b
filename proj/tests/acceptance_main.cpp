// End-to-end acceptance suite. Each numbered criterion prints exactly one
// PASS/FAIL line with the measured quantities; the process exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "gad/analytic.hpp"
#include "gad/dde.hpp"
#include "gad/field.hpp"
#include "gad/params.hpp"
#include "gad/poles.hpp"
#include "gad/scenario.hpp"
#include "gad/verification.hpp"

using namespace gad;
using C = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr C kI{0.0, 1.0};

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

SystemParams resonant(double alpha, double d) {
    return SystemParams{1.0, 1.0, alpha, alpha, 0.0, d};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ---------------------------------------------------------------------------

void criterion_1_dark_pole_coexistence() {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemParams p = resonant(100.0, kPi);
    const PoleSet set = find_poles(p, Window{-2.0, 1e-6, -106.0, -94.0}, 1024);
    const auto darks = set.dark_poles();

    bool pass = darks.size() == 2;
    double worst_res = 0.0, worst_pos = 0.0;
    if (pass) {
        worst_pos = std::max(std::abs(darks[0].s.imag() + 101.0),
                             std::abs(darks[1].s.imag() + 99.0));
        for (const Pole& d : darks) {
            worst_res = std::max(worst_res, d.residual);
            pass = pass && std::abs(d.s.real()) <= 1e-10;
        }
        pass = pass && worst_pos <= 1e-6 && worst_res <= 1e-12;
    }
    const double elapsed = seconds_since(t0);
    pass = pass && elapsed < 5.0;
    report(1, "dark-pole coexistence at d = pi", pass,
           fmt("dark poles=%1.0f, max residual=%.2e, runtime=%.2fs",
               static_cast<double>(darks.size()), worst_res, elapsed));
}

struct SingleDarkCase {
    double d_pi;
    PoleSet poles;
};

std::vector<SingleDarkCase> criterion_2_single_dark_mode() {
    std::vector<SingleDarkCase> cases;
    bool pass = true;
    std::string detail;
    double previous_decay = -1.0;
    for (const double d_pi : {0.05, 0.25, 0.31}) {
        const SystemParams p = resonant(101.0, d_pi * kPi);
        PoleSet set = find_poles(p, default_window(p), 1024);
        const auto darks = set.dark_poles();
        const double decay = set.slowest_quasi_bound_decay();
        pass = pass && darks.size() == 1 &&
               std::abs(darks[0].s.imag() + 100.0) <= 1e-6;
        pass = pass && decay > previous_decay && decay > 0.0;
        previous_decay = decay;
        detail += fmt("d=%.2fpi: gamma_eff=%.4f  ", d_pi, decay);
        cases.push_back({d_pi, std::move(set)});
    }
    report(2, "single dark mode with growing quasi-bound decay", pass, detail);
    return cases;
}

void criterion_3_steady_population(const std::vector<SingleDarkCase>& cases) {
    bool pass = true;
    std::string detail;
    for (const SingleDarkCase& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const SystemParams p = resonant(101.0, c.d_pi * kPi);
        const double settle = quasibound_settle_time(c.poles);
        const double t_max = settle + 40.0;
        const Trajectory traj = integrate(p, t_max);
        const double tail = tail_average_population(traj, settle);
        const double target = 1.0 / std::pow(p.gamma * p.tau() + 2.0, 2);
        const double err = std::abs(tail - target);
        const double elapsed = seconds_since(t0);
        pass = pass && err <= 1e-3 && elapsed < 30.0;
        detail += fmt("d=%.2fpi: |tail-target|=%.1e  ", c.d_pi, err);
    }
    report(3, "steady-state population 1/(gamma tau + 2)^2", pass, detail);
}

void criterion_4_oscillating_bound() {
    const SystemParams p = resonant(100.0, 3.0 * kPi);
    const PoleSet poles = find_poles(p, default_window(p), 1024);
    const double settle = quasibound_settle_time(poles);
    const double period_expected = kPi;  // |Ce|^2 beats at 2 Omega
    const Trajectory traj =
        integrate(p, settle + 25.0 * period_expected);

    const OscillationFit fit = fit_population_oscillation(
        traj, settle, settle + 11.0 * period_expected);
    const double amp_expected = std::pow(2.0 / (3.0 * kPi + 2.0), 2);
    const double amp_err = std::abs(fit.amplitude - amp_expected);
    const double period_err =
        std::abs(fit.period - period_expected) / period_expected;

    const OscillationFit decay_fit = fit_population_oscillation(
        traj, settle + 11.0 * period_expected,
        settle + 21.4 * period_expected);

    const bool pass = amp_err <= 1e-3 && period_err <= 1e-3 &&
                      std::abs(decay_fit.peak_decay) <= 1e-4 &&
                      decay_fit.peaks >= 10;
    report(4, "persistent beat amplitude, period, and zero decay", pass,
           fmt("|A-expected|=%.1e, period rel err=%.1e, decay(10T)=%.1e",
               amp_err, period_err, std::abs(decay_fit.peak_decay)));
}

void criterion_5_route_equivalence() {
    bool pass = true;
    double worst = 0.0;
    int variants = 0;
    for (const Scenario& sc : bundled_scenarios()) {
        for (std::size_t v = 0; v < sc.separations.size(); ++v) {
            const SystemParams p = sc.variant_params(v);
            const double tau = p.tau();
            if (tau <= 0.0) continue;
            const ResidueSeries series = make_residue_series(
                find_poles(p, default_window(p), 1024));
            IntegrationOptions o;
            o.dt = sc.solver.dt;
            const Trajectory traj = integrate(p, 50.0 * tau, o);
            const double dev =
                route_equivalence_max_dev(traj, series, 5.0 * tau, 50.0 * tau);
            const double bound =
                std::max(1e-2, 3.0 * series.truncation_diagnostic);
            pass = pass && dev <= bound;
            worst = std::max(worst, dev);
            ++variants;
        }
    }
    report(5, "route equivalence on every bundled scenario", pass,
           fmt("variants=%1.0f, worst max|dP|=%.2e",
               static_cast<double>(variants), worst));
}

void criterion_6_conservation() {
    bool pass = true;
    std::string detail;

    // single dark mode scenario through the emission transient
    {
        const SystemParams p = resonant(101.0, 5.0 * kPi / 100.0);
        const Trajectory traj = integrate(p, 20.0 * p.tau() + 1.0);
        double worst = 0.0;
        for (const double t :
             {5.0 * p.tau(), 10.0 * p.tau(), 20.0 * p.tau()}) {
            const double lo = -t - 0.5, hi = p.d + t + 0.5;
            const BalanceResult bal = excitation_balance(
                traj, p, t, lo, hi, suggest_quadrature_cells(p, hi - lo));
            worst = std::max(worst, std::abs(bal.balance));
        }
        pass = pass && worst <= 1e-3;
        detail += fmt("driven worst=%.1e  ", worst);

        // order of the quadrature under refinement
        const double t = 20.0 * p.tau();
        const double lo = -t - 0.5, hi = p.d + t + 0.5;
        const auto integral = [&](int n) {
            return excitation_balance(traj, p, t, lo, hi, n).field_integral;
        };
        const double i1 = integral(1024), i2 = integral(2048),
                     i4 = integral(4096);
        const double order = std::log2((i1 - i4) / (i2 - i4) - 1.0);
        pass = pass && order >= 1.7;
        detail += fmt("order=%.2f  ", order);
    }

    // point-atom limit with the exactly known emission profile
    {
        SystemParams p{0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
        const Trajectory traj = integrate(p, 2.0);
        const BalanceResult bal = excitation_balance(
            traj, p, 2.0, -2.5, 2.5, suggest_quadrature_cells(p, 5.0));
        pass = pass && std::abs(bal.balance) <= 1e-3;
        detail += fmt("point-atom=%.1e", std::abs(bal.balance));
    }

    report(6, "single-excitation conservation across the light cone", pass,
           detail);
}

void criterion_7_photon_trapping() {
    bool pass = true;
    std::string detail;

    const auto trapping_ratio = [](const SystemParams& p,
                                   const Trajectory& traj, double t_eval,
                                   double& midpoint) {
        const auto inside =
            density_profile(traj, p, uniform_grid(0.0, p.d, 1201), t_eval);
        double peak = 0.0;
        for (const double v : inside.p) peak = std::max(peak, v);
        double outside = 0.0;
        for (const double x : uniform_grid(-p.d, -1e-4 * p.d, 400))
            outside = std::max(outside,
                               std::norm(field_amplitude(traj, p, x, t_eval)));
        for (const double x :
             uniform_grid(p.d * (1.0 + 1e-4), 2.0 * p.d, 400))
            outside = std::max(outside,
                               std::norm(field_amplitude(traj, p, x, t_eval)));
        midpoint = std::norm(field_amplitude(traj, p, 0.5 * p.d, t_eval));
        return outside / peak;
    };

    {
        const SystemParams p = resonant(101.0, 5.0 * kPi / 100.0);
        const Trajectory traj = integrate(p, 700.0);
        double midpoint = 0.0;
        const double ratio = trapping_ratio(p, traj, 690.0, midpoint);
        const double w = 1.0 / (p.gamma * p.tau() + 2.0);
        const double mid_err = std::abs(midpoint - 2.0 * p.gamma * w * w);
        pass = pass && ratio <= 1e-3 && mid_err <= 1e-3;
        detail += fmt("static: out/in=%.1e, |mid-2g/(gt+2)^2|=%.1e  ", ratio,
                      mid_err);
    }
    {
        const SystemParams p = resonant(100.0, 3.0 * kPi);
        const Trajectory traj = integrate(p, 620.0);
        double midpoint = 0.0;
        const double ratio = trapping_ratio(p, traj, 600.0, midpoint);
        pass = pass && ratio <= 1e-3;
        detail += fmt("oscillating: out/in=%.1e", ratio);
    }

    report(7, "photon trapping between the coupling points", pass, detail);
}

void criterion_8_two_level_reduction() {
    bool pass = true;
    std::string detail;

    // one delay echo against the interval-by-interval closed form
    {
        const Scenario& sc = bundled_scenario("twolevel");
        const SystemParams p = sc.variant_params(0);
        IntegrationOptions o;
        o.dt = sc.solver.dt;
        const Trajectory traj = integrate(p, 2.0 * p.tau(), o);
        const C a = -kI * p.alpha_e - p.gamma;
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double t = traj.time(i);
            C exact = std::exp(a * t);
            if (t >= p.tau())
                exact -= p.gamma * std::exp(-kI * p.phi) * (t - p.tau()) *
                         std::exp(a * (t - p.tau()));
            worst = std::max(worst, std::abs(traj.ce_samples()[i] - exact));
        }
        pass = pass && worst <= 1e-8;
        detail += fmt("steps dev=%.1e  ", worst);
    }

    // point-atom limit: |Ce|^2 = e^{-4 gamma t}
    {
        SystemParams p{0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
        const Trajectory traj = integrate(p, 2.0);
        double worst = 0.0;
        for (std::size_t i = 1; i < traj.size(); ++i) {
            const double t = traj.time(i);
            const double expected = std::exp(-4.0 * t);
            worst = std::max(worst, std::abs(std::norm(traj.ce_samples()[i]) -
                                             expected) /
                                        expected);
        }
        pass = pass && worst <= 1e-6;
        detail += fmt("exp-decay rel dev=%.1e", worst);
    }

    report(8, "drive-off reduction to the two-level giant atom", pass, detail);
}

void criterion_9_residue_weights() {
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> rabi(0.5, 2.0);
    std::uniform_real_distribution<double> gam(0.2, 2.0);
    std::uniform_real_distribution<double> alpha_s(50.0, 150.0);
    std::uniform_real_distribution<double> delta_mag(0.5, 3.0);
    std::uniform_int_distribution<int> sign(0, 1);
    std::uniform_int_distribution<long long> parity(1, 40);

    bool pass = true;
    double worst = 0.0;
    int draws = 0;
    while (draws < 24) {
        SystemParams p;
        p.rabi_omega = rabi(rng);
        p.gamma = gam(rng);
        p.alpha_s = alpha_s(rng);
        p.alpha_e = p.alpha_s + (sign(rng) ? 1.0 : -1.0) * delta_mag(rng);
        p.phi = 0.0;

        const DerivedQuantities dq = derive(p);
        const bool plus_branch = sign(rng) == 1;
        const double omega_p = plus_branch ? dq.omega_p1 : dq.omega_p2;
        if (omega_p <= 0.0) continue;
        const long long pp = parity(rng);
        p.d = (2.0 * pp + 1.0) * kPi / omega_p;

        const auto darks = dark_frequencies(p);
        bool matched = false;
        for (const auto& df : darks) {
            if (std::abs(df.omega_p - omega_p) > 1e-6) continue;
            matched = true;
            const double gt = p.gamma * p.tau();
            const double closed =
                df.branch == Branch::Plus
                    ? gt + 1.0 / (dq.cos_theta * dq.cos_theta)
                    : gt + 1.0 / (dq.sin_theta * dq.sin_theta);
            const C numeric = f_prime(-kI * df.omega_p, p);
            const double err =
                std::abs(numeric - C{closed, 0.0}) / std::max(1.0, closed);
            worst = std::max(worst, err);
            pass = pass && err <= 1e-10;
        }
        pass = pass && matched;
        ++draws;
    }
    report(9, "closed-form residue weights at randomized detuned dark modes",
           pass, fmt("draws=%1.0f, worst rel dev=%.1e",
                     static_cast<double>(draws), worst));
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1_dark_pole_coexistence();
    const auto cases = criterion_2_single_dark_mode();
    criterion_3_steady_population(cases);
    criterion_4_oscillating_bound();
    criterion_5_route_equivalence();
    criterion_6_conservation();
    criterion_7_photon_trapping();
    criterion_8_two_level_reduction();
    criterion_9_residue_weights();
    std::printf("%d of 9 criteria passed in %.1fs\n", 9 - g_failures,
                seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
