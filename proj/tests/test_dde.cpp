#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "gad/dde.hpp"

using namespace gad;
using C = std::complex<double>;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr C kI{0.0, 1.0};

SystemParams fig3b() { return {1.0, 1.0, 101.0, 101.0, 0.0, 0.05 * kPi}; }
}  // namespace

TEST_CASE("integrate: tau = 0 with drive off decays at 2 gamma per leg pair") {
    SystemParams p{0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    const Trajectory traj = integrate(p, 1.0);
    const double pe = std::norm(traj.at(0.5).ce);
    CHECK(pe == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
    CHECK(std::norm(traj.at(1.0).ce) ==
          doctest::Approx(std::exp(-4.0)).epsilon(1e-9));
}

TEST_CASE("integrate: single dark mode settles at the trapped population") {
    const SystemParams p = fig3b();
    const Trajectory traj = integrate(p, 700.0);
    const double target = 1.0 / std::pow(p.gamma * p.tau() + 2.0, 2);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.time(i) < 600.0) continue;
        sum += std::norm(traj.ce_samples()[i]);
        ++count;
    }
    CHECK(sum / count == doctest::Approx(target).epsilon(1e-3));
}

TEST_CASE("integrate: coexisting dark modes leave a pure Rabi beat") {
    SystemParams p{1.0, 1.0, 100.0, 100.0, 0.0, 3.0 * kPi};
    const Trajectory traj = integrate(p, 400.0);
    const double amp = std::pow(2.0 / (3.0 * kPi + 2.0), 2);
    // after the quasi-bound transients decay, |Ce|^2 = amp cos^2(Omega t + c)
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        if (t < 350.0) continue;
        const double expected =
            amp * std::pow(std::cos(1.0 * t), 2);
        worst = std::max(worst,
                         std::abs(std::norm(traj.ce_samples()[i]) - expected));
    }
    CHECK(worst <= 2e-3);
}

TEST_CASE("amplitude_at: initial condition, causality, grid exactness") {
    const Trajectory traj = integrate(fig3b(), 5.0);
    const Amplitudes a0 = amplitude_at(traj, 0.0);
    CHECK(a0.ce == C{1.0, 0.0});
    CHECK(a0.cs == C{0.0, 0.0});

    const Amplitudes neg = amplitude_at(traj, -1.0);
    CHECK(neg.ce == C{0.0, 0.0});
    CHECK(neg.cs == C{0.0, 0.0});

    const std::size_t i = traj.size() / 2;
    const Amplitudes grid = amplitude_at(traj, traj.time(i));
    CHECK(grid.ce == traj.ce_samples()[i]);  // bit-exact
    CHECK(grid.cs == traj.cs_samples()[i]);

    CHECK_THROWS_AS(amplitude_at(traj, traj.t_max() + 1.0), std::out_of_range);
}

TEST_CASE("amplitude_at: dense output is consistent with a finer grid") {
    const SystemParams p = fig3b();
    IntegrationOptions coarse;
    coarse.dt = p.tau() / 64.0;
    IntegrationOptions fine;
    fine.dt = p.tau() / 256.0;
    const Trajectory a = integrate(p, 2.0, coarse);
    const Trajectory b = integrate(p, 2.0, fine);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double t = 2.0 * k / 499.0;
        worst = std::max(worst, std::abs(a.at(t).ce - b.at(t).ce));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("metastable_check: no drive means no metastable amplitude") {
    SystemParams p{0.0, 1.0, 3.0, 3.0, 0.0, 1.0};
    const Trajectory traj = integrate(p, 10.0);
    CHECK(metastable_check(traj, p) == 0.0);
    for (const C cs : traj.cs_samples()) CHECK(cs == C{0.0, 0.0});
}

TEST_CASE("metastable_check: quadrature agrees at the default step") {
    const SystemParams p = fig3b();
    IntegrationOptions o;
    o.dt = p.tau() / 64.0;
    const Trajectory traj = integrate(p, 50.0, o);
    CHECK(metastable_check(traj, p) <= 1e-6);
}

TEST_CASE("metastable_check: coarse step degrades but stays small") {
    const SystemParams p = fig3b();
    IntegrationOptions o;
    o.dt = p.tau() / 8.0;
    const Trajectory coarse = integrate(p, 50.0, o);
    o.dt = p.tau() / 64.0;
    const Trajectory fine = integrate(p, 50.0, o);
    const double dev_coarse = metastable_check(coarse, p);
    CHECK(dev_coarse <= 1e-3);
    CHECK(dev_coarse > metastable_check(fine, p));
}

TEST_CASE("order of accuracy: halving dt gains at least a factor 8") {
    SystemParams p{1.0, 1.0, 101.0, 101.0, 0.0, 0.25 * kPi};
    const auto run = [&](int div) {
        IntegrationOptions o;
        o.dt = p.tau() / div;
        return integrate(p, 2.0 * p.tau(), o);
    };
    const Trajectory ref = run(512);
    const auto err = [&](const Trajectory& t) {
        double worst = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double tt = t.time(i);
            if (tt <= p.tau() || tt > 2.0 * p.tau()) continue;
            worst = std::max(worst, std::abs(t.ce_samples()[i] - ref.at(tt).ce));
        }
        return worst;
    };
    const double e32 = err(run(32));
    const double e64 = err(run(64));
    CHECK(e32 / e64 >= 8.0);
}

TEST_CASE("two-level reduction matches the stepwise closed form") {
    // Independent oracle, built directly from the pieces of the delay
    // equation: on [0, tau) the delayed term is off and Ce = e^{at} with
    // a = -i alpha - gamma; on [tau, 2 tau] one echo has arrived and
    // Ce(t) = e^{at} - gamma e^{-i phi} (t - tau) e^{a (t - tau)}.
    SystemParams p{0.0, 0.7, 0.3, 0.3, 0.4, 1.3};
    const C a = -kI * p.alpha_e - p.gamma;
    const auto oracle = [&](double t) -> C {
        C v = std::exp(a * t);
        if (t >= p.tau())
            v -= p.gamma * std::exp(-kI * p.phi) * (t - p.tau()) *
                 std::exp(a * (t - p.tau()));
        return v;
    };
    IntegrationOptions o;
    o.dt = p.tau() / 128.0;
    const Trajectory traj = integrate(p, 2.0 * p.tau(), o);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        worst = std::max(worst,
                         std::abs(traj.ce_samples()[i] - oracle(traj.time(i))));
    CHECK(worst <= 1e-10);
}

TEST_CASE("phase covariance: common level shift rotates the solution") {
    // Ce(alpha_e, alpha_s, phi) * e^{i lam t} solves the system with levels
    // shifted down by lam and the delay phase advanced by lam tau.
    SystemParams p{1.0, 0.8, 3.0, 2.0, 0.3, 1.5};
    const double lam = 0.9;
    SystemParams shifted = p;
    shifted.alpha_e -= lam;
    shifted.alpha_s -= lam;
    shifted.phi -= lam * p.tau();

    IntegrationOptions o;
    o.dt = p.tau() / 64.0;
    o.co_rotating = CoRotating::Off;
    const Trajectory base = integrate(p, 12.0, o);
    const Trajectory rot = integrate(shifted, 12.0, o);
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double t = base.time(i);
        const C mapped = base.ce_samples()[i] * std::exp(kI * (lam * t));
        worst = std::max(worst, std::abs(mapped - rot.ce_samples()[i]));
    }
    CHECK(worst <= 1e-9);

    // At tau = 0 the modulus itself is shift-invariant.
    SystemParams p0{1.0, 0.8, 3.0, 2.0, 0.0, 0.0};
    SystemParams p0s = p0;
    p0s.alpha_e += lam;
    p0s.alpha_s += lam;
    const Trajectory t0 = integrate(p0, 5.0, IntegrationOptions{0.001, CoRotating::Off});
    const Trajectory t1 = integrate(p0s, 5.0, IntegrationOptions{0.001, CoRotating::Off});
    for (std::size_t i = 0; i < t0.size(); i += 100)
        CHECK(std::abs(t0.ce_samples()[i]) ==
              doctest::Approx(std::abs(t1.ce_samples()[i])).epsilon(1e-9));
}

TEST_CASE("boundedness: no gain for random parameter draws") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 2.0);
    for (int i = 0; i < 8; ++i) {
        SystemParams p{uni(rng), uni(rng), 50.0 + 10.0 * uni(rng),
                       50.0 + 10.0 * uni(rng), uni(rng), 0.5 + uni(rng)};
        const Trajectory traj = integrate(p, 12.0);
        double atom_max = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k)
            atom_max = std::max(atom_max, std::abs(traj.ce_samples()[k]));
        CHECK(atom_max <= 1.0 + 1e-9);
    }
}

TEST_CASE("co-rotating frame changes nothing observable") {
    const SystemParams p = fig3b();
    IntegrationOptions on, off;
    on.co_rotating = CoRotating::On;
    off.co_rotating = CoRotating::Off;
    on.dt = off.dt = p.tau() / 64.0;
    const Trajectory a = integrate(p, 3.0, on);
    const Trajectory b = integrate(p, 3.0, off);
    CHECK(a.frame_shift() == doctest::Approx(101.0));
    CHECK(b.frame_shift() == 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a.ce_samples()[i] - b.ce_samples()[i]));
    CHECK(worst <= 1e-7);
}

TEST_CASE("integrate: input validation") {
    const SystemParams p = fig3b();
    CHECK_THROWS_AS(integrate(p, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(p, 1.0, -0.1), std::invalid_argument);
    // dt must divide tau evenly
    CHECK_THROWS_AS(integrate(p, 1.0, p.tau() / 64.1), std::invalid_argument);
    CHECK_THROWS_AS(integrate(p, 1.0, 3.0 * p.tau()), std::invalid_argument);
    CHECK_NOTHROW(integrate(p, 1.0, p.tau() / 64.0));
}

TEST_CASE("trajectory grid covers [0, t_max] without gaps") {
    const SystemParams p = fig3b();
    const Trajectory traj = integrate(p, 1.0);
    CHECK(traj.time(0) == 0.0);
    CHECK(traj.t_max() >= 1.0);
    for (std::size_t i = 1; i < traj.size(); ++i)
        CHECK(traj.time(i) - traj.time(i - 1) ==
              doctest::Approx(traj.dt()).epsilon(1e-12));
}

TEST_CASE("trajectory CSV export schema") {
    SystemParams p{0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    const Trajectory traj = integrate(p, 0.01);
    std::ostringstream os;
    write_trajectory_csv(traj, os);
    const std::string text = os.str();
    CHECK(text.rfind("t,re_ce,im_ce,re_cs,im_cs,pe,ps\n", 0) == 0);
    CHECK(text.find("\n0,1,0,0,0,1,0\n") != std::string::npos);
}
