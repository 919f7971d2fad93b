#include "gad/dde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gad/csv.hpp"

namespace gad {

namespace {

constexpr Complex kI{0.0, 1.0};

struct RotatedSystem {
    Complex a_e;      // -i (alpha_e - lambda) - gamma
    Complex a_s;      // -i (alpha_s - lambda)
    Complex delay_g;  // gamma e^{-i (phi - lambda tau)}
    double rabi = 0.0;

    Complex rhs_e(Complex e, Complex s, Complex e_delayed, bool delay_on) const {
        Complex v = a_e * e - kI * rabi * s;
        if (delay_on) v -= delay_g * e_delayed;
        return v;
    }
    Complex rhs_s(Complex e, Complex s) const { return a_s * s - kI * rabi * e; }
};

Complex hermite(Complex y0, Complex m0, Complex y1, Complex m1, double h,
                double theta) {
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + theta) * h * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * m1;
}

// Hermite value at the interval midpoint.
Complex hermite_mid(Complex y0, Complex m0, Complex y1, Complex m1, double h) {
    return 0.5 * (y0 + y1) + 0.125 * h * (m0 - m1);
}

double pick_lambda(const SystemParams& params, CoRotating mode) {
    switch (mode) {
        case CoRotating::Off:
            return 0.0;
        case CoRotating::On:
            return 0.5 * (params.alpha_e + params.alpha_s);
        case CoRotating::Auto:
            break;
    }
    const double alpha_mag =
        std::max(std::abs(params.alpha_e), std::abs(params.alpha_s));
    const double slow = std::max(params.rabi_omega, params.gamma);
    if (slow > 0.0 && alpha_mag >= 50.0 * slow)
        return 0.5 * (params.alpha_e + params.alpha_s);
    return 0.0;
}

double pick_dt(const SystemParams& params, double lambda,
               const std::optional<double>& requested, std::size_t& delay_steps) {
    const double tau = params.tau();
    const double fast =
        std::max({params.rabi_omega, params.gamma,
                  std::abs(params.alpha_e - lambda),
                  std::abs(params.alpha_s - lambda)});

    if (requested) {
        const double dt = *requested;
        if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
        if (tau > 0.0) {
            const double ratio = tau / dt;
            const auto n = static_cast<long long>(std::llround(ratio));
            if (n < 1 || std::abs(ratio - static_cast<double>(n)) >
                             1e-9 * std::max(1.0, ratio))
                throw std::invalid_argument(
                    "integrate: dt must divide tau evenly");
            delay_steps = static_cast<std::size_t>(n);
            return tau / static_cast<double>(n);  // snap exactly
        }
        delay_steps = 0;
        return dt;
    }

    if (tau > 0.0) {
        // At least 64 steps per delay, and enough to resolve the fastest
        // rotated-frame rate at ~0.01 of its period.
        double n_real = 64.0;
        if (fast > 0.0) n_real = std::max(n_real, std::ceil(tau * fast / 0.01));
        const auto n = static_cast<std::size_t>(n_real);
        delay_steps = n;
        return tau / static_cast<double>(n);
    }
    delay_steps = 0;
    return fast > 0.0 ? 0.001 / fast : 0.001;
}

}  // namespace

Complex Trajectory::de_arrival_slope(std::size_t node) const {
    if (has_arrival_fix_ && node == delay_steps_) return de_arrival_at_delay_;
    return de_slope_[node];
}

Complex Trajectory::rotated_ce(double t) const {
    const double pos = t / dt_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= size_ - 1) i = size_ - 2;
    const double theta = pos - static_cast<double>(i);
    return hermite(de_[i], de_slope_[i], de_[i + 1], de_arrival_slope(i + 1),
                   dt_, theta);
}

Complex Trajectory::rotated_cs(double t) const {
    const double pos = t / dt_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= size_ - 1) i = size_ - 2;
    const double theta = pos - static_cast<double>(i);
    return hermite(ds_[i], ds_slope_[i], ds_[i + 1], ds_slope_[i + 1], dt_,
                   theta);
}

Amplitudes Trajectory::at(double t) const {
    if (t < 0.0) return {Complex{0.0, 0.0}, Complex{0.0, 0.0}};
    const double end = t_max();
    if (t > end) {
        if (t - end < 1e-12 * std::max(1.0, end)) {
            t = end;
        } else {
            throw std::out_of_range("amplitude_at: t beyond trajectory end");
        }
    }
    // Bit-exact at grid points.
    const auto i = static_cast<std::size_t>(std::llround(t / dt_));
    if (i < size_ && static_cast<double>(i) * dt_ == t) return {ce_[i], cs_[i]};

    const Complex rot = std::exp(-kI * (lambda_ * t));
    return {rotated_ce(t) * rot, rotated_cs(t) * rot};
}

Trajectory integrate(const SystemParams& params, double t_max,
                     const IntegrationOptions& options) {
    params.validate();
    if (!(t_max > 0.0)) throw std::invalid_argument("integrate: t_max must be > 0");

    Trajectory traj;
    traj.tau_ = params.tau();
    traj.lambda_ = pick_lambda(params, options.co_rotating);
    traj.dt_ = pick_dt(params, traj.lambda_, options.dt, traj.delay_steps_);

    const double dt = traj.dt_;
    const auto n_steps = static_cast<std::size_t>(
        std::ceil(t_max / dt - 1e-12));
    const std::size_t n_nodes = std::max<std::size_t>(n_steps, 1) + 1;
    traj.size_ = n_nodes;

    RotatedSystem sys;
    sys.a_e = -kI * (params.alpha_e - traj.lambda_) - params.gamma;
    sys.a_s = -kI * (params.alpha_s - traj.lambda_);
    sys.delay_g =
        params.gamma * std::exp(-kI * (params.phi - traj.lambda_ * traj.tau_));
    sys.rabi = params.rabi_omega;

    const std::size_t N = traj.delay_steps_;
    const bool instant = (traj.tau_ == 0.0);

    auto& de = traj.de_;
    auto& ds = traj.ds_;
    auto& me = traj.de_slope_;
    auto& ms = traj.ds_slope_;
    de.resize(n_nodes);
    ds.resize(n_nodes);
    me.resize(n_nodes);
    ms.resize(n_nodes);
    de[0] = Complex{1.0, 0.0};
    ds[0] = Complex{0.0, 0.0};

    if (instant) {
        // tau = 0 collapses the delayed term onto the local amplitude; the
        // system is a plain linear ODE.
        const auto rhs_e = [&](Complex e, Complex s) {
            return (sys.a_e - sys.delay_g) * e - kI * sys.rabi * s;
        };
        for (std::size_t n = 0; n + 1 < n_nodes; ++n) {
            const Complex e0 = de[n], s0 = ds[n];
            const Complex k1e = rhs_e(e0, s0), k1s = sys.rhs_s(e0, s0);
            const Complex e2 = e0 + 0.5 * dt * k1e, s2 = s0 + 0.5 * dt * k1s;
            const Complex k2e = rhs_e(e2, s2), k2s = sys.rhs_s(e2, s2);
            const Complex e3 = e0 + 0.5 * dt * k2e, s3 = s0 + 0.5 * dt * k2s;
            const Complex k3e = rhs_e(e3, s3), k3s = sys.rhs_s(e3, s3);
            const Complex e4 = e0 + dt * k3e, s4 = s0 + dt * k3s;
            const Complex k4e = rhs_e(e4, s4), k4s = sys.rhs_s(e4, s4);
            me[n] = k1e;
            ms[n] = k1s;
            de[n + 1] = e0 + dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
            ds[n + 1] = s0 + dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        }
        me[n_nodes - 1] = rhs_e(de[n_nodes - 1], ds[n_nodes - 1]);
        ms[n_nodes - 1] = sys.rhs_s(de[n_nodes - 1], ds[n_nodes - 1]);
    } else {
        // Method of steps: within delay interval m the delayed term is off
        // for m = 0 and reads already-computed history for m >= 1.
        for (std::size_t n = 0; n + 1 < n_nodes; ++n) {
            const std::size_t piece = n / N;
            const bool delay_on = piece >= 1;

            Complex z_start{0.0, 0.0}, z_mid{0.0, 0.0}, z_end{0.0, 0.0};
            if (delay_on) {
                const std::size_t i = n - N;
                z_start = de[i];
                z_end = de[i + 1];
                z_mid = hermite_mid(de[i], me[i], de[i + 1],
                                    traj.de_arrival_slope(i + 1), dt);
            }

            const Complex e0 = de[n], s0 = ds[n];
            const Complex k1e = sys.rhs_e(e0, s0, z_start, delay_on);
            const Complex k1s = sys.rhs_s(e0, s0);
            const Complex e2 = e0 + 0.5 * dt * k1e, s2 = s0 + 0.5 * dt * k1s;
            const Complex k2e = sys.rhs_e(e2, s2, z_mid, delay_on);
            const Complex k2s = sys.rhs_s(e2, s2);
            const Complex e3 = e0 + 0.5 * dt * k2e, s3 = s0 + 0.5 * dt * k2s;
            const Complex k3e = sys.rhs_e(e3, s3, z_mid, delay_on);
            const Complex k3s = sys.rhs_s(e3, s3);
            const Complex e4 = e0 + dt * k3e, s4 = s0 + dt * k3s;
            const Complex k4e = sys.rhs_e(e4, s4, z_end, delay_on);
            const Complex k4s = sys.rhs_s(e4, s4);

            me[n] = k1e;
            ms[n] = k1s;
            de[n + 1] = e0 + dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
            ds[n + 1] = s0 + dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);

            if (n + 1 == N) {
                // Left limit at t = tau: the delayed term is not yet active.
                traj.de_arrival_at_delay_ = sys.rhs_e(de[N], ds[N], {}, false);
                traj.has_arrival_fix_ = true;
                // Departure slope at t = tau (next k1) includes it.
            }
        }
        // Departure slope at the final node, for completeness of the record.
        {
            const std::size_t last = n_nodes - 1;
            const bool delay_on = last >= N;
            Complex z{0.0, 0.0};
            if (delay_on) z = de[last - N];
            me[last] = sys.rhs_e(de[last], ds[last], z, delay_on);
            ms[last] = sys.rhs_s(de[last], ds[last]);
        }
    }

    // Materialize original-frame samples once; dense output reuses the same
    // rotation factor expression, so grid queries are bit-identical.
    traj.ce_.resize(n_nodes);
    traj.cs_.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const Complex rot = std::exp(-kI * (traj.lambda_ * traj.time(i)));
        traj.ce_[i] = de[i] * rot;
        traj.cs_[i] = ds[i] * rot;
    }
    return traj;
}

Trajectory integrate(const SystemParams& params, double t_max, double dt) {
    IntegrationOptions options;
    options.dt = dt;
    return integrate(params, t_max, options);
}

double metastable_check(const Trajectory& traj, const SystemParams& params) {
    const std::size_t n = traj.size();
    const double dt = traj.dt();
    const auto& ce = traj.ce_samples();
    const auto& cs = traj.cs_samples();

    // Cumulative trapezoid of g(t') = Ce(t') e^{i alpha_s t'}; then
    // Cs(t) = -i Omega e^{-i alpha_s t} G(t).
    double max_dev = 0.0;
    Complex acc{0.0, 0.0};
    Complex g_prev = ce[0];  // e^{i alpha_s 0} = 1
    for (std::size_t i = 1; i < n; ++i) {
        const double t = traj.time(i);
        const Complex g = ce[i] * std::exp(kI * (params.alpha_s * t));
        acc += 0.5 * dt * (g_prev + g);
        g_prev = g;
        const Complex quad =
            -kI * params.rabi_omega * std::exp(-kI * (params.alpha_s * t)) * acc;
        max_dev = std::max(max_dev, std::abs(quad - cs[i]));
    }
    return max_dev;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    CsvWriter csv(os);
    csv.header("t,re_ce,im_ce,re_cs,im_cs,pe,ps");
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Complex ce = traj.ce_samples()[i];
        const Complex cs = traj.cs_samples()[i];
        csv.field(traj.time(i))
            .field(ce.real())
            .field(ce.imag())
            .field(cs.real())
            .field(cs.imag())
            .field(std::norm(ce))
            .field(std::norm(cs));
        csv.end_row();
    }
}

}  // namespace gad
