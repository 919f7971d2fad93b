#include "gad/poles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gad/csv.hpp"

namespace gad {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI{0.0, 1.0};

double rate_scale(const SystemParams& p) {
    return std::max(p.gamma, p.rabi_omega);
}

// Classification band and dedup radius, both relative to the rate scale.
double dark_tolerance(const SystemParams& p) { return 1e-10 * rate_scale(p); }
double dedup_radius(const SystemParams& p) { return 1e-8 * rate_scale(p); }

}  // namespace

Complex f_eval(Complex s, const SystemParams& params) {
    const double tau = params.tau();
    Complex value = s + kI * params.alpha_e + params.gamma +
                    params.gamma * std::exp(-kI * params.phi) * std::exp(-s * tau);
    if (params.rabi_omega != 0.0) {
        const Complex den = s + kI * params.alpha_s;
        if (den == Complex{0.0, 0.0})
            throw std::domain_error("f_eval: s = -i alpha_s is a pole of f");
        value += params.rabi_omega * params.rabi_omega / den;
    }
    return value;
}

Complex f_prime(Complex s, const SystemParams& params) {
    const double tau = params.tau();
    Complex value = 1.0 - params.gamma * tau * std::exp(-kI * params.phi) *
                              std::exp(-s * tau);
    if (params.rabi_omega != 0.0) {
        const Complex den = s + kI * params.alpha_s;
        if (den == Complex{0.0, 0.0})
            throw std::domain_error("f_prime: s = -i alpha_s is a pole of f");
        value -= params.rabi_omega * params.rabi_omega / (den * den);
    }
    return value;
}

Window default_window(const SystemParams& params) {
    const double tau = params.tau();
    const double center = -0.5 * (params.alpha_e + params.alpha_s);
    // Enough to catch the dressed doublet and a few delay-lattice poles;
    // the lattice spacing is 2 pi / tau.
    double half = 6.0 * params.rabi_omega;
    half += (tau > 0.0) ? 6.0 * kPi / tau : 8.0 * rate_scale(params);
    if (half <= 0.0) half = 1.0;

    Window w;
    w.re_min = -(4.0 * params.gamma + 0.1 * std::max(rate_scale(params), 1e-30));
    w.re_max = 1e-6;
    w.im_min = center - half;
    w.im_max = center + half;
    return w;
}

std::size_t PoleSet::dark_count() const {
    return static_cast<std::size_t>(
        std::count_if(poles.begin(), poles.end(),
                      [](const Pole& p) { return p.kind == PoleKind::Dark; }));
}

std::vector<Pole> PoleSet::dark_poles() const {
    std::vector<Pole> out;
    for (const Pole& p : poles)
        if (p.kind == PoleKind::Dark) out.push_back(p);
    return out;
}

std::vector<Pole> PoleSet::quasi_bound_poles() const {
    std::vector<Pole> out;
    for (const Pole& p : poles)
        if (p.kind == PoleKind::QuasiBound) out.push_back(p);
    return out;
}

double PoleSet::slowest_quasi_bound_decay() const {
    double slowest = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const Pole& p : poles) {
        if (p.kind != PoleKind::QuasiBound) continue;
        slowest = std::min(slowest, -p.s.real());
        any = true;
    }
    return any ? slowest : 0.0;
}

PoleSet find_poles(const SystemParams& params, const Window& window,
                   int grid_n, double tol) {
    params.validate();
    if (grid_n < 8)
        throw std::invalid_argument("find_poles: grid_n must be >= 8");
    if (!(window.re_width() > 0.0) || !(window.im_width() > 0.0))
        throw std::invalid_argument("find_poles: window must have positive area");
    if (tol <= 0.0) tol = 1e-12 * std::max(rate_scale(params), 1e-30);

    PoleSet set;
    set.window = window;
    set.grid_n = grid_n;
    set.tol = tol;

    const Complex singularity = -kI * params.alpha_s;
    const double guard =
        params.rabi_omega > 0.0 ? 1e-4 * params.rabi_omega : 0.0;

    // |f| on the mesh; local minima (boundary cells included) seed Newton.
    const int n = grid_n;
    std::vector<double> mag(static_cast<std::size_t>(n) * n);
    const double dre = window.re_width() / (n - 1);
    const double dim = window.im_width() / (n - 1);
    const auto node = [&](int i, int j) {
        return Complex{window.re_min + dre * i, window.im_min + dim * j};
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Complex s = node(i, j);
            double m = std::numeric_limits<double>::infinity();
            if (guard == 0.0 || std::abs(s - singularity) > guard)
                m = std::abs(f_eval(s, params));
            mag[static_cast<std::size_t>(j) * n + i] = m;
        }
    }

    const auto at = [&](int i, int j) {
        return mag[static_cast<std::size_t>(j) * n + i];
    };

    std::vector<Complex> roots;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double m = at(i, j);
            if (!std::isfinite(m)) {
                ++set.diag.dropped_singular;
                continue;
            }
            bool is_min = true;
            for (int dj = -1; dj <= 1 && is_min; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= n || jj < 0 || jj >= n) continue;
                    if (at(ii, jj) < m) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (!is_min) continue;
            ++set.diag.seeds;

            // Newton refinement with the analytic derivative.
            Complex s = node(i, j);
            bool ok = false;
            for (int it = 0; it < 100; ++it) {
                if (guard > 0.0 && std::abs(s - singularity) < guard) break;
                const Complex fv = f_eval(s, params);
                if (std::abs(fv) <= tol) {
                    ok = true;
                    break;
                }
                const Complex fp = f_prime(s, params);
                if (fp == Complex{0.0, 0.0}) break;
                const Complex step = fv / fp;
                s -= step;
                if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) break;
            }
            if (!ok) {
                ++set.diag.dropped_nonconverged;
                continue;
            }
            ++set.diag.converged;
            if (!window.contains(s, 1e-9)) {
                ++set.diag.dropped_outside;
                continue;
            }
            if (s.real() > dark_tolerance(params)) {
                ++set.diag.dropped_unstable;
                continue;
            }
            roots.push_back(s);
        }
    }

    // Deterministic dedup: sort by (Im, Re), then sweep.
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.imag() != b.imag()) return a.imag() < b.imag();
        return a.real() < b.real();
    });
    const double radius = dedup_radius(params);
    std::vector<Complex> unique;
    for (const Complex& s : roots) {
        bool dup = false;
        for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
            if (std::abs(s - *it) < radius) {
                dup = true;
                break;
            }
            if (s.imag() - it->imag() > radius) break;
        }
        if (!dup) unique.push_back(s);
    }

    for (const Complex& s : unique) {
        Pole p;
        p.s = s;
        p.residual = std::abs(f_eval(s, params));
        p.kind = std::abs(s.real()) <= dark_tolerance(params) ? PoleKind::Dark
                                                              : PoleKind::QuasiBound;
        p.weight = 1.0 / f_prime(s, params);
        set.poles.push_back(p);
    }
    return set;
}

std::vector<Pole> dark_pole_predict(const SystemParams& params) {
    const DerivedQuantities dq = derive(params);
    std::vector<Pole> out;
    for (const DarkFrequency& df : dark_frequencies(params)) {
        const double gt = params.gamma * dq.tau;
        const double inv_weight =
            df.branch == Branch::Plus
                ? gt + 1.0 / (dq.cos_theta * dq.cos_theta)
                : gt + 1.0 / (dq.sin_theta * dq.sin_theta);
        Pole p;
        p.s = -kI * df.omega_p;
        p.kind = PoleKind::Dark;
        p.weight = 1.0 / inv_weight;
        p.residual = std::abs(f_eval(p.s, params));
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(),
              [](const Pole& a, const Pole& b) { return a.s.imag() < b.s.imag(); });
    return out;
}

namespace {

// Winding number of f along the segment a -> b, accumulated as phase
// increments. Halves the step wherever the phase jump is ambiguous.
double winding_along(const SystemParams& params, Complex a, Complex b,
                     int min_samples) {
    double total = 0.0;
    struct Item {
        Complex za, zb;
        Complex fa, fb;
        int depth;
    };
    std::vector<Item> stack;
    Complex prev_z = a;
    Complex prev_f = f_eval(a, params);
    for (int k = 1; k <= min_samples; ++k) {
        const double u = static_cast<double>(k) / min_samples;
        const Complex z = a + (b - a) * u;
        stack.push_back({prev_z, z, prev_f, f_eval(z, params), 0});
        prev_z = z;
        prev_f = stack.back().fb;
    }
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        const double d_arg = std::arg(it.fb / it.fa);
        if (std::abs(d_arg) < kPi / 2.0 || it.depth >= 48) {
            total += d_arg;
            continue;
        }
        const Complex zm = 0.5 * (it.za + it.zb);
        const Complex fm = f_eval(zm, params);
        stack.push_back({it.za, zm, it.fa, fm, it.depth + 1});
        stack.push_back({zm, it.zb, fm, it.fb, it.depth + 1});
    }
    return total;
}

}  // namespace

long long count_zeros(const SystemParams& params, const Window& window,
                      int min_samples_per_edge) {
    const Complex c1{window.re_min, window.im_min};
    const Complex c2{window.re_max, window.im_min};
    const Complex c3{window.re_max, window.im_max};
    const Complex c4{window.re_min, window.im_max};

    double phase = 0.0;
    phase += winding_along(params, c1, c2, min_samples_per_edge);
    phase += winding_along(params, c2, c3, min_samples_per_edge);
    phase += winding_along(params, c3, c4, min_samples_per_edge);
    phase += winding_along(params, c4, c1, min_samples_per_edge);

    double winding = phase / (2.0 * kPi);
    // f has one simple pole at -i alpha_s when the drive is on.
    if (params.rabi_omega > 0.0 &&
        window.contains(Complex{0.0, -params.alpha_s}))
        winding += 1.0;

    const long long count = std::llround(winding);
    if (std::abs(winding - static_cast<double>(count)) > 0.25)
        throw std::runtime_error(
            "count_zeros: contour winding did not converge to an integer "
            "(a root may lie on the window boundary)");
    return count;
}

void write_poles_csv(const PoleSet& set, std::ostream& os) {
    CsvWriter csv(os);
    csv.header("re_s,im_s,residual,kind,re_weight,im_weight");
    for (const Pole& p : set.poles) {
        csv.field(p.s.real())
            .field(p.s.imag())
            .field(p.residual)
            .field(p.kind == PoleKind::Dark ? "dark" : "quasi_bound")
            .field(p.weight.real())
            .field(p.weight.imag());
        csv.end_row();
    }
}

}  // namespace gad
