#include "gad/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gad/analytic.hpp"
#include "gad/csv.hpp"
#include "gad/field.hpp"

#include "json.hpp"

namespace fs = std::filesystem;

namespace gad {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

std::string format_compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void require_keys(const json& obj, const std::string& context,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&](const char* k) { return it.key() == k; });
        if (!known)
            throw std::invalid_argument("scenario: unknown key '" + it.key() +
                                        "' in " + context);
    }
}

double get_number(const json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument(std::string("scenario: '") + key +
                                    "' must be a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_number(obj, key);
}

int get_int(const json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw std::invalid_argument(std::string("scenario: '") + key +
                                    "' must be an integer");
    return v.get<int>();
}

}  // namespace

std::string to_string(Task task) {
    switch (task) {
        case Task::PoleMap: return "pole-map";
        case Task::Dynamics: return "dynamics";
        case Task::BoundAnalysis: return "bound-analysis";
        case Task::FieldProfile: return "field-profile";
        case Task::Conservation: return "conservation";
    }
    return "unknown";
}

Task task_from_string(const std::string& name) {
    if (name == "pole-map") return Task::PoleMap;
    if (name == "dynamics") return Task::Dynamics;
    if (name == "bound-analysis") return Task::BoundAnalysis;
    if (name == "field-profile") return Task::FieldProfile;
    if (name == "conservation") return Task::Conservation;
    throw std::invalid_argument("scenario: unknown task '" + name + "'");
}

SystemParams Scenario::variant_params(std::size_t i) const {
    SystemParams p = base;
    p.d = separations.at(i);
    p.validate();
    return p;
}

double Scenario::default_t_max(std::size_t variant) const {
    const double tau = separations.at(variant) / kGroupVelocity;
    if (tau > 0.0) return 50.0 * tau;
    const double rate = std::max(base.gamma, base.rabi_omega);
    return rate > 0.0 ? 10.0 / rate : 10.0;
}

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: invalid JSON: ") +
                                    e.what());
    }
    if (!doc.is_object())
        throw std::invalid_argument("scenario: top level must be an object");
    require_keys(doc, "scenario",
                 {"name", "description", "params", "task", "solver",
                  "output_dir"});

    Scenario sc;
    if (!doc.contains("name") || !doc.at("name").is_string())
        throw std::invalid_argument("scenario: 'name' (string) is required");
    sc.name = doc.at("name").get<std::string>();
    if (sc.name.empty() ||
        sc.name.find_first_of("/\\") != std::string::npos)
        throw std::invalid_argument("scenario: 'name' must be a non-empty "
                                    "string without path separators");
    if (doc.contains("description"))
        sc.description = doc.at("description").get<std::string>();

    if (!doc.contains("params") || !doc.at("params").is_object())
        throw std::invalid_argument("scenario: 'params' (object) is required");
    const json& jp = doc.at("params");
    require_keys(jp, "params",
                 {"rabi_omega", "gamma", "alpha_e", "alpha_s", "phi", "d",
                  "d_pi"});
    sc.base.rabi_omega = get_number_or(jp, "rabi_omega", 1.0);
    sc.base.gamma = get_number_or(jp, "gamma", 1.0);
    if (!jp.contains("alpha_e") || !jp.contains("alpha_s"))
        throw std::invalid_argument(
            "scenario: params.alpha_e and params.alpha_s are required");
    sc.base.alpha_e = get_number(jp, "alpha_e");
    sc.base.alpha_s = get_number(jp, "alpha_s");
    sc.base.phi = get_number_or(jp, "phi", 0.0);

    if (jp.contains("d") == jp.contains("d_pi"))
        throw std::invalid_argument(
            "scenario: exactly one of params.d / params.d_pi is required");
    const bool pi_units = jp.contains("d_pi");
    if (pi_units && !(sc.base.rabi_omega > 0.0))
        throw std::invalid_argument(
            "scenario: params.d_pi needs rabi_omega > 0 (separations are in "
            "units of pi/Omega)");
    const json& jd = pi_units ? jp.at("d_pi") : jp.at("d");
    std::vector<double> raw;
    if (jd.is_number()) {
        raw.push_back(jd.get<double>());
    } else if (jd.is_array() && !jd.empty()) {
        for (const auto& v : jd) {
            if (!v.is_number())
                throw std::invalid_argument(
                    "scenario: separations must be numbers");
            raw.push_back(v.get<double>());
        }
    } else {
        throw std::invalid_argument(
            "scenario: separation must be a number or non-empty array");
    }
    for (const double v : raw) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("scenario: separations must be >= 0");
        sc.separations.push_back(pi_units ? v * kPi / sc.base.rabi_omega : v);
        sc.variant_tags.push_back("d" + format_compact(v) +
                                  (pi_units ? "pi" : ""));
    }

    if (!doc.contains("task") || !doc.at("task").is_string())
        throw std::invalid_argument("scenario: 'task' (string) is required");
    sc.task = task_from_string(doc.at("task").get<std::string>());

    if (doc.contains("solver")) {
        const json& js = doc.at("solver");
        if (!js.is_object())
            throw std::invalid_argument("scenario: 'solver' must be an object");
        require_keys(js, "solver",
                     {"dt", "t_max", "window", "grid_n", "x_grid_n",
                      "quad_cells", "output_stride", "co_rotating", "times",
                      "matrix"});
        if (js.contains("dt")) sc.solver.dt = get_number(js, "dt");
        if (js.contains("t_max")) sc.solver.t_max = get_number(js, "t_max");
        if (js.contains("grid_n")) sc.solver.grid_n = get_int(js, "grid_n");
        if (js.contains("x_grid_n"))
            sc.solver.x_grid_n = get_int(js, "x_grid_n");
        if (js.contains("quad_cells"))
            sc.solver.quad_cells = get_int(js, "quad_cells");
        if (js.contains("output_stride"))
            sc.solver.output_stride = get_int(js, "output_stride");
        if (js.contains("window")) {
            const json& jw = js.at("window");
            require_keys(jw, "solver.window",
                         {"re_min", "re_max", "im_min", "im_max"});
            Window w;
            w.re_min = get_number(jw, "re_min");
            w.re_max = get_number(jw, "re_max");
            w.im_min = get_number(jw, "im_min");
            w.im_max = get_number(jw, "im_max");
            sc.solver.window = w;
        }
        if (js.contains("co_rotating")) {
            const json& jc = js.at("co_rotating");
            if (jc.is_boolean())
                sc.solver.co_rotating =
                    jc.get<bool>() ? CoRotating::On : CoRotating::Off;
            else if (jc.is_string() && jc.get<std::string>() == "auto")
                sc.solver.co_rotating = CoRotating::Auto;
            else
                throw std::invalid_argument(
                    "scenario: solver.co_rotating must be true, false or "
                    "\"auto\"");
        }
        if (js.contains("times")) {
            for (const auto& v : js.at("times")) {
                if (!v.is_number() || !(v.get<double>() >= 0.0))
                    throw std::invalid_argument(
                        "scenario: solver.times must be non-negative numbers");
                sc.solver.times.push_back(v.get<double>());
            }
        }
        if (js.contains("matrix")) sc.solver.matrix = js.at("matrix").get<bool>();
    }

    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string() ||
            doc.at("output_dir").get<std::string>().empty())
            throw std::invalid_argument(
                "scenario: 'output_dir' must be a non-empty string");
        sc.output_dir = doc.at("output_dir").get<std::string>();
    }

    // Validate every variant up front so execution cannot fail halfway
    // through on bad physics parameters.
    for (std::size_t i = 0; i < sc.separations.size(); ++i)
        sc.variant_params(i);
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("scenario: cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

Scenario make_bundled(const std::string& name, const std::string& description,
                      SystemParams base, std::vector<double> d_pi_values,
                      Task task, SolverSettings solver = {}) {
    Scenario sc;
    sc.name = name;
    sc.description = description;
    sc.base = base;
    for (const double v : d_pi_values) {
        sc.separations.push_back(v * kPi / base.rabi_omega);
        sc.variant_tags.push_back("d" + format_compact(v) + "pi");
    }
    sc.task = task;
    sc.solver = std::move(solver);
    return sc;
}

std::vector<Scenario> build_catalog() {
    std::vector<Scenario> catalog;

    SystemParams a100{1.0, 1.0, 100.0, 100.0, 0.0, 0.0};
    SystemParams a101{1.0, 1.0, 101.0, 101.0, 0.0, 0.0};

    catalog.push_back(make_bundled(
        "fig2a",
        "figure 2(a): pole map of the driven response, alpha = 100 Omega, "
        "d/pi in {1, 1.05, 1.25}; two dark modes coexist at d = pi",
        a100, {1.0, 1.05, 1.25}, Task::PoleMap));
    catalog.push_back(make_bundled(
        "fig2b",
        "figure 2(b): pole map at alpha = 101 Omega for the same distances; "
        "at most one dark mode survives",
        a101, {1.0, 1.05, 1.25}, Task::PoleMap));

    {
        SolverSettings s;
        s.t_max = 700.0;  // slowest quasi-bound decay here is ~0.017
        catalog.push_back(make_bundled(
            "fig3b",
            "figure 3(b): single dark mode, d = 0.05 pi / Omega; population "
            "settles at 1/(gamma tau + 2)^2",
            a101, {0.05}, Task::Dynamics, s));
    }
    {
        SolverSettings s;
        s.t_max = 120.0;
        catalog.push_back(make_bundled(
            "fig3c",
            "figure 3(c): single dark mode, d = 0.25 pi / Omega; faster "
            "quasi-bound decay",
            a101, {0.25}, Task::Dynamics, s));
        catalog.push_back(make_bundled(
            "fig3d",
            "figure 3(d): single dark mode, d = 0.31 pi / Omega",
            a101, {0.31}, Task::Dynamics, s));
    }
    {
        SolverSettings s;
        s.t_max = 620.0;
        catalog.push_back(make_bundled(
            "fig4",
            "figure 4: coexisting dark modes at alpha = 100 Omega, "
            "d = 3 pi / Omega; persistent population beat at 2 Omega",
            a100, {3.0}, Task::Dynamics, s));
    }
    {
        SolverSettings s;
        s.t_max = 820.0;
        catalog.push_back(make_bundled(
            "fig5",
            "figure 5: excited-state evolution at alpha = 100 Omega for "
            "d/pi in {1, 3, 5}",
            a100, {1.0, 3.0, 5.0}, Task::Dynamics, s));
    }
    {
        Scenario sc;
        sc.name = "twolevel";
        sc.description =
            "drive off (Omega = 0): giant two-level atom at alpha = 100, "
            "d = pi, single delay echo";
        sc.base = SystemParams{0.0, 1.0, 100.0, 100.0, 0.0, 0.0};
        sc.separations = {kPi};
        sc.variant_tags = {"dpi"};
        sc.task = Task::Dynamics;
        sc.solver.dt = kPi / 128.0;
        sc.solver.t_max = 160.0;
        catalog.push_back(sc);
    }
    return catalog;
}

}  // namespace

const std::vector<Scenario>& bundled_scenarios() {
    static const std::vector<Scenario> catalog = build_catalog();
    return catalog;
}

const Scenario& bundled_scenario(const std::string& name) {
    for (const Scenario& sc : bundled_scenarios())
        if (sc.name == name) return sc;
    throw std::invalid_argument("unknown bundled scenario '" + name + "'");
}

std::vector<CatalogEntry> list_scenarios() {
    std::vector<CatalogEntry> entries;
    for (const Scenario& sc : bundled_scenarios())
        entries.push_back({sc.name, sc.description});
    return entries;
}

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open output file " + path.string());
    return os;
}

struct TaskContext {
    const Scenario& scenario;
    const RunOverrides& overrides;
    fs::path dir;
    VariantReport& report;
    SystemParams params;
    std::string tag;

    double t_max() const {
        if (overrides.t_max) return *overrides.t_max;
        if (scenario.solver.t_max) return *scenario.solver.t_max;
        for (std::size_t i = 0; i < scenario.separations.size(); ++i)
            if (scenario.variant_tags[i] == tag) return scenario.default_t_max(i);
        return scenario.default_t_max(0);
    }

    IntegrationOptions integration_options() const {
        IntegrationOptions o;
        o.dt = overrides.dt ? overrides.dt : scenario.solver.dt;
        o.co_rotating = scenario.solver.co_rotating;
        return o;
    }

    std::string add_file(const std::string& stem) {
        report.files.push_back(stem);
        return (dir / stem).string();
    }
};

PoleSet run_pole_search(TaskContext& ctx) {
    const Window window =
        ctx.scenario.solver.window.value_or(default_window(ctx.params));
    const int grid_n = ctx.scenario.solver.grid_n.value_or(1024);
    PoleSet set = find_poles(ctx.params, window, grid_n);
    ctx.report.pole_count = static_cast<int>(set.poles.size());
    ctx.report.dark_count = static_cast<int>(set.dark_count());
    for (const Pole& p : set.poles)
        ctx.report.max_residual = std::max(ctx.report.max_residual, p.residual);

    const auto predicted = dark_pole_predict(ctx.params);
    if (predicted.size() != set.dark_count())
        ctx.report.warnings.push_back(
            "dark pole count from the search (" +
            std::to_string(set.dark_count()) +
            ") differs from the analytic prediction (" +
            std::to_string(predicted.size()) + ")");
    return set;
}

void exec_pole_map(TaskContext& ctx) {
    const PoleSet set = run_pole_search(ctx);
    auto os = open_output(ctx.add_file("poles_" + ctx.tag + ".csv"));
    write_poles_csv(set, os);
}

void write_residue_info(TaskContext& ctx, const ResidueSeries& series) {
    ordered_json info;
    info["pole_count"] = series.poles.poles.size();
    info["dark_count"] = series.poles.dark_count();
    info["truncation_diagnostic"] = series.truncation_diagnostic;
    auto os = open_output(ctx.add_file("residue_info_" + ctx.tag + ".json"));
    os << info.dump(2) << '\n';
}

void exec_dynamics(TaskContext& ctx) {
    const Trajectory traj =
        integrate(ctx.params, ctx.t_max(), ctx.integration_options());
    const PoleSet set = run_pole_search(ctx);
    const ResidueSeries series = make_residue_series(set);
    ctx.report.truncation_diagnostic = series.truncation_diagnostic;
    if (series.truncation_warning())
        ctx.report.warnings.push_back(
            "residue series truncation diagnostic exceeds 0.05; grow the "
            "search window");

    const std::size_t stride = ctx.scenario.solver.output_stride
                                   ? static_cast<std::size_t>(std::max(
                                         1, *ctx.scenario.solver.output_stride))
                                   : std::max<std::size_t>(
                                         1, (traj.size() + 19999) / 20000);

    {
        auto os = open_output(ctx.add_file("dynamics_dde_" + ctx.tag + ".csv"));
        CsvWriter csv(os);
        csv.header("t,re_ce,im_ce,re_cs,im_cs,pe,ps");
        for (std::size_t i = 0; i < traj.size(); i += stride) {
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
    {
        auto os =
            open_output(ctx.add_file("dynamics_residue_" + ctx.tag + ".csv"));
        CsvWriter csv(os);
        csv.header("t,re_ce,im_ce,re_cs,im_cs,pe,ps");
        for (std::size_t i = 0; i < traj.size(); i += stride) {
            const double t = traj.time(i);
            const Complex ce = residue_ce(series, t);
            const Complex cs = residue_cs(series, ctx.params, t);
            csv.field(t)
                .field(ce.real())
                .field(ce.imag())
                .field(cs.real())
                .field(cs.imag())
                .field(std::norm(ce))
                .field(std::norm(cs));
            csv.end_row();
        }
    }
    write_residue_info(ctx, series);
}

void exec_bound_analysis(TaskContext& ctx) {
    const auto darks = dark_frequencies(ctx.params);
    ctx.report.dark_count = static_cast<int>(darks.size());

    {
        PoleSet predicted;
        predicted.poles = dark_pole_predict(ctx.params);
        auto os = open_output(
            ctx.add_file("predicted_dark_poles_" + ctx.tag + ".csv"));
        write_poles_csv(predicted, os);
    }

    const double t_end = ctx.t_max();
    constexpr int kSamples = 2001;
    if (darks.size() == 1) {
        auto os = open_output(ctx.add_file("bound_static_" + ctx.tag + ".csv"));
        CsvWriter csv(os);
        csv.header("t,re_ce,im_ce,re_cs,im_cs,pe,ps");
        for (int i = 0; i < kSamples; ++i) {
            const double t = t_end * i / (kSamples - 1);
            const BoundAmplitudes b = static_bound(ctx.params, t);
            csv.field(t)
                .field(b.ce.real())
                .field(b.ce.imag())
                .field(b.cs.real())
                .field(b.cs.imag())
                .field(std::norm(b.ce))
                .field(std::norm(b.cs));
            csv.end_row();
        }
    } else if (darks.size() == 2) {
        auto os =
            open_output(ctx.add_file("bound_oscillating_" + ctx.tag + ".csv"));
        CsvWriter csv(os);
        csv.header("t,re_ce,im_ce,pe");
        for (int i = 0; i < kSamples; ++i) {
            const double t = t_end * i / (kSamples - 1);
            const Complex ce = oscillating_bound(ctx.params, t);
            csv.field(t).field(ce.real()).field(ce.imag()).field(std::norm(ce));
            csv.end_row();
        }
    } else {
        ctx.report.warnings.push_back("no dark mode at this separation");
    }
}

void exec_field_profile(TaskContext& ctx) {
    std::vector<double> times = ctx.scenario.solver.times;
    if (times.empty()) times = {ctx.t_max()};
    const double t_need = *std::max_element(times.begin(), times.end());
    if (!(t_need > 0.0))
        throw std::invalid_argument("field-profile: needs a positive time");

    const Trajectory traj =
        integrate(ctx.params, t_need, ctx.integration_options());

    const int n = ctx.scenario.solver.x_grid_n.value_or(2048);
    const double d = ctx.params.d;
    const auto grid = d > 0.0 ? uniform_grid(-d, 2.0 * d, n)
                              : uniform_grid(-t_need, t_need, n);

    for (std::size_t k = 0; k < times.size(); ++k) {
        const FieldProfile profile =
            density_profile(traj, ctx.params, grid, times[k]);
        auto os = open_output(ctx.add_file(
            "field_" + ctx.tag + "_t" + std::to_string(k) + ".csv"));
        write_field_csv(profile, os);
    }

    if (ctx.scenario.solver.matrix) {
        auto os =
            open_output(ctx.add_file("field_matrix_" + ctx.tag + ".csv"));
        CsvWriter csv(os);
        // header: t, then one column per grid point
        os << "t";
        for (const double x : grid) os << ',' << format_double(x);
        os << '\n';
        for (const double t : times) {
            const FieldProfile profile =
                density_profile(traj, ctx.params, grid, t);
            csv.field(t);
            for (const double p : profile.p) csv.field(p);
            csv.end_row();
        }
    }
}

void exec_conservation(TaskContext& ctx) {
    const double t_end = ctx.t_max();
    const double tau = ctx.params.tau();
    std::vector<double> times = ctx.scenario.solver.times;
    if (times.empty()) {
        const double t_top = tau > 0.0 ? std::min(t_end, 30.0 * tau) : t_end;
        times = {0.25 * t_top, 0.5 * t_top, 0.75 * t_top, t_top};
    }
    for (const double t : times)
        if (t > t_end)
            throw std::invalid_argument(
                "conservation: requested time beyond t_max");

    const Trajectory traj =
        integrate(ctx.params, t_end, ctx.integration_options());

    auto os = open_output(ctx.add_file("conservation_" + ctx.tag + ".csv"));
    CsvWriter csv(os);
    csv.header("t,atom,field_integral,balance,balance_refined");
    double worst = 0.0;
    for (const double t : times) {
        const double margin = 0.1 * (ctx.params.d + 1.0);
        const double lo = -t - margin;
        const double hi = ctx.params.d + t + margin;
        const int cells = ctx.scenario.solver.quad_cells.value_or(
            suggest_quadrature_cells(ctx.params, hi - lo));
        const BalanceResult coarse =
            excitation_balance(traj, ctx.params, t, lo, hi, cells);
        const BalanceResult fine =
            excitation_balance(traj, ctx.params, t, lo, hi, 2 * cells);
        csv.field(t)
            .field(coarse.atom_population)
            .field(coarse.field_integral)
            .field(coarse.balance)
            .field(fine.balance);
        csv.end_row();
        worst = std::max(worst, std::abs(fine.balance));
    }
    ctx.report.conservation_residual = worst;
    if (worst > 1e-3)
        ctx.report.warnings.push_back(
            "conservation residual exceeds 1e-3 at the refined resolution");
}

ordered_json params_to_json(const SystemParams& p) {
    ordered_json j;
    j["rabi_omega"] = p.rabi_omega;
    j["gamma"] = p.gamma;
    j["alpha_e"] = p.alpha_e;
    j["alpha_s"] = p.alpha_s;
    j["phi"] = p.phi;
    j["d"] = p.d;
    return j;
}

ordered_json derived_to_json(const DerivedQuantities& dq) {
    ordered_json j;
    j["tau"] = dq.tau;
    j["delta"] = dq.delta;
    j["omega_eff"] = dq.omega_eff;
    j["omega_p1"] = dq.omega_p1;
    j["omega_p2"] = dq.omega_p2;
    j["sin_theta"] = dq.sin_theta;
    j["cos_theta"] = dq.cos_theta;
    if (dq.q)
        j["q"] = *dq.q;
    else
        j["q"] = nullptr;
    return j;
}

}  // namespace

RunManifest run(const Scenario& scenario, const RunOverrides& overrides) {
    // Resolve and validate everything before touching the filesystem.
    std::string root;
    if (overrides.out_dir) {
        root = *overrides.out_dir;
    } else if (scenario.output_dir) {
        root = *scenario.output_dir;
    } else if (const char* env = std::getenv(kOutDirEnvVar)) {
        root = env;
    } else {
        root = "gad-out";
    }
    if (root.empty())
        throw std::invalid_argument("run: output directory must not be empty");
    if (scenario.name.empty())
        throw std::invalid_argument("run: scenario has no name");
    if (overrides.dt && !(*overrides.dt > 0.0))
        throw std::invalid_argument("run: dt override must be > 0");
    if (overrides.t_max && !(*overrides.t_max > 0.0))
        throw std::invalid_argument("run: t_max override must be > 0");
    for (std::size_t i = 0; i < scenario.separations.size(); ++i)
        scenario.variant_params(i);

    RunManifest manifest;
    manifest.scenario_name = scenario.name;
    manifest.tool_version = kToolVersion;

    const fs::path dir = fs::path(root) / scenario.name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("run: cannot create output directory " +
                                 dir.string() + ": " + ec.message());
    manifest.output_dir = dir.string();

    for (std::size_t i = 0; i < scenario.separations.size(); ++i) {
        VariantReport report;
        report.tag = scenario.variant_tags[i];
        report.params = scenario.variant_params(i);
        report.derived = derive(report.params);

        TaskContext ctx{scenario, overrides, dir, report, report.params,
                        report.tag};
        switch (scenario.task) {
            case Task::PoleMap: exec_pole_map(ctx); break;
            case Task::Dynamics: exec_dynamics(ctx); break;
            case Task::BoundAnalysis: exec_bound_analysis(ctx); break;
            case Task::FieldProfile: exec_field_profile(ctx); break;
            case Task::Conservation: exec_conservation(ctx); break;
        }
        manifest.variants.push_back(std::move(report));
    }

    for (const VariantReport& v : manifest.variants)
        for (const std::string& f : v.files) manifest.files.push_back(f);
    manifest.files.push_back("manifest.json");

    // Atomic finish: the manifest appears only after a fully successful run.
    const fs::path tmp = dir / "manifest.json.tmp";
    {
        auto os = open_output(tmp);
        os << manifest_to_json(manifest) << '\n';
    }
    fs::rename(tmp, dir / "manifest.json");
    return manifest;
}

std::string manifest_to_json(const RunManifest& manifest) {
    ordered_json j;
    j["scenario"] = manifest.scenario_name;
    j["tool_version"] = manifest.tool_version;
    j["output_dir"] = manifest.output_dir;
    j["variants"] = ordered_json::array();
    for (const VariantReport& v : manifest.variants) {
        ordered_json jv;
        jv["tag"] = v.tag;
        jv["params"] = params_to_json(v.params);
        jv["derived"] = derived_to_json(v.derived);
        ordered_json diag;
        if (v.pole_count >= 0) diag["pole_count"] = v.pole_count;
        if (v.dark_count >= 0) diag["dark_count"] = v.dark_count;
        if (v.pole_count >= 0) diag["max_residual"] = v.max_residual;
        if (v.truncation_diagnostic)
            diag["truncation_diagnostic"] = *v.truncation_diagnostic;
        if (v.conservation_residual)
            diag["conservation_residual"] = *v.conservation_residual;
        jv["diagnostics"] = diag;
        jv["warnings"] = v.warnings;
        jv["files"] = v.files;
        j["variants"].push_back(jv);
    }
    j["files"] = manifest.files;
    return j.dump(2);
}

}  // namespace gad
