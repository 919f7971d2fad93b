// gad - scenario-driven simulator front end.
//
//   gad list
//   gad run <scenario.json | bundled-name>... [--out DIR] [--parallel N]
//           [--dt X] [--t-max X]
//   gad verify <scenario.json | bundled-name>
//
// Exit codes: 0 ok, 2 validation error, 3 solver failure,
// 4 verification failure. Errors are reported as JSON on stderr.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gad/scenario.hpp"
#include "gad/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerification = 4;

void print_error(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"]["kind"] = kind;
    j["error"]["message"] = message;
    std::cerr << j.dump() << std::endl;
}

gad::Scenario resolve_scenario(const std::string& ref) {
    if (std::filesystem::exists(ref)) return gad::load_scenario_file(ref);
    return gad::bundled_scenario(ref);
}

int cmd_list() {
    for (const auto& entry : gad::list_scenarios())
        std::printf("%-10s %s\n", entry.name.c_str(), entry.description.c_str());
    return kExitOk;
}

int cmd_run(const std::vector<std::string>& refs, const gad::RunOverrides& ov,
            int parallel) {
    std::vector<gad::Scenario> scenarios;
    for (const std::string& ref : refs) scenarios.push_back(resolve_scenario(ref));

    std::mutex io_mutex;
    std::atomic<int> next{0};
    std::atomic<int> exit_code{kExitOk};

    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= static_cast<int>(scenarios.size())) return;
            try {
                const gad::RunManifest manifest = gad::run(scenarios[i], ov);
                std::lock_guard<std::mutex> lock(io_mutex);
                std::printf("wrote %zu file(s) to %s\n", manifest.files.size(),
                            manifest.output_dir.c_str());
                for (const auto& v : manifest.variants)
                    for (const auto& w : v.warnings)
                        std::printf("  warning [%s]: %s\n", v.tag.c_str(),
                                    w.c_str());
            } catch (const std::invalid_argument& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                print_error("validation", e.what());
                exit_code = kExitValidation;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                print_error("solver", e.what());
                if (exit_code == kExitOk) exit_code = kExitSolver;
            }
        }
    };

    const int n_threads =
        std::max(1, std::min<int>(parallel, static_cast<int>(scenarios.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return exit_code;
}

int cmd_verify(const std::string& ref) {
    const gad::Scenario scenario = resolve_scenario(ref);
    const gad::VerifyReport report = gad::verify_scenario(scenario);
    for (const gad::Check& check : report.checks)
        std::printf("%s %-28s measured=%.6e threshold=%.6e\n",
                    check.pass ? "PASS" : "FAIL", check.name.c_str(),
                    check.measured, check.threshold);
    if (!report.all_pass()) {
        print_error("verification", "one or more checks failed for scenario '" +
                                        report.scenario + "'");
        return kExitVerification;
    }
    std::printf("all %zu check(s) passed for scenario '%s'\n",
                report.checks.size(), report.scenario.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spontaneous-emission dynamics of a driven three-level "
                 "giant atom coupled twice to a 1D waveguide"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list bundled scenarios");

    std::vector<std::string> run_refs;
    std::string out_dir;
    double dt = 0.0, t_max = 0.0;
    int parallel = 1;
    auto* run_cmd = app.add_subcommand("run", "execute scenarios");
    run_cmd->add_option("scenario", run_refs,
                        "scenario JSON file(s) or bundled name(s)")
        ->required();
    run_cmd->add_option("--out", out_dir, "output root directory");
    run_cmd->add_option("--parallel", parallel,
                        "run up to N scenarios concurrently")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--dt", dt, "integration step override");
    run_cmd->add_option("--t-max", t_max, "integration horizon override");

    std::string verify_ref;
    auto* verify_cmd =
        app.add_subcommand("verify", "run consistency checks for one scenario");
    verify_cmd->add_option("scenario", verify_ref,
                           "scenario JSON file or bundled name")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (list_cmd->parsed()) return cmd_list();
        if (run_cmd->parsed()) {
            gad::RunOverrides ov;
            if (!out_dir.empty()) ov.out_dir = out_dir;
            if (run_cmd->count("--dt") > 0) ov.dt = dt;
            if (run_cmd->count("--t-max") > 0) ov.t_max = t_max;
            return cmd_run(run_refs, ov, parallel);
        }
        if (verify_cmd->parsed()) return cmd_verify(verify_ref);
    } catch (const std::invalid_argument& e) {
        print_error("validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        print_error("solver", e.what());
        return kExitSolver;
    }
    return kExitOk;
}
