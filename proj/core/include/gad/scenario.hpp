#pragma once

// Declarative run descriptions for the CLI: a scenario names a parameter
// set (possibly several coupling separations), a task, and solver settings.
// Scenarios parse from strict JSON (unknown keys rejected) and execute into
// a directory of CSV outputs plus a deterministic manifest.

#include <optional>
#include <string>
#include <vector>

#include "gad/dde.hpp"
#include "gad/params.hpp"
#include "gad/poles.hpp"

namespace gad {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutDirEnvVar = "GAD_OUT_DIR";

enum class Task { PoleMap, Dynamics, BoundAnalysis, FieldProfile, Conservation };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

struct SolverSettings {
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<Window> window;
    std::optional<int> grid_n;
    std::optional<int> x_grid_n;    // field-profile spatial resolution
    std::optional<int> quad_cells;  // conservation quadrature cells
    std::optional<int> output_stride;
    CoRotating co_rotating = CoRotating::Auto;
    std::vector<double> times;  // evaluation times (field/conservation)
    bool matrix = false;        // space-time density matrix export
};

struct Scenario {
    std::string name;
    std::string description;
    SystemParams base;                  // d is overwritten per variant
    std::vector<double> separations;    // absolute d, one variant each
    std::vector<std::string> variant_tags;
    Task task = Task::Dynamics;
    SolverSettings solver;
    std::optional<std::string> output_dir;

    SystemParams variant_params(std::size_t i) const;
    // Scenario-level defaults shared by run and verify.
    double default_t_max(std::size_t variant) const;
};

// Strict parser; throws std::invalid_argument with the offending key/field.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Bundled catalog, deterministic order. Lookup throws std::invalid_argument
// for unknown names.
const std::vector<Scenario>& bundled_scenarios();
const Scenario& bundled_scenario(const std::string& name);

struct CatalogEntry {
    std::string name;
    std::string description;
};
std::vector<CatalogEntry> list_scenarios();

struct VariantReport {
    std::string tag;
    SystemParams params;
    DerivedQuantities derived;
    int pole_count = -1;
    int dark_count = -1;
    double max_residual = 0.0;
    std::optional<double> truncation_diagnostic;
    std::optional<double> conservation_residual;
    std::vector<std::string> warnings;
    std::vector<std::string> files;  // relative to the scenario directory
};

struct RunManifest {
    std::string scenario_name;
    std::string tool_version;
    std::string output_dir;
    std::vector<VariantReport> variants;
    std::vector<std::string> files;  // all emitted files, manifest last
};

struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<double> dt;
    std::optional<double> t_max;
};

// Executes the scenario and writes outputs under <out>/<scenario name>/.
// The manifest is written atomically after everything else succeeded.
// Throws std::invalid_argument for validation problems (nothing written)
// and std::runtime_error for solver failures.
RunManifest run(const Scenario& scenario, const RunOverrides& overrides = {});

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace gad
