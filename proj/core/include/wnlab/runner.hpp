#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wnlab/serialize.hpp"
#include "wnlab/system.hpp"
#include "wnlab/wave1d.hpp"

namespace wnlab {

enum class Action { asymptotic, classify, condition1, wave, trace, full_pipeline };
std::string to_string(Action a);

/// Wave block of a scenario. Bumps default to `amplitude`/`width` bumps with
/// centres spread around the middle of the u range (signs +, +, -, +, +, -, ...).
struct WaveScenario {
    double h = 0.01;
    double u0 = 0.0, u1 = 1.0, v0 = 2.0, v1 = 1602.0;
    double amplitude = 0.1;
    double width = 0.25;
    std::vector<BumpProfile> bumps;  // empty: defaults above
    std::vector<double> u_fixed{0.5};
    double s_start = 2.5;
    /// Shortest accepted comparison window in s (1.5 decades of r).
    double min_window = 3.4538776394910684;
    /// Repeat trace comparisons at 2h.
    bool refine = true;
    /// Store and export the full grid (large).
    bool export_grid = false;
    double blowup_threshold = 1e6;
    double max_deviation = 0.1;
    double max_h_oscillation = 0.05;

    std::vector<BumpProfile> resolved_bumps(std::size_t n_fields) const;
};

struct ScenarioConfig {
    std::string system_name;  // label for reports
    std::optional<WaveSystemSpec> system;
    Action action = Action::classify;
    double eps = 0.01;
    double delta = 0.5;
    double amplitude = 1.0;  // C
    std::optional<std::size_t> trials;
    std::uint64_t seed = 0;
    double s_max = 100.0;
    double tol = 1e-10;
    std::optional<Vector> phi0;
    ForcingKind forcing = ForcingKind::zero;
    WaveScenario wave;
    std::string output_dir = "wnlab_out";
    json raw;  // the parsed document, echoed into the report
};

/// Throws ConfigError (with a JSON pointer) on unknown keys, wrong types,
/// out-of-range values or unknown catalogue names.
ScenarioConfig parse_config(const json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

struct RunOverrides {
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    /// Fixed timestamp (tests); empty uses the wall clock.
    std::string timestamp;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 2 failed verdict
    json report;
    std::vector<std::string> artifacts;
};

/// Executes the action, writes report.json and CSV artifacts into the output
/// directory. Numerical failures propagate as exceptions (exit code 1 in the CLI).
RunResult run(const ScenarioConfig& config, const RunOverrides& overrides = {});

/// One line per built-in system.
std::string list_catalogue();

}  // namespace wnlab
