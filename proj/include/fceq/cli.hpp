#pragma once

#include "fceq/averaged.hpp"
#include "fceq/ceq.hpp"
#include "fceq/metrics.hpp"
#include "fceq/types.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace fceq {

using json = nlohmann::json;

/// One batch job: a command, a metric, a point and the numeric knobs.
/// Parsed from a JSON config document; CLI flags override individual fields.
struct JobConfig {
    enum class Command { solve, analyze, check, synth };

    Command command = Command::solve;
    MetricSpec metric;
    Vec point;
    SolverConfig solver;
    std::optional<QuadratureSpec> quad;
    std::optional<std::string> output_path;
};

const char* to_string(JobConfig::Command command) noexcept;

/// Machine-readable run report. `body` holds the full document including
/// wall time; `deterministic_body` strips it so reruns compare bit-identical.
struct Report {
    json body;
    int exit_code = 0;

    std::string to_text() const { return body.dump(2) + "\n"; }
    json deterministic_body() const;
};

json metric_spec_to_json(const MetricSpec& spec);
MetricSpec metric_spec_from_json(const json& doc);

/// Parses a config document. Throws CONFIG_INVALID naming the field path.
JobConfig parse_job_config(const json& doc, JobConfig::Command command);
JobConfig parse_job_config(const std::string& text, JobConfig::Command command);

/// Runs one job end to end and assembles the report. Exit code convention:
/// 0 success (solve: UNIQUE or RIEMANNIAN_INDETERMINATE), 2 INSOLVABLE,
/// 3 DEGENERATE_SAMPLING, 4 CONFIG_INVALID, 1 other errors.
Report run(const JobConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInsolvable = 2;
inline constexpr int kExitDegenerateSampling = 3;
inline constexpr int kExitConfigInvalid = 4;

}  // namespace fceq
