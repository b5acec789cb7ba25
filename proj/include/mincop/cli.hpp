#pragma once

#include "mincop/checkerboard.hpp"
#include "mincop/constraints.hpp"
#include "mincop/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mincop::cli {

namespace fs = std::filesystem;

/// Parametric bivariate (or independence) skeleton.
struct FamilySource {
    std::string family;
    double param = 0.0;
};

/// Margin target or moment array read from an array file.
struct FileSource {
    fs::path path;
};

struct MarginEntry {
    Axes axes;  ///< zero-based, sorted
    std::variant<FamilySource, FileSource> source;
};

struct SpearmanMoment {};

struct MomentEntry {
    Axes axes;  ///< zero-based, sorted
    std::variant<SpearmanMoment, FileSource> moment;
    double target = 0.0;
};

struct SampleRequest {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    SampleMode mode = SampleMode::CellCenters;
    fs::path path;
};

struct OutputPaths {
    std::optional<fs::path> result;
    std::optional<fs::path> trace;
    std::optional<fs::path> summary;
    std::optional<SampleRequest> samples;
};

/// Parsed configuration file. Relative paths are already resolved against
/// the directory of the configuration file.
struct RunConfig {
    std::size_t d = 0;
    std::size_t n = 0;
    std::optional<fs::path> reference;  ///< none means uniform
    std::vector<MarginEntry> margins;
    std::vector<MomentEntry> moments;
    SolverConfig solver;
    OutputPaths output;
};

/// Parses configuration text. Syntax errors report line and column, schema
/// errors the offending field (e.g. `moments[1].target`). Input files must
/// exist. Throws ConfigError.
RunConfig parse_config(const std::string& text, const fs::path& base_dir);
RunConfig load_config(const fs::path& path);

/// Builds the problem; constraint errors are prefixed with their field.
ProblemSpec build_spec(const RunConfig& config);

/// Writes the trace CSV and the sample CSV that were requested.
void emit_plot_data(const SolveReport& report, const OutputPaths& paths);

/// Exit codes of `run`.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Loads the configuration, solves, writes every requested artifact and
/// prints the summary to `out`. Errors go to `err` and yield kExitError.
int run(const fs::path& config_path, std::ostream& out, std::ostream& err);

}  // namespace mincop::cli
