#include "mincop/cli.hpp"

#include "mincop/error.hpp"
#include "mincop/io.hpp"

#include <fstream>
#include <ostream>

namespace mincop::cli {

void emit_plot_data(const SolveReport& report, const OutputPaths& paths) {
    if (paths.trace) io::write_trace(*paths.trace, report);
    if (paths.samples) {
        const SampleRequest& req = *paths.samples;
        const auto points = sample(report.result, req.count, req.seed, req.mode);
        io::write_samples(req.path, points, report.result.shape().dims());
    }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    out << text;
    if (!out) fail(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

}  // namespace

int run(const fs::path& config_path, std::ostream& out, std::ostream& err) {
    try {
        const RunConfig config = load_config(config_path);
        const ProblemSpec spec = build_spec(config);
        const SolveReport report = solve(spec, config.solver);

        const std::string summary = io::format_summary(report, config.solver.epsilon);
        out << summary;
        if (config.output.result) io::write_array(*config.output.result, report.result);
        if (config.output.summary) write_text(*config.output.summary, summary);
        emit_plot_data(report, config.output);

        if (report.failure) {
            err << "error: " << to_string(report.failure->kind) << " at " << report.failure->constraint << '\n';
            return kExitError;
        }
        return report.converged ? kExitConverged : kExitNotConverged;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace mincop::cli
