#include "mincop/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace mincop {

std::string to_string(Procedure procedure) { return procedure == Procedure::Gis ? "gis" : "tilt"; }

void SolverConfig::validate() const {
    if (!(epsilon > 0.0)) fail(ErrorKind::InvalidParameter, "epsilon must be strictly positive");
    if (max_cycles < 1) fail(ErrorKind::InvalidParameter, "max_cycles must be at least 1");
    if (gis_inner_iters < 1) fail(ErrorKind::InvalidParameter, "gis_inner_iters must be at least 1");
    if (plateau.window < 2 || !(plateau.rel_tol > 0.0)) {
        fail(ErrorKind::InvalidParameter, "plateau window must be at least 2 and its tolerance positive");
    }
    tilt.validate();
}

namespace {

std::vector<double> residual_column(const ProbArray& q, const ProblemSpec& spec) {
    std::vector<double> out;
    out.reserve(spec.margins().size() + spec.moments().size());
    for (const auto& m : spec.margins()) out.push_back(margin_error(q, m));
    for (const auto& m : spec.moments()) out.push_back(std::fabs(moment_value(q, m) - m.target()));
    return out;
}

// Long inconsistent runs push cells into the subnormal range, where x86
// arithmetic is an order of magnitude slower. Flush them to zero for the
// duration of a solve.
class FlushDenormals {
public:
#if defined(__SSE__)
    FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
    ~FlushDenormals() { _mm_setcsr(saved_); }

private:
    unsigned saved_;
#endif
};

}  // namespace

SolveReport solve(const ProblemSpec& spec, const SolverConfig& cfg) {
    cfg.validate();
    const FlushDenormals ftz;
    const auto start = std::chrono::steady_clock::now();

    std::vector<NormalizedMoment> normalized;
    if (cfg.procedure == Procedure::Gis) {
        for (const auto& m : spec.moments()) normalized.push_back(normalize_moment(m));
    } else {
        for (const auto& m : spec.moments()) {
            if (!moment_varies_on_support(spec.reference(), m)) {
                fail(ErrorKind::DegenerateMoment, m.name() + " is constant on the support of the reference");
            }
        }
    }

    SolveReport report{.result = spec.reference(), .procedure = cfg.procedure};
    report.constraint_names = spec.constraint_names();
    ProbArray current = spec.reference();

    for (std::size_t cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
        ProbArray q = current;
        std::string step_name;
        try {
            for (const auto& m : spec.margins()) {
                step_name = m.name();
                q = marginal_scaling(q, m);
            }
            for (std::size_t k = 0; k < spec.moments().size(); ++k) {
                const auto& m = spec.moments()[k];
                step_name = m.name();
                if (cfg.procedure == Procedure::Gis) {
                    for (std::size_t s = 0; s < cfg.gis_inner_iters; ++s) q = gis_single_constraint_step(q, normalized[k]);
                } else {
                    q = exp_tilt_project(q, m, cfg.tilt).result;
                }
            }
        } catch (const Error& e) {
            report.failure = SolveFailure{e.kind(), step_name, e.what()};
            break;
        }

        const double change = max_abs_diff(q, current);
        current = std::move(q);
        report.trace.push_back({cycle, change, residual_column(current, spec)});
        report.cycles_run = cycle;
        if (change < cfg.epsilon) {
            report.converged = true;
            break;
        }
    }

    report.result = current;
    report.final_residuals = residuals(current, spec);
    if (!report.converged && !report.failure) {
        report.suspected_inconsistent = plateau_detector(report.trace, cfg.plateau, cfg.epsilon);
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

bool plateau_detector(const std::vector<CycleRecord>& trace, const PlateauConfig& cfg, double epsilon) {
    if (cfg.window < 2 || trace.size() < cfg.window) return false;
    const std::size_t first = trace.size() - cfg.window;
    double rate = 0.0;
    for (std::size_t t = first; t < trace.size(); ++t) {
        const double c = trace[t].max_abs_change;
        if (!(c >= epsilon)) return false;
        if (t > first) rate += std::fabs(c - trace[t - 1].max_abs_change) / trace[t - 1].max_abs_change;
    }
    return rate / static_cast<double>(cfg.window - 1) <= cfg.rel_tol;
}

ProcedureComparison compare_procedures(const ProblemSpec& spec, const SolverConfig& cfg) {
    SolverConfig gis_cfg = cfg;
    gis_cfg.procedure = Procedure::Gis;
    SolverConfig tilt_cfg = cfg;
    tilt_cfg.procedure = Procedure::Tilt;
    ProcedureComparison out{solve(spec, gis_cfg), solve(spec, tilt_cfg), 0.0};
    if (out.tilt.cycles_run > 0) {
        out.cycle_ratio = static_cast<double>(out.gis.cycles_run) / static_cast<double>(out.tilt.cycles_run);
    }
    return out;
}

}  // namespace mincop
