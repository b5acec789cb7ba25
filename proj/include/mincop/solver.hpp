#pragma once

#include "mincop/constraints.hpp"
#include "mincop/error.hpp"
#include "mincop/projections.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mincop {

/// How expectation constraints are projected on inside a cycle.
enum class Procedure {
    Gis,   ///< generalized iterative scaling steps (Procedure I)
    Tilt,  ///< exact exponential tilt (Procedure II)
};

std::string to_string(Procedure procedure);

struct PlateauConfig {
    std::size_t window = 200;
    double rel_tol = 1e-3;
};

struct SolverConfig {
    Procedure procedure = Procedure::Tilt;
    double epsilon = 1e-12;
    std::size_t max_cycles = 10000;
    std::size_t gis_inner_iters = 1;
    TiltSolveConfig tilt;
    PlateauConfig plateau;

    void validate() const;
};

struct CycleRecord {
    std::size_t cycle = 0;  ///< 1-based
    double max_abs_change = 0.0;
    std::vector<double> residuals;  ///< one per constraint, cycle order
};

/// Hard failure of one projection step.
struct SolveFailure {
    ErrorKind kind;
    std::string constraint;
    std::string message;
};

struct SolveReport {
    ProbArray result;
    Procedure procedure = Procedure::Tilt;
    std::size_t cycles_run = 0;
    bool converged = false;
    /// Heuristic: the change curve is flat but above epsilon.
    bool suspected_inconsistent = false;
    std::vector<std::string> constraint_names;
    std::vector<CycleRecord> trace;
    std::vector<ConstraintResidual> final_residuals;
    double wall_seconds = 0.0;
    std::optional<SolveFailure> failure;
};

/// Runs the cyclic iterated I-projection starting from the reference array.
/// Each cycle projects on the singleton margins (axis order), the user
/// margins and the moment constraints (declaration order); it stops once the
/// end-of-cycle arrays of two successive cycles differ by less than epsilon
/// in max-norm, or after max_cycles cycles. A failing step aborts the run and
/// the report keeps the last completed cycle's array.
///
/// Throws DegenerateMoment up front when procedure is Tilt and some moment
/// array is constant on the support of the reference.
SolveReport solve(const ProblemSpec& spec, const SolverConfig& cfg);

/// Heuristic stagnation test: true when every change in the last `window`
/// cycles is at or above epsilon and their mean cycle-to-cycle relative
/// change is at most rel_tol. Needs window >= 2.
bool plateau_detector(const std::vector<CycleRecord>& trace, const PlateauConfig& cfg, double epsilon);

struct ProcedureComparison {
    SolveReport gis;
    SolveReport tilt;
    /// gis.cycles_run / tilt.cycles_run
    double cycle_ratio = 0.0;
};

ProcedureComparison compare_procedures(const ProblemSpec& spec, const SolverConfig& cfg);

}  // namespace mincop
