#pragma once

#include "mincop/constraints.hpp"
#include "mincop/prob_array.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mincop {

/// Root-finding settings for the exponential-tilt projection.
struct TiltSolveConfig {
    double root_tolerance = 1e-13;    ///< stop when |Lambda(lambda) - a| is below this
    double lambda_tolerance = 1e-14;  ///< stop when the bracket is narrower than this (relative to max(1, |lambda|))
    double overflow_budget = 700.0;   ///< lambda is capped at overflow_budget / max_i |h_i|
    int max_doublings = 64;

    void validate() const;
};

/// Scales each block of a partition of the grid to a target mass.
/// `block_of_cell[i]` is the block label of cell i; labels index `targets`.
/// Throws InfeasibleScaling when a block with zero mass has a positive target.
ProbArray partition_scaling(const ProbArray& q, std::span<const std::size_t> block_of_cell,
                            std::span<const double> targets);

/// I-projection onto {p : p^(J) = s^J}: q_i s^J_{i_J} / q^(J)_{i_J} on supp(q).
ProbArray marginal_scaling(const ProbArray& q, const MarginConstraint& mc);
/// Same scaling for an arbitrary margin target on `axes`, including
/// non-uniform univariate ones.
ProbArray marginal_scaling(const ProbArray& q, const Axes& axes, const ProbArray& target);

/// Generalized iterative scaling family: nonnegative arrays summing to one
/// at every cell, with a probability vector of targets.
struct GisFamily {
    std::vector<MomentArray> hbar;
    std::vector<double> abar;

    /// Throws InvalidGISFamily on negative entries, row sums off by more than
    /// 1e-12, or targets that are not a probability vector.
    void validate() const;
};

/// One multiplicative GIS update, renormalized once; uses 0/0 = 0 and 0^0 = 1.
ProbArray gis_step(const ProbArray& q, const GisFamily& family);

/// The two-term GIS update (hbar, 1 - hbar) with targets (abar, 1 - abar).
ProbArray gis_single_constraint_step(const ProbArray& q, const NormalizedMoment& nm);

struct GisProjection {
    ProbArray result;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Repeats GIS steps until successive iterates differ by less than
/// `inner_eps` in max-norm, or `max_iterations` steps were taken.
GisProjection gis_project(const ProbArray& q, const GisFamily& family, double inner_eps, std::size_t max_iterations);
GisProjection gis_project(const ProbArray& q, const NormalizedMoment& nm, double inner_eps,
                          std::size_t max_iterations);

/// Lambda(lambda) = sum_{i in B} h_i q_i e^{lambda h_i} / sum_i q_i e^{lambda h_i},
/// B = supp(q) and supp(h), with exponents shifted by their maximum over supp(q).
double lambda_fn(const ProbArray& q, const MomentArray& h, double lambda);

struct TiltProjection {
    ProbArray result;
    double lambda = 0.0;
    int evaluations = 0;
};

/// I-projection onto {p : sum_i p_i h_i = target} by exponential tilting,
/// with lambda found by bracket doubling from [-1, 1] and bisection.
TiltProjection exp_tilt_project(const ProbArray& q, const MomentConstraint& mc, const TiltSolveConfig& cfg = {});

/// Whether h is non-constant on supp(q) and supp(h).
bool moment_varies_on_support(const ProbArray& q, const MomentConstraint& mc);

}  // namespace mincop
