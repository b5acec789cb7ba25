#pragma once

#include "mincop/prob_array.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mincop {

/// Display name of a coordinate set, e.g. "J_1_2" or "K_2_3" (1-based).
std::string constraint_name(char prefix, const Axes& axes);

/// Fixed J-margin: p^(J) = target.
class MarginConstraint {
public:
    /// |J| >= 2 targets must be copula arrays within 1e-10.
    MarginConstraint(Axes axes, ProbArray target);

    /// Singleton constraint {axis} with the exactly uniform target.
    static MarginConstraint uniform_singleton(std::size_t axis, std::size_t n);

    [[nodiscard]] const Axes& axes() const noexcept { return axes_; }
    [[nodiscard]] const ProbArray& target() const noexcept { return target_; }
    [[nodiscard]] std::string name() const { return constraint_name('J', axes_); }

private:
    Axes axes_;
    ProbArray target_;
};

/// Expectation constraint sum_i p_i h_i = target, with h depending only on
/// the coordinates in K (|K| >= 2). The lifted array over the full grid is
/// kept alongside its restriction to [n]^{|K|}.
class MomentConstraint {
public:
    /// Validates that `lifted` is constant along every axis outside K.
    MomentConstraint(Axes axes, MomentArray lifted, double target);

    /// Lifts an array over [n]^{|K|} to `shape`.
    static MomentConstraint from_reduced(const GridShape& shape, Axes axes, std::span<const double> reduced,
                                         double target);

    [[nodiscard]] const Axes& axes() const noexcept { return axes_; }
    [[nodiscard]] const MomentArray& moment() const noexcept { return lifted_; }
    [[nodiscard]] std::span<const double> reduced() const noexcept { return reduced_; }
    [[nodiscard]] double target() const noexcept { return target_; }
    [[nodiscard]] std::string name() const { return constraint_name('K', axes_); }

private:
    Axes axes_;
    MomentArray lifted_;
    std::vector<double> reduced_;
    double target_;
};

/// Moment constraint rescaled to [0,1] for generalized iterative scaling.
struct NormalizedMoment {
    Axes axes;
    MomentArray hbar;              ///< (h - shift) / span, lifted
    std::vector<double> reduced;   ///< hbar over [n]^{|K|}
    double abar = 0.0;
    double shift = 0.0;            ///< min(min_i h_i, target)
    double span = 1.0;             ///< max(max_i h_i, target) - shift
};

/// Throws DegenerateMoment when h is constant and equal to the target.
NormalizedMoment normalize_moment(const MomentConstraint& mc);

/// The feasible set: reference array, fixed margins and expectation constraints.
class ProblemSpec {
public:
    /// d >= 2. The singleton margins {1}..{d} with uniform targets are inserted here.
    ProblemSpec(GridShape shape, std::optional<ProbArray> reference = std::nullopt);

    /// |J| >= 2; duplicates and sets already used by a moment are rejected.
    void add_margin(MarginConstraint mc);
    void add_moment(MomentConstraint mc);

    [[nodiscard]] const GridShape& shape() const noexcept { return shape_; }
    [[nodiscard]] const ProbArray& reference() const noexcept { return reference_; }
    /// Singletons first (axis order), then user margins in declaration order.
    [[nodiscard]] const std::vector<MarginConstraint>& margins() const noexcept { return margins_; }
    [[nodiscard]] const std::vector<MomentConstraint>& moments() const noexcept { return moments_; }
    /// Names in cycle order: margins then moments.
    [[nodiscard]] std::vector<std::string> constraint_names() const;

private:
    bool uses_axes(const Axes& axes) const;

    GridShape shape_;
    ProbArray reference_;
    std::vector<MarginConstraint> margins_;
    std::vector<MomentConstraint> moments_;
};

/// h_i = 12 (c(i_a) - 1/2)(c(i_b) - 1/2) with c(i) the cell midpoint, for K = {a, b}.
MomentArray spearman_moment_array(const GridShape& shape, const Axes& axes);
/// The d = 2 case with K = {1, 2}.
MomentArray spearman_moment_array(const GridShape& shape);

/// Checkerboard Spearman's rho of a bivariate array, sum_i p_i h^rho_i.
double spearman_of_array(const ProbArray& p);

/// n^{|K|} times the integral of g over each K-cell, by tensor midpoint rule
/// with `subdivisions` nodes per axis and cell; lifted to `shape`.
MomentArray generic_moment_array(const std::function<double(std::span<const double>)>& g, const Axes& axes,
                                 const GridShape& shape, std::size_t subdivisions);

struct RhoRange {
    bool ok = true;
    double lower = 0.0;  ///< -1 + 1/n^2
    double upper = 0.0;  ///< 1 - 1/n^2
};

/// Whether a Spearman target is attainable by some bivariate checkerboard copula on [n]^2.
RhoRange rho_range_check(double target, std::size_t n);

struct ConstraintResidual {
    std::string name;
    bool is_moment = false;
    double error = 0.0;  ///< max-norm margin error, or |moment - target|
    double value = 0.0;  ///< moment value (moments only)
    double target = 0.0;
};

/// One residual per constraint, in cycle order.
std::vector<ConstraintResidual> residuals(const ProbArray& p, const ProblemSpec& spec);

/// Sum_i p_i h_i computed through the K-margin of p.
double moment_value(const ProbArray& p, const MomentConstraint& mc);
double margin_error(const ProbArray& p, const MarginConstraint& mc);

}  // namespace mincop
