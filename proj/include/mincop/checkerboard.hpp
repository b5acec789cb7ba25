#pragma once

#include "mincop/prob_array.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mincop {

/// Parametric copula families used to build constraint skeletons.
namespace family {
struct Independence {
    std::size_t dims = 2;
};
/// M(u, v) = min(u, v); bivariate only.
struct Comonotone {};
/// Bivariate normal copula with Pearson parameter in (-1, 1).
struct Gaussian {
    double pearson = 0.0;
};
/// Clayton copula, theta > 0.
struct Clayton {
    double theta = 1.0;
};
/// Gumbel-Hougaard copula, theta >= 1.
struct Gumbel {
    double theta = 1.0;
};
}  // namespace family

using CopulaFamily =
    std::variant<family::Independence, family::Comonotone, family::Gaussian, family::Clayton, family::Gumbel>;

/// Throws InvalidParameter if the family parameter is outside its domain.
void validate_family(const CopulaFamily& copula);
std::size_t family_dims(const CopulaFamily& copula);
std::string family_name(const CopulaFamily& copula);

/// Parses a family tag ("independence", "comonotone", "gaussian", "clayton",
/// "gumbel"); the parameter is ignored for the parameter-free families.
CopulaFamily make_family(const std::string& name, double param, std::size_t dims = 2);

/// Copula distribution function C(v) at a point of [0,1]^d.
double copula_cdf(const CopulaFamily& copula, std::span<const double> point);

/// Skeleton of the checkerboard approximation: cell i receives the C-volume of
/// B_i, computed by inclusion-exclusion over the cell corners. Rounding
/// negatives down to -1e-13 are clamped to zero and the array renormalized
/// once; larger negatives raise NumericalError.
ProbArray skeleton_from_copula(const CopulaFamily& copula, const GridShape& shape);

/// Checkerboard copula with a given skeleton (uniform margins within 1e-10).
class CheckerboardModel {
public:
    explicit CheckerboardModel(ProbArray skeleton);

    [[nodiscard]] const ProbArray& skeleton() const noexcept { return skeleton_; }

    /// Integral of the checkerboard density over [0, v]. The distribution
    /// function is multilinear inside every cell, so this interpolates the
    /// cached cumulative sums at the 2^d cell corners.
    [[nodiscard]] double cdf(std::span<const double> point) const;

private:
    ProbArray skeleton_;
    std::vector<double> cumulative_;  // over [0..n]^d, row-major
};

double checkerboard_cdf(const CheckerboardModel& model, std::span<const double> point);

/// Max over `points` of |checkerboard cdf - copula cdf| for the family's
/// checkerboard approximation on `shape`. Each point has shape.dims() coordinates.
double approximation_gap(const CopulaFamily& copula, const GridShape& shape,
                         std::span<const std::vector<double>> points);

/// Regular grid of m^d points covering [0,1]^d including the faces.
std::vector<std::vector<double>> regular_test_grid(std::size_t dims, std::size_t m);

enum class SampleMode { CellCenters, Continuous };

/// Draws `count` points from a probability array. Cells are chosen by
/// inverse-CDF over the linear index; every draw consumes 64-bit words from
/// std::mt19937_64 seeded with `seed`, mapped to [0,1) as (word >> 11) * 2^-53.
/// CellCenters returns cell midpoints; Continuous adds one uniform offset per
/// coordinate inside the cell.
std::vector<std::vector<double>> sample(const ProbArray& p, std::size_t count, std::uint64_t seed, SampleMode mode);
std::vector<std::vector<double>> sample(const CheckerboardModel& model, std::size_t count, std::uint64_t seed,
                                        SampleMode mode);

/// Pearson parameter of the bivariate normal copula whose Spearman's rho is rho_s: 2 sin(pi rho_s / 6).
double gaussian_rho_to_pearson(double spearman_rho);

}  // namespace mincop
