#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mincop {

/// Zero-based coordinate set, strictly increasing.
using Axes = std::vector<std::size_t>;
/// Zero-based cell index, one entry per axis.
using MultiIndex = std::vector<std::size_t>;

/// Absolute tolerance on the total mass of a probability array.
inline constexpr double kMassTolerance = 1e-12;

/// The grid [n]^d: d axes with n cells each.
class GridShape {
public:
    static constexpr std::size_t kDefaultCellCap = std::size_t{1} << 31;

    GridShape(std::size_t d, std::size_t n, std::size_t cell_cap = kDefaultCellCap);

    [[nodiscard]] std::size_t dims() const noexcept { return d_; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    /// Number of cells, n^d.
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    /// Row-major stride of axis k (the last axis has stride 1).
    [[nodiscard]] std::size_t stride(std::size_t axis) const noexcept;

    friend bool operator==(const GridShape&, const GridShape&) = default;

private:
    std::size_t d_;
    std::size_t n_;
    std::size_t size_;
};

std::string to_string(const GridShape& shape);

/// Row-major linear index of a zero-based multi-index.
std::size_t linear_index(const GridShape& shape, std::span<const std::size_t> index);
/// Inverse of linear_index.
MultiIndex unravel(const GridShape& shape, std::size_t linear);

/// Throws InvalidAxes unless `axes` is nonempty, strictly increasing and within the shape.
void validate_axes(const GridShape& shape, const Axes& axes);

/// For every axis of `shape`, the stride of that axis inside the row-major
/// array over [n]^{|axes|}; zero for axes not in `axes`.
std::vector<std::size_t> projected_strides(const GridShape& shape, const Axes& axes);

/// Visits all cells in linear order, calling f(linear, sub) where `sub` is the
/// linear index of the cell restricted to the axes encoded by `sub_strides`.
template <class F>
void for_each_cell(const GridShape& shape, std::span<const std::size_t> sub_strides, F&& f) {
    const std::size_t d = shape.dims();
    const std::size_t n = shape.n();
    const std::size_t inner_stride = sub_strides[d - 1];
    std::vector<std::size_t> counter(d, 0);
    std::size_t sub_base = 0;
    std::size_t linear = 0;
    const std::size_t total = shape.size();
    while (linear < total) {
        std::size_t sub = sub_base;
        for (std::size_t i = 0; i < n; ++i, ++linear, sub += inner_stride) {
            f(linear, sub);
        }
        // odometer over the outer axes
        for (std::size_t k = d - 1; k-- > 0;) {
            if (++counter[k] < n) {
                sub_base += sub_strides[k];
                break;
            }
            counter[k] = 0;
            sub_base -= (n - 1) * sub_strides[k];
        }
    }
}

/// Sums `values` (laid out over `shape`) along every axis not in `axes`.
/// Accumulates in long double.
std::vector<double> marginal_sums(const GridShape& shape, std::span<const double> values,
                                  const Axes& axes);

/// Nonnegative array over [n]^d summing to one.
class ProbArray {
public:
    /// Validates nonnegativity and |sum - 1| <= kMassTolerance; never renormalizes.
    ProbArray(GridShape shape, std::vector<double> values);

    static ProbArray uniform(GridShape shape);
    /// Unit mass at one cell (zero-based index).
    static ProbArray point_mass(GridShape shape, std::span<const std::size_t> index);

    [[nodiscard]] const GridShape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t linear) const noexcept { return values_[linear]; }
    [[nodiscard]] double at(std::span<const std::size_t> index) const;
    [[nodiscard]] bool in_support(std::size_t linear) const noexcept { return values_[linear] > 0.0; }

    friend bool operator==(const ProbArray&, const ProbArray&) = default;

private:
    GridShape shape_;
    std::vector<double> values_;
};

/// Real-valued array over [n]^d with finite entries.
class MomentArray {
public:
    MomentArray(GridShape shape, std::vector<double> values);

    [[nodiscard]] const GridShape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t linear) const noexcept { return values_[linear]; }
    [[nodiscard]] double at(std::span<const std::size_t> index) const;

    friend bool operator==(const MomentArray&, const MomentArray&) = default;

private:
    GridShape shape_;
    std::vector<double> values_;
};

/// The J-margin p^(J), an array over [n]^{|J|}.
ProbArray margin(const ProbArray& p, const Axes& axes);

/// Discrete Kullback-Leibler divergence I(p || q); +infinity iff supp(p) is not inside supp(q).
double kl_divergence(const ProbArray& p, const ProbArray& q);

/// supp(p) subset of supp(q), with exact-zero support.
bool support_subset(const ProbArray& p, const ProbArray& q);

struct CopulaCheck {
    bool is_copula = false;
    double max_error = 0.0;  ///< max over axes and cells of |p^({l})_i - 1/n|
};

CopulaCheck is_copula_array(const ProbArray& p, double tol);

double max_abs_diff(const ProbArray& p, const ProbArray& q);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Sum_i p_i h_i, accumulated in long double.
double expectation(const ProbArray& p, const MomentArray& h);

}  // namespace mincop
