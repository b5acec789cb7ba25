#include "mincop/prob_array.hpp"

#include "mincop/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mincop {

GridShape::GridShape(std::size_t d, std::size_t n, std::size_t cell_cap) : d_(d), n_(n), size_(1) {
    if (d < 1) fail(ErrorKind::ShapeError, "grid needs at least one axis");
    if (n < 2) fail(ErrorKind::ShapeError, "grid resolution n must be at least 2, got " + std::to_string(n));
    for (std::size_t k = 0; k < d; ++k) {
        if (size_ > cell_cap / n) {
            fail(ErrorKind::ShapeError, "grid n^d = " + std::to_string(n) + "^" + std::to_string(d) +
                                            " exceeds the cell cap " + std::to_string(cell_cap));
        }
        size_ *= n;
    }
}

std::size_t GridShape::stride(std::size_t axis) const noexcept {
    std::size_t s = 1;
    for (std::size_t k = axis + 1; k < d_; ++k) s *= n_;
    return s;
}

std::string to_string(const GridShape& shape) {
    return "d=" + std::to_string(shape.dims()) + " n=" + std::to_string(shape.n());
}

std::size_t linear_index(const GridShape& shape, std::span<const std::size_t> index) {
    if (index.size() != shape.dims()) {
        fail(ErrorKind::ShapeError, "multi-index has " + std::to_string(index.size()) + " entries for " +
                                        to_string(shape));
    }
    std::size_t linear = 0;
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] >= shape.n()) fail(ErrorKind::ShapeError, "multi-index out of range");
        linear = linear * shape.n() + index[k];
    }
    return linear;
}

MultiIndex unravel(const GridShape& shape, std::size_t linear) {
    if (linear >= shape.size()) fail(ErrorKind::ShapeError, "linear index out of range");
    MultiIndex index(shape.dims());
    for (std::size_t k = shape.dims(); k-- > 0;) {
        index[k] = linear % shape.n();
        linear /= shape.n();
    }
    return index;
}

void validate_axes(const GridShape& shape, const Axes& axes) {
    if (axes.empty()) fail(ErrorKind::InvalidAxes, "coordinate set is empty");
    for (std::size_t k = 0; k < axes.size(); ++k) {
        if (axes[k] >= shape.dims()) {
            fail(ErrorKind::InvalidAxes, "coordinate " + std::to_string(axes[k] + 1) + " outside [1, " +
                                             std::to_string(shape.dims()) + "]");
        }
        if (k > 0 && axes[k] <= axes[k - 1]) {
            fail(ErrorKind::InvalidAxes, "coordinates must be strictly increasing");
        }
    }
}

std::vector<std::size_t> projected_strides(const GridShape& shape, const Axes& axes) {
    validate_axes(shape, axes);
    std::vector<std::size_t> strides(shape.dims(), 0);
    std::size_t s = 1;
    for (std::size_t j = axes.size(); j-- > 0;) {
        strides[axes[j]] = s;
        s *= shape.n();
    }
    return strides;
}

std::vector<double> marginal_sums(const GridShape& shape, std::span<const double> values, const Axes& axes) {
    if (values.size() != shape.size()) fail(ErrorKind::ShapeError, "value count does not match the grid");
    const auto strides = projected_strides(shape, axes);
    std::size_t out_size = 1;
    for (std::size_t j = 0; j < axes.size(); ++j) out_size *= shape.n();

    std::vector<long double> acc(out_size, 0.0L);
    for_each_cell(shape, strides, [&](std::size_t linear, std::size_t sub) { acc[sub] += values[linear]; });
    return {acc.begin(), acc.end()};
}

namespace {

void check_size(const GridShape& shape, std::size_t count) {
    if (count != shape.size()) {
        fail(ErrorKind::ShapeError, std::to_string(count) + " values supplied for a grid of " +
                                        std::to_string(shape.size()) + " cells");
    }
}

void check_same_shape(const GridShape& a, const GridShape& b) {
    if (!(a == b)) fail(ErrorKind::ShapeError, "shape mismatch: " + to_string(a) + " vs " + to_string(b));
}

}  // namespace

ProbArray::ProbArray(GridShape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
    check_size(shape_, values_.size());
    long double total = 0.0L;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            fail(ErrorKind::InvalidArray, "entry " + std::to_string(i) + " is negative or not finite");
        }
        total += v;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > kMassTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "entries sum to " << static_cast<double>(total) << ", not 1";
        fail(ErrorKind::InvalidArray, os.str());
    }
}

ProbArray ProbArray::uniform(GridShape shape) {
    std::vector<double> values(shape.size(), 1.0 / static_cast<double>(shape.size()));
    return {shape, std::move(values)};
}

ProbArray ProbArray::point_mass(GridShape shape, std::span<const std::size_t> index) {
    std::vector<double> values(shape.size(), 0.0);
    values[linear_index(shape, index)] = 1.0;
    return {shape, std::move(values)};
}

double ProbArray::at(std::span<const std::size_t> index) const { return values_[linear_index(shape_, index)]; }

MomentArray::MomentArray(GridShape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
    check_size(shape_, values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            fail(ErrorKind::InvalidArray, "moment entry " + std::to_string(i) + " is not finite");
        }
    }
}

double MomentArray::at(std::span<const std::size_t> index) const { return values_[linear_index(shape_, index)]; }

ProbArray margin(const ProbArray& p, const Axes& axes) {
    auto sums = marginal_sums(p.shape(), p.values(), axes);
    return {GridShape(axes.size(), p.shape().n()), std::move(sums)};
}

double kl_divergence(const ProbArray& p, const ProbArray& q) {
    check_same_shape(p.shape(), q.shape());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i];
        if (pi == 0.0) continue;
        const double qi = q[i];
        if (qi == 0.0) return std::numeric_limits<double>::infinity();
        acc += static_cast<long double>(pi) * std::log(static_cast<long double>(pi) / qi);
    }
    // rounding can leave a tiny negative value for p == q
    return std::max(0.0, static_cast<double>(acc));
}

bool support_subset(const ProbArray& p, const ProbArray& q) {
    check_same_shape(p.shape(), q.shape());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && q[i] == 0.0) return false;
    }
    return true;
}

CopulaCheck is_copula_array(const ProbArray& p, double tol) {
    const double target = 1.0 / static_cast<double>(p.shape().n());
    double worst = 0.0;
    for (std::size_t axis = 0; axis < p.shape().dims(); ++axis) {
        const auto sums = marginal_sums(p.shape(), p.values(), Axes{axis});
        for (double s : sums) worst = std::max(worst, std::fabs(s - target));
    }
    return {worst <= tol, worst};
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(ErrorKind::ShapeError, "arrays differ in size");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
    return worst;
}

double max_abs_diff(const ProbArray& p, const ProbArray& q) {
    check_same_shape(p.shape(), q.shape());
    return max_abs_diff(p.values(), q.values());
}

double expectation(const ProbArray& p, const MomentArray& h) {
    check_same_shape(p.shape(), h.shape());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) acc += static_cast<long double>(p[i]) * h[i];
    return static_cast<double>(acc);
}

}  // namespace mincop
