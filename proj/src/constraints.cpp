#include "mincop/constraints.hpp"

#include "mincop/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mincop {

std::string constraint_name(char prefix, const Axes& axes) {
    std::string name(1, prefix);
    for (std::size_t a : axes) name += "_" + std::to_string(a + 1);
    return name;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t out = 1;
    for (std::size_t k = 0; k < exp; ++k) out *= base;
    return out;
}

// Values of `lifted` on the cells whose coordinates outside K are all zero,
// in row-major order over [n]^{|K|}.
std::vector<double> restrict_to_axes(const MomentArray& lifted, const Axes& axes) {
    const GridShape& shape = lifted.shape();
    const GridShape sub(axes.size(), shape.n());
    std::vector<double> reduced(sub.size());
    MultiIndex full(shape.dims(), 0);
    for (std::size_t s = 0; s < sub.size(); ++s) {
        const auto k = unravel(sub, s);
        for (std::size_t j = 0; j < axes.size(); ++j) full[axes[j]] = k[j];
        reduced[s] = lifted.at(full);
    }
    return reduced;
}

MomentArray lift(const GridShape& shape, const Axes& axes, std::span<const double> reduced) {
    const auto strides = projected_strides(shape, axes);
    std::vector<double> values(shape.size());
    for_each_cell(shape, strides, [&](std::size_t linear, std::size_t sub) { values[linear] = reduced[sub]; });
    return {shape, std::move(values)};
}

}  // namespace

MarginConstraint::MarginConstraint(Axes axes, ProbArray target) : axes_(std::move(axes)), target_(std::move(target)) {
    if (axes_.empty()) fail(ErrorKind::InvalidAxes, "margin constraint with an empty coordinate set");
    for (std::size_t k = 1; k < axes_.size(); ++k) {
        if (axes_[k] <= axes_[k - 1]) fail(ErrorKind::InvalidAxes, "margin coordinates must be strictly increasing");
    }
    if (target_.shape().dims() != axes_.size()) {
        fail(ErrorKind::ShapeError, name() + " target has " + std::to_string(target_.shape().dims()) +
                                        " dimensions, expected " + std::to_string(axes_.size()));
    }
    if (axes_.size() >= 2) {
        const auto check = is_copula_array(target_, 1e-10);
        if (!check.is_copula) {
            fail(ErrorKind::InvalidArray,
                 name() + " target is not a copula array (margin error " + fmt(check.max_error) + ")");
        }
    } else {
        const double u = 1.0 / static_cast<double>(target_.shape().n());
        for (double v : target_.values()) {
            if (v != u) fail(ErrorKind::InvalidArray, name() + " singleton target must be uniform");
        }
    }
}

MarginConstraint MarginConstraint::uniform_singleton(std::size_t axis, std::size_t n) {
    return {Axes{axis}, ProbArray::uniform(GridShape(1, n))};
}

MomentConstraint::MomentConstraint(Axes axes, MomentArray lifted, double target)
    : axes_(std::move(axes)), lifted_(std::move(lifted)), target_(target) {
    validate_axes(lifted_.shape(), axes_);
    if (axes_.size() < 2) fail(ErrorKind::InvalidAxes, "moment constraints need |K| >= 2");
    if (!std::isfinite(target_)) fail(ErrorKind::InvalidParameter, name() + " target is not finite");
    reduced_ = restrict_to_axes(lifted_, axes_);
    const auto strides = projected_strides(lifted_.shape(), axes_);
    bool constant_off_axes = true;
    for_each_cell(lifted_.shape(), strides, [&](std::size_t linear, std::size_t sub) {
        if (lifted_[linear] != reduced_[sub]) constant_off_axes = false;
    });
    if (!constant_off_axes) {
        fail(ErrorKind::InvalidArray, name() + " moment array varies along coordinates outside K");
    }
}

MomentConstraint MomentConstraint::from_reduced(const GridShape& shape, Axes axes, std::span<const double> reduced,
                                                double target) {
    validate_axes(shape, axes);
    if (reduced.size() != ipow(shape.n(), axes.size())) {
        fail(ErrorKind::ShapeError, "reduced moment array has the wrong size");
    }
    auto lifted = lift(shape, axes, reduced);
    return {std::move(axes), std::move(lifted), target};
}

NormalizedMoment normalize_moment(const MomentConstraint& mc) {
    const auto h = mc.moment().values();
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    const double shift = std::min(*lo, mc.target());
    const double top = std::max(*hi, mc.target());
    const double span = top - shift;
    if (!(span > 0.0)) {
        fail(ErrorKind::DegenerateMoment, mc.name() + " has a constant moment array equal to its target");
    }
    std::vector<double> hbar(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) hbar[i] = std::clamp((h[i] - shift) / span, 0.0, 1.0);
    std::vector<double> reduced(mc.reduced().size());
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        reduced[i] = std::clamp((mc.reduced()[i] - shift) / span, 0.0, 1.0);
    }
    const double abar = std::clamp((mc.target() - shift) / span, 0.0, 1.0);
    return {mc.axes(), MomentArray(mc.moment().shape(), std::move(hbar)), std::move(reduced), abar, shift, span};
}

ProblemSpec::ProblemSpec(GridShape shape, std::optional<ProbArray> reference)
    : shape_(shape), reference_(reference ? std::move(*reference) : ProbArray::uniform(shape)) {
    if (shape_.dims() < 2) fail(ErrorKind::InvalidProblem, "problems need d >= 2");
    if (!(reference_.shape() == shape_)) fail(ErrorKind::ShapeError, "reference array does not match the grid");
    for (std::size_t a = 0; a < shape_.dims(); ++a) {
        margins_.push_back(MarginConstraint::uniform_singleton(a, shape_.n()));
    }
}

bool ProblemSpec::uses_axes(const Axes& axes) const {
    return std::any_of(margins_.begin(), margins_.end(), [&](const auto& m) { return m.axes() == axes; }) ||
           std::any_of(moments_.begin(), moments_.end(), [&](const auto& m) { return m.axes() == axes; });
}

void ProblemSpec::add_margin(MarginConstraint mc) {
    validate_axes(shape_, mc.axes());
    if (mc.axes().size() < 2) {
        fail(ErrorKind::InvalidProblem, "singleton margins are fixed to uniform and cannot be supplied");
    }
    if (mc.target().shape().n() != shape_.n()) fail(ErrorKind::ShapeError, mc.name() + " target has the wrong n");
    if (uses_axes(mc.axes())) {
        fail(ErrorKind::InvalidProblem, mc.name() + " coordinate set is already constrained");
    }
    margins_.push_back(std::move(mc));
}

void ProblemSpec::add_moment(MomentConstraint mc) {
    if (!(mc.moment().shape() == shape_)) fail(ErrorKind::ShapeError, mc.name() + " moment array has the wrong grid");
    const bool fixed = std::any_of(margins_.begin(), margins_.end(),
                                   [&](const auto& m) { return m.axes() == mc.axes(); });
    if (fixed) fail(ErrorKind::InvalidProblem, mc.name() + " coordinate set already has a fixed margin");
    moments_.push_back(std::move(mc));
}

std::vector<std::string> ProblemSpec::constraint_names() const {
    std::vector<std::string> names;
    for (const auto& m : margins_) names.push_back(m.name());
    for (const auto& m : moments_) names.push_back(m.name());
    return names;
}

MomentArray spearman_moment_array(const GridShape& shape, const Axes& axes) {
    if (axes.size() != 2) fail(ErrorKind::InvalidAxes, "Spearman moment arrays need |K| = 2");
    validate_axes(shape, axes);
    const std::size_t n = shape.n();
    const double nd = static_cast<double>(n);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = (2.0 * static_cast<double>(i) + 1.0 - nd) / (2.0 * nd);
    std::vector<double> reduced(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) reduced[i * n + j] = 12.0 * centered[i] * centered[j];
    }
    return lift(shape, axes, reduced);
}

MomentArray spearman_moment_array(const GridShape& shape) {
    if (shape.dims() != 2) fail(ErrorKind::InvalidAxes, "pass K explicitly when d != 2");
    return spearman_moment_array(shape, Axes{0, 1});
}

double spearman_of_array(const ProbArray& p) {
    if (p.shape().dims() != 2) fail(ErrorKind::ShapeError, "Spearman's rho needs a bivariate array");
    return expectation(p, spearman_moment_array(p.shape()));
}

MomentArray generic_moment_array(const std::function<double(std::span<const double>)>& g, const Axes& axes,
                                 const GridShape& shape, std::size_t subdivisions) {
    validate_axes(shape, axes);
    if (subdivisions < 1) fail(ErrorKind::InvalidParameter, "quadrature needs at least one node per axis");
    const std::size_t k = axes.size();
    const std::size_t n = shape.n();
    const GridShape cells(k, n);
    const std::size_t node_count = ipow(subdivisions, k);
    const double h = 1.0 / (static_cast<double>(n) * static_cast<double>(subdivisions));

    std::vector<double> reduced(cells.size());
    std::vector<double> point(k);
    std::vector<std::size_t> node(k);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto i = unravel(cells, c);
        long double acc = 0.0L;
        for (std::size_t m = 0; m < node_count; ++m) {
            std::size_t rest = m;
            for (std::size_t a = k; a-- > 0;) {
                node[a] = rest % subdivisions;
                rest /= subdivisions;
            }
            for (std::size_t a = 0; a < k; ++a) {
                point[a] = (static_cast<double>(i[a] * subdivisions + node[a]) + 0.5) * h;
            }
            const double value = g(point);
            if (!std::isfinite(value)) fail(ErrorKind::NumericalError, "moment function is not finite at a node");
            acc += value;
        }
        reduced[c] = static_cast<double>(acc / static_cast<long double>(node_count));
    }
    return lift(shape, axes, reduced);
}

RhoRange rho_range_check(double target, std::size_t n) {
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    RhoRange out{true, -1.0 + 1.0 / n2, 1.0 - 1.0 / n2};
    out.ok = target >= out.lower && target <= out.upper;
    return out;
}

double moment_value(const ProbArray& p, const MomentConstraint& mc) {
    const auto margin_sums = marginal_sums(p.shape(), p.values(), mc.axes());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < margin_sums.size(); ++i) acc += static_cast<long double>(margin_sums[i]) * mc.reduced()[i];
    return static_cast<double>(acc);
}

double margin_error(const ProbArray& p, const MarginConstraint& mc) {
    const auto sums = marginal_sums(p.shape(), p.values(), mc.axes());
    return max_abs_diff(sums, mc.target().values());
}

std::vector<ConstraintResidual> residuals(const ProbArray& p, const ProblemSpec& spec) {
    if (!(p.shape() == spec.shape())) fail(ErrorKind::ShapeError, "array does not match the problem grid");
    std::vector<ConstraintResidual> out;
    for (const auto& m : spec.margins()) out.push_back({m.name(), false, margin_error(p, m), 0.0, 0.0});
    for (const auto& m : spec.moments()) {
        const double value = moment_value(p, m);
        out.push_back({m.name(), true, std::fabs(value - m.target()), value, m.target()});
    }
    return out;
}

}  // namespace mincop
