#include "mincop/projections.hpp"

#include "mincop/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mincop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Multiplies q by a factor that depends only on the cells' K-coordinates and
// renormalizes if requested. Cells outside supp(q) stay exactly zero.
std::vector<double> scale_by_fiber(const ProbArray& q, const Axes& axes, std::span<const double> factor) {
    const auto strides = projected_strides(q.shape(), axes);
    std::vector<double> out(q.size());
    const auto values = q.values();
    for_each_cell(q.shape(), strides, [&](std::size_t linear, std::size_t sub) {
        const double qi = values[linear];
        out[linear] = qi == 0.0 ? 0.0 : qi * factor[sub];
    });
    return out;
}

void renormalize(std::vector<double>& values) {
    long double total = 0.0L;
    for (double v : values) total += v;
    if (!(total > 0.0L)) fail(ErrorKind::NumericalError, "projection produced an array with zero mass");
    for (double& v : values) v = static_cast<double>(v / total);
}

// One GIS factor (a / S)^e with 0/0 = 0 and 0^0 = 1. S == 0 with a > 0 only
// happens on fibers outside supp(q), whose cells are zero anyway.
double gis_factor(double a, long double s, double e) {
    if (e == 0.0) return 1.0;
    if (a == 0.0) return 0.0;
    if (s == 0.0L) return kInf;
    return std::pow(static_cast<double>(a / s), e);
}

// Lambda and tilt evaluation on the K-margin of q.
class ReducedTilt {
public:
    ReducedTilt(const ProbArray& q, const MomentConstraint& mc)
        : mass_(marginal_sums(q.shape(), q.values(), mc.axes())), h_(mc.reduced().begin(), mc.reduced().end()) {
        for (std::size_t c = 0; c < h_.size(); ++c) {
            if (mass_[c] > 0.0) {
                support_lo_ = std::min(support_lo_, h_[c]);
                support_hi_ = std::max(support_hi_, h_[c]);
                if (h_[c] != 0.0) {
                    active_lo_ = std::min(active_lo_, h_[c]);
                    active_hi_ = std::max(active_hi_, h_[c]);
                }
            }
            max_abs_h_ = std::max(max_abs_h_, std::fabs(h_[c]));
        }
    }

    [[nodiscard]] bool varies_on_active() const { return active_lo_ < active_hi_; }
    [[nodiscard]] double support_lo() const { return support_lo_; }
    [[nodiscard]] double support_hi() const { return support_hi_; }
    [[nodiscard]] double max_abs_h() const { return max_abs_h_; }

    [[nodiscard]] double shift(double lambda) const {
        double m = -kInf;
        for (std::size_t c = 0; c < h_.size(); ++c) {
            if (mass_[c] > 0.0) m = std::max(m, lambda * h_[c]);
        }
        return m;
    }

    [[nodiscard]] double operator()(double lambda) const {
        const double m = shift(lambda);
        long double num = 0.0L;
        long double den = 0.0L;
        for (std::size_t c = 0; c < h_.size(); ++c) {
            if (mass_[c] == 0.0) continue;
            const long double w = static_cast<long double>(mass_[c]) * std::exp(lambda * h_[c] - m);
            den += w;
            num += w * h_[c];
        }
        return static_cast<double>(num / den);
    }

    [[nodiscard]] std::vector<double> weights(double lambda) const {
        const double m = shift(lambda);
        std::vector<double> w(h_.size());
        for (std::size_t c = 0; c < h_.size(); ++c) w[c] = std::exp(lambda * h_[c] - m);
        return w;
    }

private:
    std::vector<double> mass_;
    std::vector<double> h_;
    double support_lo_ = kInf;
    double support_hi_ = -kInf;
    double active_lo_ = kInf;
    double active_hi_ = -kInf;
    double max_abs_h_ = 0.0;
};

}  // namespace

void TiltSolveConfig::validate() const {
    if (!(root_tolerance > 0.0) || !(lambda_tolerance > 0.0) || !(overflow_budget > 0.0) || max_doublings < 1) {
        fail(ErrorKind::InvalidParameter, "tilt solver tolerances must be strictly positive");
    }
}

ProbArray partition_scaling(const ProbArray& q, std::span<const std::size_t> block_of_cell,
                            std::span<const double> targets) {
    if (block_of_cell.size() != q.size()) fail(ErrorKind::ShapeError, "partition does not cover the grid");
    long double target_total = 0.0L;
    for (double t : targets) {
        if (!(t >= 0.0)) fail(ErrorKind::InvalidParameter, "partition targets must be nonnegative");
        target_total += t;
    }
    if (std::fabs(static_cast<double>(target_total) - 1.0) > kMassTolerance) {
        fail(ErrorKind::InvalidParameter, "partition targets must sum to 1");
    }

    std::vector<long double> mass(targets.size(), 0.0L);
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (block_of_cell[i] >= targets.size()) fail(ErrorKind::InvalidParameter, "block label without a target");
        mass[block_of_cell[i]] += q[i];
    }
    std::vector<double> factor(targets.size(), 0.0);
    for (std::size_t b = 0; b < targets.size(); ++b) {
        if (mass[b] == 0.0L) {
            if (targets[b] > 0.0) {
                fail(ErrorKind::InfeasibleScaling,
                     "block " + std::to_string(b) + " has zero mass but a positive target");
            }
            continue;
        }
        factor[b] = static_cast<double>(targets[b] / mass[b]);
    }
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = q[i] == 0.0 ? 0.0 : q[i] * factor[block_of_cell[i]];
    return {q.shape(), std::move(out)};
}

ProbArray marginal_scaling(const ProbArray& q, const Axes& axes, const ProbArray& target) {
    validate_axes(q.shape(), axes);
    const std::string name = constraint_name('J', axes);
    if (target.shape().n() != q.shape().n() || target.shape().dims() != axes.size()) {
        fail(ErrorKind::ShapeError, name + " target does not match the grid");
    }
    const auto current = marginal_sums(q.shape(), q.values(), axes);
    std::vector<double> ratio(current.size(), 0.0);
    for (std::size_t c = 0; c < current.size(); ++c) {
        if (current[c] > 0.0) {
            ratio[c] = target[c] / current[c];
        } else if (target[c] > 0.0) {
            fail(ErrorKind::InfeasibleScaling, name + " target is positive where the current margin vanishes");
        }
    }
    return {q.shape(), scale_by_fiber(q, axes, ratio)};
}

ProbArray marginal_scaling(const ProbArray& q, const MarginConstraint& mc) {
    return marginal_scaling(q, mc.axes(), mc.target());
}

void GisFamily::validate() const {
    if (hbar.empty() || hbar.size() != abar.size()) {
        fail(ErrorKind::InvalidGISFamily, "family needs one target per array");
    }
    const GridShape& shape = hbar.front().shape();
    long double target_total = 0.0L;
    for (std::size_t k = 0; k < hbar.size(); ++k) {
        if (!(hbar[k].shape() == shape)) fail(ErrorKind::InvalidGISFamily, "family arrays differ in shape");
        if (!(abar[k] >= 0.0 && abar[k] <= 1.0)) fail(ErrorKind::InvalidGISFamily, "targets must lie in [0,1]");
        target_total += abar[k];
    }
    if (std::fabs(static_cast<double>(target_total) - 1.0) > kMassTolerance) {
        fail(ErrorKind::InvalidGISFamily, "targets must sum to 1");
    }
    for (std::size_t i = 0; i < shape.size(); ++i) {
        long double row = 0.0L;
        for (const auto& h : hbar) {
            if (h[i] < 0.0) fail(ErrorKind::InvalidGISFamily, "family arrays must be nonnegative");
            row += h[i];
        }
        if (std::fabs(static_cast<double>(row) - 1.0) > 1e-12) {
            fail(ErrorKind::InvalidGISFamily, "family arrays do not sum to one at cell " + std::to_string(i));
        }
    }
}

ProbArray gis_step(const ProbArray& q, const GisFamily& family) {
    family.validate();
    if (!(family.hbar.front().shape() == q.shape())) fail(ErrorKind::ShapeError, "family does not match the array");
    const std::size_t c = family.hbar.size();
    std::vector<long double> sums(c, 0.0L);
    for (std::size_t k = 0; k < c; ++k) {
        for (std::size_t i = 0; i < q.size(); ++i) sums[k] += static_cast<long double>(q[i]) * family.hbar[k][i];
    }
    std::vector<double> out(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;
        double v = q[i];
        for (std::size_t k = 0; k < c; ++k) v *= gis_factor(family.abar[k], sums[k], family.hbar[k][i]);
        out[i] = v;
    }
    renormalize(out);
    return {q.shape(), std::move(out)};
}

ProbArray gis_single_constraint_step(const ProbArray& q, const NormalizedMoment& nm) {
    if (!(nm.abar >= 0.0 && nm.abar <= 1.0)) fail(ErrorKind::InvalidGISFamily, "normalized target outside [0,1]");
    if (!(nm.hbar.shape() == q.shape())) fail(ErrorKind::ShapeError, "normalized moment does not match the array");
    const auto mass = marginal_sums(q.shape(), q.values(), nm.axes);
    long double s1 = 0.0L;
    long double s0 = 0.0L;
    for (std::size_t c = 0; c < mass.size(); ++c) {
        s1 += static_cast<long double>(mass[c]) * nm.reduced[c];
        s0 += static_cast<long double>(mass[c]) * (1.0 - nm.reduced[c]);
    }
    std::vector<double> factor(mass.size());
    for (std::size_t c = 0; c < mass.size(); ++c) {
        const double e = nm.reduced[c];
        factor[c] = gis_factor(nm.abar, s1, e) * gis_factor(1.0 - nm.abar, s0, 1.0 - e);
    }
    auto out = scale_by_fiber(q, nm.axes, factor);
    renormalize(out);
    return {q.shape(), std::move(out)};
}

namespace {

template <class Step>
GisProjection iterate_gis(const ProbArray& q, double inner_eps, std::size_t max_iterations, Step&& step) {
    if (!(inner_eps > 0.0) || max_iterations < 1) fail(ErrorKind::InvalidParameter, "GIS needs eps > 0 and M' >= 1");
    GisProjection out{q, false, 0};
    for (std::size_t m = 1; m <= max_iterations; ++m) {
        ProbArray next = step(out.result);
        const double change = max_abs_diff(next, out.result);
        out.result = std::move(next);
        out.iterations = m;
        if (change < inner_eps) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace

GisProjection gis_project(const ProbArray& q, const GisFamily& family, double inner_eps,
                          std::size_t max_iterations) {
    return iterate_gis(q, inner_eps, max_iterations, [&](const ProbArray& x) { return gis_step(x, family); });
}

GisProjection gis_project(const ProbArray& q, const NormalizedMoment& nm, double inner_eps,
                          std::size_t max_iterations) {
    return iterate_gis(q, inner_eps, max_iterations,
                       [&](const ProbArray& x) { return gis_single_constraint_step(x, nm); });
}

double lambda_fn(const ProbArray& q, const MomentArray& h, double lambda) {
    if (!(q.shape() == h.shape())) fail(ErrorKind::ShapeError, "moment array does not match the array");
    double m = -kInf;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0) m = std::max(m, lambda * h[i]);
    }
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;
        const long double w = static_cast<long double>(q[i]) * std::exp(lambda * h[i] - m);
        den += w;
        if (h[i] != 0.0) num += w * h[i];
    }
    return static_cast<double>(num / den);
}

bool moment_varies_on_support(const ProbArray& q, const MomentConstraint& mc) {
    return ReducedTilt(q, mc).varies_on_active();
}

TiltProjection exp_tilt_project(const ProbArray& q, const MomentConstraint& mc, const TiltSolveConfig& cfg) {
    cfg.validate();
    if (!(mc.moment().shape() == q.shape())) fail(ErrorKind::ShapeError, mc.name() + " does not match the array");
    const ReducedTilt tilt(q, mc);
    const double target = mc.target();
    int evaluations = 0;
    auto lambda_minus_target = [&](double lambda) {
        ++evaluations;
        return tilt(lambda) - target;
    };

    if (!tilt.varies_on_active()) {
        if (std::fabs(lambda_minus_target(0.0)) <= cfg.root_tolerance) return {q, 0.0, evaluations};
        fail(ErrorKind::DegenerateMoment, mc.name() + " is constant on the support of the current array");
    }
    // The attainable values of Lambda form the open interval between the
    // extreme moment values over supp(q).
    if (!(target > tilt.support_lo() && target < tilt.support_hi())) {
        fail(ErrorKind::TargetOutOfRange, mc.name() + " target outside the attainable moment range");
    }

    const double cap = cfg.overflow_budget / tilt.max_abs_h();
    double lo = -1.0;
    double hi = 1.0;
    double f_lo = lambda_minus_target(lo);
    double f_hi = lambda_minus_target(hi);
    for (int k = 0; f_hi < 0.0; ++k) {
        if (hi >= cap || k >= cfg.max_doublings) {
            fail(ErrorKind::TargetOutOfRange, mc.name() + " root bracket exceeded the lambda cap");
        }
        lo = hi;
        f_lo = f_hi;
        hi = std::min(2.0 * hi, cap);
        f_hi = lambda_minus_target(hi);
    }
    for (int k = 0; f_lo > 0.0; ++k) {
        if (lo <= -cap || k >= cfg.max_doublings) {
            fail(ErrorKind::TargetOutOfRange, mc.name() + " root bracket exceeded the lambda cap");
        }
        hi = lo;
        f_hi = f_lo;
        lo = std::max(2.0 * lo, -cap);
        f_lo = lambda_minus_target(lo);
    }

    double root = std::fabs(f_lo) <= std::fabs(f_hi) ? lo : hi;
    if (std::fabs(f_lo) > cfg.root_tolerance && std::fabs(f_hi) > cfg.root_tolerance) {
        for (int iter = 0; iter < 400; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = lambda_minus_target(mid);
            root = mid;
            if (std::fabs(f_mid) <= cfg.root_tolerance) break;
            if (f_mid < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo <= cfg.lambda_tolerance * std::max(1.0, std::fabs(mid))) break;
        }
    }

    auto out = scale_by_fiber(q, mc.axes(), tilt.weights(root));
    renormalize(out);
    return {ProbArray(q.shape(), std::move(out)), root, evaluations};
}

}  // namespace mincop
