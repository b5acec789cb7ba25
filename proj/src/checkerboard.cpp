#include "mincop/checkerboard.hpp"

#include "mincop/error.hpp"
#include "mincop/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mincop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string format_param(double value) {
    std::ostringstream os;
    os << value;
    return os.str();
}

// Bivariate families share the boundary behaviour C(u,0)=0, C(u,1)=u.
template <class F>
double bivariate(std::span<const double> v, F&& interior) {
    const double u = v[0];
    const double w = v[1];
    if (u <= 0.0 || w <= 0.0) return 0.0;
    if (u >= 1.0) return std::min(w, 1.0);
    if (w >= 1.0) return u;
    return std::clamp(interior(u, w), 0.0, std::min(u, w));
}

}  // namespace

void validate_family(const CopulaFamily& copula) {
    std::visit(overloaded{
                   [](const family::Independence& f) {
                       if (f.dims < 1) fail(ErrorKind::InvalidParameter, "independence copula needs d >= 1");
                   },
                   [](const family::Comonotone&) {},
                   [](const family::Gaussian& f) {
                       if (!(f.pearson > -1.0 && f.pearson < 1.0)) {
                           fail(ErrorKind::InvalidParameter,
                                "gaussian parameter must lie in (-1, 1), got " + format_param(f.pearson));
                       }
                   },
                   [](const family::Clayton& f) {
                       if (!(f.theta > 0.0) || !std::isfinite(f.theta)) {
                           fail(ErrorKind::InvalidParameter,
                                "clayton parameter must be > 0, got " + format_param(f.theta));
                       }
                   },
                   [](const family::Gumbel& f) {
                       if (!(f.theta >= 1.0) || !std::isfinite(f.theta)) {
                           fail(ErrorKind::InvalidParameter,
                                "gumbel parameter must be >= 1, got " + format_param(f.theta));
                       }
                   },
               },
               copula);
}

std::size_t family_dims(const CopulaFamily& copula) {
    if (const auto* ind = std::get_if<family::Independence>(&copula)) return ind->dims;
    return 2;
}

std::string family_name(const CopulaFamily& copula) {
    return std::visit(overloaded{
                          [](const family::Independence&) -> std::string { return "independence"; },
                          [](const family::Comonotone&) -> std::string { return "comonotone"; },
                          [](const family::Gaussian& f) { return "gaussian(" + format_param(f.pearson) + ")"; },
                          [](const family::Clayton& f) { return "clayton(" + format_param(f.theta) + ")"; },
                          [](const family::Gumbel& f) { return "gumbel(" + format_param(f.theta) + ")"; },
                      },
                      copula);
}

CopulaFamily make_family(const std::string& name, double param, std::size_t dims) {
    CopulaFamily out;
    if (name == "independence") {
        out = family::Independence{dims};
    } else if (name == "comonotone") {
        if (dims != 2) fail(ErrorKind::InvalidParameter, "comonotone copula is bivariate only");
        out = family::Comonotone{};
    } else if (name == "gaussian") {
        out = family::Gaussian{param};
    } else if (name == "clayton") {
        out = family::Clayton{param};
    } else if (name == "gumbel") {
        out = family::Gumbel{param};
    } else {
        fail(ErrorKind::InvalidParameter, "unknown copula family '" + name + "'");
    }
    if (family_dims(out) != dims) {
        fail(ErrorKind::InvalidParameter, name + " copula is bivariate; requested d=" + std::to_string(dims));
    }
    validate_family(out);
    return out;
}

double copula_cdf(const CopulaFamily& copula, std::span<const double> point) {
    if (point.size() != family_dims(copula)) {
        fail(ErrorKind::DomainError, family_name(copula) + " copula evaluated at a point of the wrong dimension");
    }
    for (double x : point) {
        if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::DomainError, "copula argument outside [0,1]");
    }
    return std::visit(
        overloaded{
            [&](const family::Independence&) {
                double prod = 1.0;
                for (double x : point) prod *= x;
                return prod;
            },
            [&](const family::Comonotone&) { return std::min(point[0], point[1]); },
            [&](const family::Gaussian& f) {
                return bivariate(point, [&](double u, double v) {
                    if (f.pearson == 0.0) return u * v;
                    return bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), f.pearson);
                });
            },
            [&](const family::Clayton& f) {
                return bivariate(point, [&](double u, double v) {
                    return std::pow(std::pow(u, -f.theta) + std::pow(v, -f.theta) - 1.0, -1.0 / f.theta);
                });
            },
            [&](const family::Gumbel& f) {
                return bivariate(point, [&](double u, double v) {
                    const double s = std::pow(-std::log(u), f.theta) + std::pow(-std::log(v), f.theta);
                    return std::exp(-std::pow(s, 1.0 / f.theta));
                });
            },
        },
        copula);
}

ProbArray skeleton_from_copula(const CopulaFamily& copula, const GridShape& shape) {
    validate_family(copula);
    const std::size_t d = shape.dims();
    const std::size_t n = shape.n();
    if (family_dims(copula) != d) {
        fail(ErrorKind::InvalidParameter,
             family_name(copula) + " copula does not match grid dimension " + std::to_string(d));
    }

    // C at every corner (k_1/n, ..., k_d/n), k in [0..n]^d
    const GridShape corners(d, n + 1);
    std::vector<double> corner_cdf(corners.size());
    std::vector<double> point(d);
    for (std::size_t c = 0; c < corners.size(); ++c) {
        const auto k = unravel(corners, c);
        for (std::size_t a = 0; a < d; ++a) point[a] = static_cast<double>(k[a]) / static_cast<double>(n);
        const double value = copula_cdf(copula, point);
        if (!std::isfinite(value)) {
            fail(ErrorKind::NumericalError, family_name(copula) + " d.f. is not finite at a cell corner");
        }
        corner_cdf[c] = value;
    }

    std::vector<double> values(shape.size());
    const std::size_t vertices = std::size_t{1} << d;
    bool clamped = false;
    for (std::size_t cell = 0; cell < shape.size(); ++cell) {
        const auto i = unravel(shape, cell);
        long double volume = 0.0L;
        for (std::size_t mask = 0; mask < vertices; ++mask) {
            std::size_t corner = 0;
            int lower = 0;
            for (std::size_t a = 0; a < d; ++a) {
                const bool low = (mask >> a) & 1U;
                lower += low ? 1 : 0;
                corner = corner * (n + 1) + i[a] + (low ? 0 : 1);
            }
            volume += (lower % 2 == 0 ? 1.0L : -1.0L) * corner_cdf[corner];
        }
        double v = static_cast<double>(volume);
        if (v < 0.0) {
            if (v < -1e-13) {
                fail(ErrorKind::NumericalError, family_name(copula) + " produced a negative cell volume " +
                                                    format_param(v));
            }
            v = 0.0;
            clamped = true;
        }
        values[cell] = v;
    }

    long double total = 0.0L;
    for (double v : values) total += v;
    if (clamped || std::fabs(static_cast<double>(total) - 1.0) > kMassTolerance) {
        for (double& v : values) v = static_cast<double>(v / total);
    }
    return {shape, std::move(values)};
}

CheckerboardModel::CheckerboardModel(ProbArray skeleton) : skeleton_(std::move(skeleton)) {
    const auto check = is_copula_array(skeleton_, 1e-10);
    if (!check.is_copula) {
        fail(ErrorKind::InvalidArray,
             "checkerboard skeleton is not a copula array (margin error " + format_param(check.max_error) + ")");
    }
    const GridShape& shape = skeleton_.shape();
    const std::size_t d = shape.dims();
    const std::size_t n = shape.n();
    const GridShape corners(d, n + 1);

    // cumulative[k] = sum of p_i over cells with i < k componentwise
    std::vector<long double> cum(corners.size(), 0.0L);
    for (std::size_t cell = 0; cell < shape.size(); ++cell) {
        auto k = unravel(shape, cell);
        for (auto& x : k) ++x;
        cum[linear_index(corners, k)] = skeleton_[cell];
    }
    for (std::size_t a = 0; a < d; ++a) {
        const std::size_t stride = corners.stride(a);
        for (std::size_t c = 0; c < corners.size(); ++c) {
            if ((c / stride) % (n + 1) != 0) cum[c] += cum[c - stride];
        }
    }
    cumulative_.assign(cum.begin(), cum.end());
}

double CheckerboardModel::cdf(std::span<const double> point) const {
    const GridShape& shape = skeleton_.shape();
    const std::size_t d = shape.dims();
    const std::size_t n = shape.n();
    if (point.size() != d) fail(ErrorKind::DomainError, "point has the wrong dimension");

    std::vector<std::size_t> base(d);
    std::vector<double> frac(d);
    for (std::size_t a = 0; a < d; ++a) {
        const double x = point[a];
        if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::DomainError, "checkerboard cdf argument outside [0,1]");
        const double scaled = x * static_cast<double>(n);
        std::size_t b = static_cast<std::size_t>(std::floor(scaled));
        if (b >= n) b = n - 1;
        base[a] = b;
        frac[a] = scaled - static_cast<double>(b);
    }

    const GridShape corners(d, n + 1);
    long double value = 0.0L;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        long double weight = 1.0L;
        std::size_t corner = 0;
        for (std::size_t a = 0; a < d; ++a) {
            const bool up = (mask >> a) & 1U;
            weight *= up ? frac[a] : 1.0 - frac[a];
            corner = corner * (n + 1) + base[a] + (up ? 1 : 0);
        }
        if (weight != 0.0L) value += weight * cumulative_[corner];
    }
    return std::clamp(static_cast<double>(value), 0.0, 1.0);
}

double checkerboard_cdf(const CheckerboardModel& model, std::span<const double> point) { return model.cdf(point); }

double approximation_gap(const CopulaFamily& copula, const GridShape& shape,
                         std::span<const std::vector<double>> points) {
    const CheckerboardModel model(skeleton_from_copula(copula, shape));
    double worst = 0.0;
    for (const auto& v : points) worst = std::max(worst, std::fabs(model.cdf(v) - copula_cdf(copula, v)));
    return worst;
}

std::vector<std::vector<double>> regular_test_grid(std::size_t dims, std::size_t m) {
    if (m < 2) fail(ErrorKind::InvalidParameter, "test grid needs at least 2 points per axis");
    const GridShape grid(dims, m);
    std::vector<std::vector<double>> points(grid.size(), std::vector<double>(dims));
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const auto k = unravel(grid, c);
        for (std::size_t a = 0; a < dims; ++a) points[c][a] = static_cast<double>(k[a]) / static_cast<double>(m - 1);
    }
    return points;
}

namespace {

double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<std::vector<double>> sample(const ProbArray& p, std::size_t count, std::uint64_t seed, SampleMode mode) {
    if (count < 1) fail(ErrorKind::InvalidParameter, "sample count must be positive");
    const GridShape& shape = p.shape();
    const std::size_t d = shape.dims();
    const double n = static_cast<double>(shape.n());

    std::vector<double> cdf(p.size());
    long double running = 0.0L;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        running += p[i];
        cdf[i] = static_cast<double>(running);
        if (p[i] > 0.0) last_positive = i;
    }
    const double total = cdf.back();

    std::mt19937_64 gen(seed);
    std::vector<std::vector<double>> points;
    points.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const double u = unit_uniform(gen) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t cell = it == cdf.end() ? last_positive : static_cast<std::size_t>(it - cdf.begin());
        const auto index = unravel(shape, cell);
        std::vector<double> point(d);
        for (std::size_t a = 0; a < d; ++a) {
            const double offset = mode == SampleMode::Continuous ? unit_uniform(gen) : 0.5;
            point[a] = (static_cast<double>(index[a]) + offset) / n;
        }
        points.push_back(std::move(point));
    }
    return points;
}

std::vector<std::vector<double>> sample(const CheckerboardModel& model, std::size_t count, std::uint64_t seed,
                                        SampleMode mode) {
    return sample(model.skeleton(), count, seed, mode);
}

double gaussian_rho_to_pearson(double spearman_rho) {
    if (!(spearman_rho >= -1.0 && spearman_rho <= 1.0)) {
        fail(ErrorKind::DomainError, "Spearman's rho must lie in [-1, 1], got " + format_param(spearman_rho));
    }
    return 2.0 * std::sin(std::numbers::pi * spearman_rho / 6.0);
}

}  // namespace mincop
