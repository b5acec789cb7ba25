#include "mincop/checkerboard.hpp"
#include "mincop/error.hpp"
#include "mincop/normal.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mincop;

namespace {

double clayton(double u, double v, double theta) {
    if (u == 0.0 || v == 0.0) return 0.0;
    return std::pow(std::pow(u, -theta) + std::pow(v, -theta) - 1.0, -1.0 / theta);
}

double gumbel(double u, double v, double theta) {
    if (u == 0.0 || v == 0.0) return 0.0;
    return std::exp(-std::pow(std::pow(-std::log(u), theta) + std::pow(-std::log(v), theta), 1.0 / theta));
}

template <class F>
double cell_volume(F&& c, std::size_t i, std::size_t j, std::size_t n) {
    const double a0 = double(i) / n, a1 = double(i + 1) / n, b0 = double(j) / n, b1 = double(j + 1) / n;
    return c(a1, b1) - c(a0, b1) - c(a1, b0) + c(a0, b0);
}

std::vector<CopulaFamily> all_bivariate() {
    return {family::Independence{2}, family::Comonotone{}, family::Gaussian{0.5}, family::Gaussian{-0.7},
            family::Clayton{3.0},    family::Clayton{0.5},  family::Gumbel{3.0},   family::Gumbel{1.0}};
}

}  // namespace

TEST_CASE("family parameter domains") {
    CHECK_THROWS_AS(validate_family(family::Gaussian{1.0}), Error);
    CHECK_THROWS_AS(validate_family(family::Clayton{0.0}), Error);
    CHECK_THROWS_AS(validate_family(family::Gumbel{0.9}), Error);
    CHECK_NOTHROW(validate_family(family::Gumbel{1.0}));
    CHECK_THROWS_AS(skeleton_from_copula(family::Clayton{-1.0}, GridShape(2, 4)), Error);
    CHECK_THROWS_AS(skeleton_from_copula(family::Gaussian{0.3}, GridShape(3, 4)), Error);
    CHECK_THROWS_AS(make_family("frank", 2.0), Error);
    CHECK(family_name(make_family("clayton", 2.0)) == "clayton(2)");
    CHECK(family_dims(make_family("independence", 0.0, 3)) == 3);
}

TEST_CASE("skeleton examples") {
    for (const auto& shape : {GridShape(2, 3), GridShape(3, 4), GridShape(4, 2)}) {
        const auto p = skeleton_from_copula(family::Independence{shape.dims()}, shape);
        for (double v : p.values()) CHECK(v == doctest::Approx(std::pow(shape.n(), -double(shape.dims()))));
    }
    const GridShape s(2, 6);
    CHECK(max_abs_diff(skeleton_from_copula(family::Gaussian{0.0}, s),
                       skeleton_from_copula(family::Independence{2}, s)) == 0.0);

    const auto m = skeleton_from_copula(family::Comonotone{}, GridShape(2, 4));
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(m[i * 4 + j] == doctest::Approx(i == j ? 0.25 : 0.0));
        }
    }
}

TEST_CASE("property: skeletons are copula arrays") {
    for (const auto& fam : all_bivariate()) {
        for (std::size_t n : {2u, 5u, 10u, 30u}) {
            const auto p = skeleton_from_copula(fam, GridShape(2, n));
            const auto check = is_copula_array(p, 1e-10);
            CHECK_MESSAGE(check.is_copula, family_name(fam) << " n=" << n << " error " << check.max_error);
        }
    }
}

TEST_CASE("property: skeletons reproduce the closed-form cell volumes") {
    const std::size_t n = 10;
    for (double theta : {0.5, 3.0}) {
        const auto p = skeleton_from_copula(family::Clayton{theta}, GridShape(2, n));
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(p[i * n + j] -
                                                  cell_volume([&](double u, double v) { return clayton(u, v, theta); },
                                                              i, j, n)));
        CHECK(worst < 1e-12);
    }
    for (double theta : {1.5, 3.0}) {
        const auto p = skeleton_from_copula(family::Gumbel{theta}, GridShape(2, n));
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(p[i * n + j] -
                                                  cell_volume([&](double u, double v) { return gumbel(u, v, theta); },
                                                              i, j, n)));
        CHECK(worst < 1e-12);
    }
    // cdf at corners
    for (double u : {0.1, 0.35, 0.9}) {
        for (double v : {0.2, 0.5, 0.99}) {
            const double pt[] = {u, v};
            CHECK(copula_cdf(family::Clayton{3.0}, pt) == doctest::Approx(clayton(u, v, 3.0)).epsilon(1e-14));
            CHECK(copula_cdf(family::Gumbel{2.0}, pt) == doctest::Approx(gumbel(u, v, 2.0)).epsilon(1e-14));
            CHECK(copula_cdf(family::Gaussian{0.5}, pt) ==
                  doctest::Approx(bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), 0.5)).epsilon(1e-14));
        }
    }
}

TEST_CASE("checkerboard cdf examples") {
    const CheckerboardModel model(ProbArray(GridShape(2, 2), {0.4, 0.1, 0.1, 0.4}));
    const double one[] = {1.0, 1.0};
    const double half[] = {0.5, 0.5};
    CHECK(model.cdf(one) == doctest::Approx(1.0));
    CHECK(checkerboard_cdf(model, half) == doctest::Approx(0.4));
    for (double u : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        const double pu[] = {u, 1.0};
        const double pv[] = {1.0, u};
        CHECK(model.cdf(pu) == doctest::Approx(u));
        CHECK(model.cdf(pv) == doctest::Approx(u));
    }
    // bilinear inside the first cell: 0.4 * (2u)(2v)
    const double inner[] = {0.25, 0.1};
    CHECK(model.cdf(inner) == doctest::Approx(0.4 * 0.5 * 0.2));
    const double bad[] = {1.1, 0.5};
    CHECK_THROWS_AS(static_cast<void>(model.cdf(bad)), Error);
    CHECK_THROWS_AS(CheckerboardModel(ProbArray(GridShape(2, 2), {0.35, 0.35, 0.15, 0.15})), Error);

    // grid points give partial sums of the skeleton
    const auto p = skeleton_from_copula(family::Clayton{2.0}, GridShape(2, 5));
    const CheckerboardModel clayton_model(p);
    for (std::size_t a = 0; a <= 5; ++a) {
        for (std::size_t b = 0; b <= 5; ++b) {
            double partial = 0.0;
            for (std::size_t i = 0; i < a; ++i)
                for (std::size_t j = 0; j < b; ++j) partial += p[i * 5 + j];
            const double pt[] = {a / 5.0, b / 5.0};
            CHECK(clayton_model.cdf(pt) == doctest::Approx(partial).epsilon(1e-13));
        }
    }
}

TEST_CASE("approximation gap") {
    const auto grid = regular_test_grid(2, 101);
    CHECK(grid.size() == 101 * 101);
    CHECK(approximation_gap(family::Independence{2}, GridShape(2, 7), grid) < 1e-15);
    const double g = approximation_gap(family::Gaussian{0.5}, GridShape(2, 30), grid);
    CHECK(g <= 2.0 / 30.0);
    const auto centers = regular_test_grid(2, 21);
    const double c = approximation_gap(family::Comonotone{}, GridShape(2, 10), centers);
    CHECK(c <= 0.2);
    CHECK(c > 0.0);
}

TEST_CASE("property: approximation gap is at most d/n") {
    const auto grid = regular_test_grid(2, 41);
    for (const auto& fam : all_bivariate()) {
        for (std::size_t n : {2u, 5u, 10u, 30u}) {
            CHECK(approximation_gap(fam, GridShape(2, n), grid) <= 2.0 / n);
        }
    }
    const auto grid3 = regular_test_grid(3, 9);
    CHECK(approximation_gap(family::Independence{3}, GridShape(3, 4), grid3) <= 3.0 / 4.0);
}

TEST_CASE("sampling") {
    const GridShape s(2, 3);
    const std::vector<std::size_t> cell{1, 2};
    const auto mass = ProbArray::point_mass(s, cell);
    for (const auto& pt : sample(mass, 50, 3, SampleMode::CellCenters)) {
        CHECK(pt[0] == doctest::Approx(0.5));
        CHECK(pt[1] == doctest::Approx(5.0 / 6.0));
    }
    for (const auto& pt : sample(mass, 50, 3, SampleMode::Continuous)) {
        CHECK(pt[0] > 1.0 / 3.0);
        CHECK(pt[0] <= 2.0 / 3.0);
        CHECK(pt[1] > 2.0 / 3.0);
        CHECK(pt[1] <= 1.0);
    }

    const CheckerboardModel uniform(ProbArray::uniform(GridShape(2, 5)));
    const auto pts = sample(uniform, 100000, 9, SampleMode::Continuous);
    double m0 = 0.0, m1 = 0.0;
    for (const auto& p : pts) {
        m0 += p[0];
        m1 += p[1];
    }
    CHECK(std::fabs(m0 / pts.size() - 0.5) < 0.005);
    CHECK(std::fabs(m1 / pts.size() - 0.5) < 0.005);

    CHECK(sample(uniform, 5, 42, SampleMode::Continuous) == sample(uniform, 5, 42, SampleMode::Continuous));
    CHECK(sample(uniform, 5, 42, SampleMode::Continuous) != sample(uniform, 5, 43, SampleMode::Continuous));
    CHECK_THROWS_AS(sample(uniform, 0, 1, SampleMode::CellCenters), Error);
}

TEST_CASE("property: sampled cell frequencies converge") {
    const auto p = skeleton_from_copula(family::Clayton{2.0}, GridShape(2, 4));
    const std::size_t draws = 1000000;
    const auto pts = sample(p, draws, 2024, SampleMode::CellCenters);
    std::vector<double> freq(16, 0.0);
    for (const auto& x : pts) {
        const auto i = static_cast<std::size_t>(x[0] * 4);
        const auto j = static_cast<std::size_t>(x[1] * 4);
        freq[i * 4 + j] += 1.0 / draws;
    }
    for (std::size_t c = 0; c < 16; ++c) {
        CHECK(std::fabs(freq[c] - p[c]) <= 4.0 * std::sqrt(p[c] * (1 - p[c]) / draws));
    }
}

TEST_CASE("spearman to pearson") {
    CHECK(gaussian_rho_to_pearson(0.0) == 0.0);
    CHECK(gaussian_rho_to_pearson(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gaussian_rho_to_pearson(0.8) == doctest::Approx(2.0 * std::sin(0.8 * std::numbers::pi / 6.0)));
    CHECK(gaussian_rho_to_pearson(0.8) == doctest::Approx(0.8135).epsilon(1e-4));
    CHECK_THROWS_AS(gaussian_rho_to_pearson(1.2), Error);
}
