#include "mincop/error.hpp"
#include "mincop/prob_array.hpp"
#include "support/helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace mincop;
using mincop::testing::brute_margin;
using mincop::testing::random_prob_array;

namespace {

ProbArray two_by_two(double a, double b, double c, double d) { return {GridShape(2, 2), {a, b, c, d}}; }

}  // namespace

TEST_CASE("grid shape validation and cap") {
    CHECK(GridShape(3, 4).size() == 64);
    CHECK(GridShape(3, 4).stride(0) == 16);
    CHECK(GridShape(3, 4).stride(2) == 1);
    CHECK_THROWS_AS(GridShape(2, 1), Error);
    CHECK_THROWS_AS(GridShape(0, 3), Error);
    CHECK_THROWS_AS(GridShape(10, 10, 1000), Error);
    CHECK_NOTHROW(GridShape(3, 10, 1000));
    CHECK_THROWS_AS(GridShape(64, 1000), Error);
}

TEST_CASE("prob array construction contract") {
    CHECK_NOTHROW(two_by_two(0.4, 0.1, 0.1, 0.4));
    CHECK_THROWS_AS(two_by_two(0.5, 0.6, -0.1, 0.0), Error);
    CHECK_THROWS_AS(two_by_two(0.4, 0.1, 0.1, 0.41), Error);
    CHECK_THROWS_AS(two_by_two(0.4, 0.1, 0.1, std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK_THROWS_AS(ProbArray(GridShape(2, 2), {0.5, 0.5}), Error);
    // within tolerance: kept as given, not renormalized
    const ProbArray p(GridShape(2, 2), {0.25, 0.25, 0.25, 0.25 + 5e-13});
    CHECK(p[3] == 0.25 + 5e-13);
    CHECK_THROWS_AS(MomentArray(GridShape(2, 2), {0.0, 1.0, std::numeric_limits<double>::infinity(), 0.0}), Error);
}

TEST_CASE("margin examples") {
    const auto u = ProbArray::uniform(GridShape(2, 2));
    const auto m2 = margin(u, {1});
    CHECK(m2[0] == doctest::Approx(0.5));
    CHECK(m2[1] == doctest::Approx(0.5));

    const auto p = two_by_two(0.4, 0.1, 0.1, 0.4);
    const auto m1 = margin(p, {0});
    CHECK(m1[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m1[1] == doctest::Approx(0.5).epsilon(1e-15));

    const auto m13 = margin(ProbArray::uniform(GridShape(3, 2)), {0, 2});
    CHECK(m13.shape() == GridShape(2, 2));
    for (double v : m13.values()) CHECK(v == doctest::Approx(0.25));

    // row-major: the first axis varies slowest
    const auto q = two_by_two(0.7, 0.0, 0.2, 0.1);
    CHECK(margin(q, {0})[0] == doctest::Approx(0.7));
    CHECK(margin(q, {1})[0] == doctest::Approx(0.9));
}

TEST_CASE("margin rejects bad axes") {
    const auto u = ProbArray::uniform(GridShape(3, 2));
    CHECK_THROWS_AS(margin(u, {}), Error);
    CHECK_THROWS_AS(margin(u, {3}), Error);
    CHECK_THROWS_AS(margin(u, {1, 0}), Error);
    CHECK_THROWS_AS(margin(u, {1, 1}), Error);
    try {
        margin(u, {5});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidAxes);
    }
}

TEST_CASE("kl divergence examples") {
    std::mt19937_64 rng(7);
    const auto p = random_prob_array(GridShape(2, 3), rng);
    CHECK(kl_divergence(p, p) == 0.0);

    const GridShape s(2, 2);
    const std::vector<std::size_t> corner{0, 0};
    const auto mass = ProbArray::point_mass(s, corner);
    CHECK(kl_divergence(mass, ProbArray::uniform(s)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    CHECK(kl_divergence(mass, ProbArray::uniform(s)) == doctest::Approx(1.3862944).epsilon(1e-7));

    const auto q = two_by_two(0.0, 0.5, 0.25, 0.25);
    CHECK(std::isinf(kl_divergence(mass, q)));
    CHECK(kl_divergence(q, ProbArray::uniform(s)) < std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(kl_divergence(mass, ProbArray::uniform(GridShape(2, 3))), Error);
}

TEST_CASE("support is exact-zero based") {
    const auto p = two_by_two(1e-300, 0.5, 0.5 - 1e-300, 0.0);
    const auto q = two_by_two(0.25, 0.25, 0.25, 0.25);
    CHECK(p.in_support(0));
    CHECK_FALSE(p.in_support(3));
    CHECK(support_subset(p, q));
    CHECK_FALSE(support_subset(q, p));
}

TEST_CASE("copula array check") {
    const auto u = is_copula_array(ProbArray::uniform(GridShape(3, 4)), 1e-12);
    CHECK(u.is_copula);
    CHECK(u.max_error == doctest::Approx(0.0).epsilon(1e-16));

    const auto a = is_copula_array(two_by_two(0.4, 0.1, 0.1, 0.4), 1e-12);
    CHECK(a.is_copula);
    CHECK(a.max_error < 1e-16);

    const auto b = is_copula_array(two_by_two(0.35, 0.35, 0.15, 0.15), 1e-12);
    CHECK_FALSE(b.is_copula);
    CHECK(b.max_error == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("max abs diff examples") {
    const GridShape s(2, 2);
    const auto p = two_by_two(0.4, 0.1, 0.1, 0.4);
    CHECK(max_abs_diff(p, p) == 0.0);
    CHECK(max_abs_diff(ProbArray::uniform(s), p) == doctest::Approx(0.15).epsilon(1e-14));
    const std::vector<std::size_t> corner{0, 0};
    CHECK(max_abs_diff(ProbArray::point_mass(s, corner), ProbArray::uniform(s)) == doctest::Approx(0.75));
    CHECK_THROWS_AS(max_abs_diff(p, ProbArray::uniform(GridShape(2, 3))), Error);
}

TEST_CASE("property: margins match a brute-force sum and nest") {
    std::mt19937_64 rng(11);
    for (std::size_t d = 1; d <= 4; ++d) {
        for (std::size_t n : {2u, 3u, 5u}) {
            const GridShape shape(d, n);
            const auto p = random_prob_array(shape, rng, 0.2);
            for (unsigned mask = 1; mask < (1u << d); ++mask) {
                Axes axes;
                for (std::size_t a = 0; a < d; ++a)
                    if (mask & (1u << a)) axes.push_back(a);
                const auto m = margin(p, axes);
                CHECK(testing::max_abs(brute_margin(p, axes), m.values()) < 1e-15);
                double total = 0.0;
                for (double v : m.values()) total += v;
                CHECK(std::fabs(total - 1.0) <= 1e-12);

                // nested: margin of the margin over every sub-position set
                for (unsigned sub = 1; sub < (1u << axes.size()); ++sub) {
                    Axes positions;
                    Axes original;
                    for (std::size_t k = 0; k < axes.size(); ++k) {
                        if (sub & (1u << k)) {
                            positions.push_back(k);
                            original.push_back(axes[k]);
                        }
                    }
                    CHECK(max_abs_diff(margin(m, positions), margin(p, original)) < 1e-15);
                }
            }
        }
    }
}

TEST_CASE("property: kl is nonnegative and vanishes only at equality") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const GridShape shape(2 + trial % 2, 2 + trial % 3);
        const auto p = random_prob_array(shape, rng);
        const auto q = random_prob_array(shape, rng);
        const double kl = kl_divergence(p, q);
        CHECK(kl > 0.0);
        CHECK(std::isfinite(kl));
        CHECK(kl_divergence(q, q) == 0.0);
    }
}

TEST_CASE("property: linear index round trip") {
    for (const auto& shape : {GridShape(1, 1000), GridShape(2, 1000), GridShape(3, 100), GridShape(6, 10),
                              GridShape(19, 2)}) {
        bool ok = true;
        const std::size_t step = shape.size() > 100000 ? 7 : 1;
        for (std::size_t linear = 0; linear < shape.size(); linear += step) {
            const auto idx = unravel(shape, linear);
            // explicit formula sum_k i_k n^{d-1-k}
            std::size_t expected = 0;
            for (std::size_t k = 0; k < shape.dims(); ++k) expected = expected * shape.n() + idx[k];
            ok = ok && expected == linear && linear_index(shape, idx) == linear;
        }
        CHECK(ok);
    }
    const GridShape s(3, 4);
    const std::vector<std::size_t> bad{0, 4, 0};
    CHECK_THROWS_AS(linear_index(s, bad), Error);
}

TEST_CASE("expectation") {
    const auto p = two_by_two(0.4, 0.1, 0.1, 0.4);
    const MomentArray h(GridShape(2, 2), {1.0, -1.0, -1.0, 1.0});
    CHECK(expectation(p, h) == doctest::Approx(0.6));
}
