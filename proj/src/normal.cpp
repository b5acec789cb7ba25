#include "mincop/normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace mincop {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace {

struct GaussLegendreHalf {
    int count;
    std::array<double, 10> weight;
    std::array<double, 10> node;  // negative half of the symmetric rule
};

constexpr GaussLegendreHalf kRule6{
    3,
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
    {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
};

constexpr GaussLegendreHalf kRule12{
    6,
    {0.4717533638651177e-01, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
     0.2334925365383547, 0.2491470458134029},
    {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171,
     -0.3678314989981802, -0.1252334085114692},
};

constexpr GaussLegendreHalf kRule20{
    10,
    {0.1761400713915212e-01, 0.4060142980038694e-01, 0.6267204833410906e-01, 0.8327674157670475e-01,
     0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
     0.1527533871307259},
    {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
     -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
     -0.2277858511416451, -0.7652652113349733e-01},
};

// P(X > h, Y > k) for finite h, k.
double upper_orthant(double h, double k, double r) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double abs_r = std::fabs(r);
    const GaussLegendreHalf& rule = abs_r < 0.3 ? kRule6 : (abs_r < 0.75 ? kRule12 : kRule20);

    double hk = h * k;
    double bvn = 0.0;
    if (abs_r < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (int i = 0; i < rule.count; ++i) {
            double sn = std::sin(asr * (rule.node[i] + 1.0) / 2.0);
            bvn += rule.weight[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            sn = std::sin(asr * (-rule.node[i] + 1.0) / 2.0);
            bvn += rule.weight[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / (2.0 * two_pi) + normal_cdf(-h) * normal_cdf(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (abs_r < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        bvn = a * std::exp(-(bs / as + hk) / 2.0) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hk > -160.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * normal_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (int i = 0; i < rule.count; ++i) {
            double xs = a * (rule.node[i] + 1.0);
            xs *= xs;
            double rs = std::sqrt(1.0 - xs);
            bvn += a * rule.weight[i] *
                   (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                    std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
            xs = as * (-rule.node[i] + 1.0) * (-rule.node[i] + 1.0) / 4.0;
            rs = std::sqrt(1.0 - xs);
            bvn += a * rule.weight[i] * std::exp(-(bs / xs + hk) / 2.0) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
        }
        bvn = -bvn / two_pi;
    }
    if (r > 0.0) return bvn + normal_cdf(-std::max(h, k));
    return -bvn + std::max(0.0, normal_cdf(-h) - normal_cdf(-k));
}

}  // namespace

double bivariate_normal_cdf(double h, double k, double r) {
    if (std::isnan(h) || std::isnan(k) || std::isnan(r)) return std::numeric_limits<double>::quiet_NaN();
    if (h == -std::numeric_limits<double>::infinity() || k == -std::numeric_limits<double>::infinity()) return 0.0;
    if (h == std::numeric_limits<double>::infinity()) return normal_cdf(k);
    if (k == std::numeric_limits<double>::infinity()) return normal_cdf(h);
    const double value = upper_orthant(-h, -k, r);
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace mincop
