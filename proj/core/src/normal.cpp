#include "ampute/normal.hpp"
#include "ampute/types.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>

namespace ampute {

double norm_cdf(double x) {
    // erfc keeps accuracy in the lower tail where 1 - Phi(-x) loses digits.
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("norm_quantile: p must lie in (0,1)");
    static const boost::math::normal_distribution<double> unit{};
    return boost::math::quantile(unit, p);
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("logit: p must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

double inv_logit(double x) {
    // Evaluate through exp of a non-positive argument to avoid overflow.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double beta_quantile(double alpha, double beta, double u) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw ValidationError("beta_quantile: alpha and beta must be positive");
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return boost::math::ibeta_inv(alpha, beta, u);
}

namespace {

// Gauss-Legendre abscissae/weights on (-1,1), folded symmetric halves.
constexpr double kGL6x[3] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
constexpr double kGL6w[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};

constexpr double kGL12x[6] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                              0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
constexpr double kGL12w[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                              0.2031674267230659, 0.2334925365383547, 0.2491470458134029};

constexpr double kGL20x[10] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                               0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                               0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                               0.07652652113349733};
constexpr double kGL20w[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                               0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
                               0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
                               0.1527533871307259};

// Upper-quadrant probability P(X > dh, Y > dk), correlation r.
// Port of the published Drezner & Wesolowsky (1990) / Genz (2004) algorithm.
double bvnu(double dh, double dk, double r) {
    const double tp = 2.0 * M_PI;

    if (std::abs(r) < 1e-15) return norm_cdf(-dh) * norm_cdf(-dk);

    const double* gx;
    const double* gw;
    int ng;
    if (std::abs(r) < 0.3) {
        gx = kGL6x; gw = kGL6w; ng = 3;
    } else if (std::abs(r) < 0.75) {
        gx = kGL12x; gw = kGL12w; ng = 6;
    } else {
        gx = kGL20x; gw = kGL20w; ng = 10;
    }

    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;

    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r) / 2.0;
        for (int i = 0; i < ng; ++i) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                const double sn = std::sin(asr * (1.0 + sgn * gx[i]));
                bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / tp + norm_cdf(-h) * norm_cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (std::abs(r) < 1.0) {
            const double as = 1.0 - r * r;
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double asr0 = -(bs / as + hk) / 2.0;
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 80.0;
            if (asr0 > -100.0)
                bvn = a * std::exp(asr0) *
                      (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
            if (hk > -100.0) {
                const double b = std::sqrt(bs);
                const double sp = std::sqrt(tp) * norm_cdf(-b / a);
                bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
            }
            a /= 2.0;
            double quad = 0.0;
            for (int i = 0; i < ng; ++i) {
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    const double x = a * (1.0 + sgn * gx[i]);
                    const double xs = x * x;
                    const double asr1 = -(bs / xs + hk) / 2.0;
                    if (asr1 > -100.0) {
                        const double rs = std::sqrt(1.0 - xs);
                        const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                        const double ep =
                            std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
                        quad += a * gw[i] * std::exp(asr1) * (sp - ep);
                    }
                }
            }
            bvn = (quad - bvn) / tp;
        }
        if (r > 0.0) {
            bvn += norm_cdf(-std::max(h, k));
        } else {
            bvn = -bvn;
            if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

} // namespace

double bivariate_norm_cdf(double x, double y, double rho) {
    if (!(rho >= -1.0 && rho <= 1.0))
        throw ValidationError("bivariate_norm_cdf: rho must lie in [-1,1]");
    if (rho >= 1.0) return norm_cdf(std::min(x, y));
    if (rho <= -1.0) return std::max(norm_cdf(x) + norm_cdf(y) - 1.0, 0.0);
    if (std::isinf(x) || std::isinf(y)) {
        if (x < 0 || y < 0) return 0.0;           // either limit at -inf
        if (std::isinf(x) && std::isinf(y)) return 1.0;
        return std::isinf(x) ? norm_cdf(y) : norm_cdf(x);
    }
    return bvnu(-x, -y, rho);
}

} // namespace ampute
