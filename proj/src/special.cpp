#include "blockggm/special.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "blockggm/common.hpp"

namespace blockggm {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kLogTwoPi = 1.8378770664093454836;

/* log Phi(x) for x <= -26 or so, where 0.5*erfc underflows: the standard
   continued-fraction-free asymptotic series
   Phi(-a) = phi(a)/a * (1 - 1/a^2 + 3/a^4 - 15/a^6 + ...). */
double log_norm_cdf_tail(double x) {
    const double r2 = 1.0 / (x * x);
    const double series = 1.0 - r2 * (1.0 - 3.0 * r2 * (1.0 - 5.0 * r2));
    return -0.5 * x * x - 0.5 * kLogTwoPi - std::log(-x) + std::log(series);
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_norm_cdf(double x) {
    if (x < -37.0) x = -37.0;
    if (x > 8.0) {
        /* complement is tiny; log1p keeps full precision */
        return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
    }
    const double v = 0.5 * std::erfc(-x * kInvSqrt2);
    if (v > 1e-290) return std::log(v);
    return log_norm_cdf_tail(x);
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw input_error("norm_quantile: probability must lie strictly in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

namespace {

/* Standard normal conditioned on being >= a.  Plain rejection when the
   acceptance rate is decent, Robert's (1995) translated exponential
   proposal for a deep truncation point. */
double rtruncnorm_std_lower(Rng& rng, double a) {
    if (a < 0.45) {
        for (;;) {
            const double z = rnorm(rng);
            if (z >= a) return z;
        }
    }
    const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double z = a + rexp(rng, lambda);
        const double d = z - lambda;
        if (std::log(runif(rng)) <= -0.5 * d * d) return z;
    }
}

}  // namespace

double rtruncnorm_lower(Rng& rng, double mean, double lower) {
    return mean + rtruncnorm_std_lower(rng, lower - mean);
}

double rtruncnorm_upper(Rng& rng, double mean, double upper) {
    return -rtruncnorm_lower(rng, -mean, -upper);
}

double stirling_lgamma(double x) {
    return 0.5 * kLogTwoPi + (x - 0.5) * std::log(x) - x;
}

double lmvgamma(int p, double a) {
    double out = 0.25 * p * (p - 1) * std::log(M_PI);
    for (int j = 0; j < p; ++j) out += std::lgamma(a - 0.5 * j);
    return out;
}

double log_sum_exp(const double* v, int n) {
    const double m = *std::max_element(v, v + n);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

int sample_categorical_log(Rng& rng, const double* logw, int n) {
    const double norm = log_sum_exp(logw, n);
    if (!std::isfinite(norm))
        throw numeric_error("sample_categorical_log: all weights are zero");
    const double u = runif(rng);
    double acc = 0.0;
    int last_positive = 0;
    for (int k = 0; k < n; ++k) {
        const double pk = std::exp(logw[k] - norm);
        if (pk > 0.0) last_positive = k;
        acc += pk;
        if (u <= acc) return k;
    }
    return last_positive;  // guard against accumulated rounding
}

}  // namespace blockggm
