#pragma once

#include "blockggm/rng.hpp"

namespace blockggm {

/* Standard normal CDF Phi(x). */
double norm_cdf(double x);

/* log Phi(x), stable over the whole double range.  Uses the complementary
   error function in the bulk and an asymptotic tail expansion once erfc
   underflows; arguments below -37 are clamped there so the log-complement
   of a huge positive argument stays finite instead of collapsing to -inf. */
double log_norm_cdf(double x);

/* Standard normal quantile Phi^{-1}(p), p in (0,1). */
double norm_quantile(double p);

/* Draw from N(mean, 1) conditioned on the result being >= lower
   (resp. <= upper).  Naive resampling near the bulk, the translated
   exponential rejection sampler of Robert (1995) in the far tail. */
double rtruncnorm_lower(Rng& rng, double mean, double lower);
double rtruncnorm_upper(Rng& rng, double mean, double upper);

/* Stirling's approximation to lgamma: log(2*pi)/2 + (x-1/2) log x - x. */
double stirling_lgamma(double x);

/* log of the multivariate gamma function Gamma_p(a). */
double lmvgamma(int p, double a);

/* log(sum(exp(v))) without overflow. */
double log_sum_exp(const double* v, int n);

/* Draws an index 0..n-1 with probabilities proportional to exp(logw[k]);
   -inf entries are legal (zero mass).  One uniform variate per call. */
int sample_categorical_log(Rng& rng, const double* logw, int n);

}  // namespace blockggm
