// Scalar distribution helpers: standard normal CDF/quantile, the bivariate
// standard normal CDF, logit/inverse-logit, and the Beta quantile.

#ifndef AMPUTE_NORMAL_HPP
#define AMPUTE_NORMAL_HPP

namespace ampute {

/// Standard normal CDF Phi(x).
double norm_cdf(double x);

/// Standard normal quantile Phi^{-1}(p), p in (0,1).
double norm_quantile(double p);

/// P(X <= x, Y <= y) for (X,Y) bivariate standard normal with correlation rho.
/// Drezner-Wesolowsky/Genz Gauss-Legendre scheme; |error| below 1e-14, well
/// inside the 1e-7 contract. rho in [-1,1]; the degenerate cases are exact.
double bivariate_norm_cdf(double x, double y, double rho);

/// log(p / (1-p)) for p in (0,1); throws ValidationError outside.
double logit(double p);

/// 1 / (1 + exp(-x)).
double inv_logit(double x);

/// Quantile of the Beta(alpha, beta) distribution at u in [0,1].
double beta_quantile(double alpha, double beta, double u);

} // namespace ampute

#endif // AMPUTE_NORMAL_HPP
