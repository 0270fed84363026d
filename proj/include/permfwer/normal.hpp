#pragma once

namespace permfwer {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);

/// Inverse of the standard normal CDF (Wichura's AS 241, about 1e-16 relative accuracy).
/// Returns -inf / +inf at p = 0 / 1 and NaN outside [0, 1].
double normal_quantile(double p);

/// Two-sided tail probability 2 * Phi(-|x|).
inline double two_sided_p(double x) { return 2.0 * normal_sf(x < 0 ? -x : x); }

}  // namespace permfwer
