#pragma once

#include <cstddef>

namespace purecert {

// Exact one-sided Clopper-Pearson lower confidence bound for a binomial
// proportion: the largest p with P(X >= successes | p) <= alpha, found by
// bisecting the exact binomial tail. Returns 0 when successes == 0.
double clopper_pearson_lower(std::size_t successes, std::size_t trials, double alpha);

// log P(X >= k) for X ~ Binomial(n, p), summed in log space.
double log_binomial_upper_tail(std::size_t k, std::size_t n, double p);

// Standard normal CDF and its inverse (Acklam's rational approximation with a
// Halley refinement step; |error| well below 1e-12).
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace purecert
