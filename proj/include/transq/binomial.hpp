#pragma once

#include <cstdint>

#include "transq/rng.hpp"

namespace transq {

// Binomial(trials, p) variate. Inversion (one uniform, sequential search from
// 0) when trials * min(p, 1-p) < 30, otherwise Hormann's BTRS transformed
// rejection. For p > 1/2 the complement is sampled.
std::int64_t sample_binomial(Rng& rng, std::int64_t trials, double p);

// Inversion only: the smallest k with F(k) >= u. Monotone in p for fixed u.
std::int64_t binomial_inverse(std::int64_t trials, double p, double u);

}  // namespace transq
