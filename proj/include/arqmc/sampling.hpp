#pragma once

#include <cstdint>

#include "arqmc/common.hpp"

namespace arqmc {

// Smallest x with F_lambda(x) >= u, i.e. exact inversion of the Poisson cdf.
std::int64_t poisson_inverse(double lambda, double u);

// log of the Poisson pmf, accurate for large k and lambda (saddle-point form).
double poisson_log_pmf(std::int64_t k, double lambda);

double normal_cdf(double z);
double normal_inverse(double u);

// Number of firings of a channel with mean lambda over one step.
double count_variate(double lambda, double u, StateMode mode);

}  // namespace arqmc
