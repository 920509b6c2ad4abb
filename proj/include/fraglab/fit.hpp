#pragma once

#include <vector>

namespace fraglab {

struct GaussParams {
    double amplitude = 0.0;
    double center = 0.0;
    double sigma = 0.0;
    double cost = 0.0;  // sum of squared residuals at the solution
    bool converged = false;
};

// Least squares y ~ A exp(-(x-mu)^2 / (2 sigma^2)) via damped Gauss-Newton,
// seeded from the sample moments.
GaussParams gauss_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                      int max_iters = 200);

struct LogLogFit {
    double alpha = 0.0;    // negative slope of log(y) vs log(n)
    double stderr_ = 0.0;  // standard error of the slope
    double intercept = 0.0;
};

LogLogFit fit_alpha(const std::vector<double>& ns, const std::vector<double>& ys);

}  // namespace fraglab
