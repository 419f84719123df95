#pragma once

#include <string>
#include <vector>

namespace excast {

struct BayesComparison {
    std::string method_a;
    std::string method_b;
    double p_left = 0.0;   // posterior mass below -rope
    double p_rope = 0.0;   // mass inside [-rope, +rope]
    double p_right = 0.0;  // mass above +rope
    double rope_halfwidth = 0.01;
};

/// CDF of the standard Student-t distribution with df degrees of freedom.
double student_t_cdf(double x, double df);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/**
 * Bayesian correlated t-test. The posterior of the mean difference is a
 * Student-t with n-1 degrees of freedom, location mean(diffs) and scale
 * sqrt((1/n + rho/(1-rho)) * var(diffs)); rho corrects for the overlap
 * between resampled folds. Zero-variance input collapses to a point
 * posterior compared directly against the rope boundaries.
 */
BayesComparison bayes_correlated_ttest(const std::vector<double>& diffs, double rho,
                                       double rope_halfwidth);

}  // namespace excast
