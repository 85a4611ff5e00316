#pragma once

#include <vector>

namespace emgtcn {

struct AnovaResult {
  double f = 0.0;
  double p_value = 1.0;
  int df_between = 0;
  int df_within = 0;
};

// Regularized incomplete beta I_x(a, b), continued fraction evaluated to
// 1e-12 convergence.
double regularized_incomplete_beta(double a, double b, double x);

// Survival function of the F distribution, P(X > f) for X ~ F(df1, df2).
double f_survival(double f, int df1, int df2);

// Classical one-way ANOVA. Needs >= 2 groups of >= 2 values each and
// nonzero pooled within-group variance.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

// Sample standard deviation / sqrt(n).
double standard_error(const std::vector<double>& values);

}  // namespace emgtcn
