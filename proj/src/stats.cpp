#include "emgtcn/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace emgtcn {

namespace {

constexpr double kCfTolerance = 1e-12;
constexpr int kCfMaxTerms = 500;

// Continued fraction for the incomplete beta function, modified Lentz
// iteration. Converges quickly for x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kCfTolerance) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction failed to converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("regularized_incomplete_beta: x must be in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_survival(double f, int df1, int df2) {
  if (df1 < 1 || df2 < 1) throw std::invalid_argument("f_survival: degrees of freedom must be >= 1");
  if (f <= 0.0) return 1.0;
  // P(X > f) = I_y(df2/2, df1/2) with y = df2 / (df2 + df1*f); this form
  // avoids the 1 - CDF cancellation for large f.
  const double y = df2 / (df2 + df1 * f);
  return regularized_incomplete_beta(0.5 * df2, 0.5 * df1, y);
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("anova_oneway: need >= 2 groups");
  std::int64_t n_total = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("anova_oneway: each group needs >= 2 values");
    for (double v : g) grand_sum += v;
    n_total += static_cast<std::int64_t>(g.size());
  }
  const double grand_mean = grand_sum / static_cast<double>(n_total);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (mean - grand_mean) * (mean - grand_mean);
    for (double v : g) ss_within += (v - mean) * (v - mean);
  }

  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n_total - static_cast<std::int64_t>(groups.size()));
  if (ss_within <= 0.0)
    throw std::invalid_argument("anova_oneway: zero within-group variance");
  r.f = (ss_between / r.df_between) / (ss_within / r.df_within);
  r.p_value = f_survival(r.f, r.df_between, r.df_within);
  return r;
}

double standard_error(const std::vector<double>& values) {
  const auto n = values.size();
  if (n < 2) throw std::invalid_argument("standard_error: need >= 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return sd / std::sqrt(static_cast<double>(n));
}

}  // namespace emgtcn
