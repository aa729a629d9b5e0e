#include "halfheavy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "halfheavy/types.hpp"

namespace halfheavy::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw InputError("mean of empty sample");
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw InputError("variance needs at least two values");
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

double median_of_means(std::span<const double> x, std::size_t blocks) {
  if (blocks == 0 || x.size() < blocks) throw InputError("median_of_means: need at least one value per block");
  std::vector<double> means;
  means.reserve(blocks);
  const std::size_t n = x.size();
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * n / blocks;
    const std::size_t hi = (b + 1) * n / blocks;
    means.push_back(mean(x.subspan(lo, hi - lo)));
  }
  std::sort(means.begin(), means.end());
  const std::size_t m = means.size();
  return m % 2 ? means[m / 2] : 0.5 * (means[m / 2 - 1] + means[m / 2]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Moments moments(std::span<const double> x) {
  if (x.size() < 2) throw InputError("moments need at least two values");
  Moments m;
  m.mean = mean(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw InputError("degenerate sample: zero variance");
  m.sd = std::sqrt(m2);
  m.skewness = m3 / (m2 * m.sd);
  m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return m;
}

double ks_distance_normal(std::span<const double> x) {
  if (x.empty()) throw InputError("ks distance of empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("linear_fit needs matching samples of size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("linear_fit needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return f;
}

}  // namespace halfheavy::stats
