#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lncg/common.hpp"

namespace lncg {
namespace approx_ratio {

struct RatioEstimate {
  int n = 0;
  Group group = Group::O;
  double alpha = 0.0;
  double alpha_squared = 0.0;
  double stderr_alpha = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

// Monte-Carlo estimate of alpha_G(n) = E[(1/n) sum over the counted singular
// values of Z1], Z1 an n x n matrix with i.i.d. N(0, 1/n) entries. Group O
// counts all n singular values, group SO the largest n-1. Replaces the
// closed-form Wishart quadrature with per-sample SVDs.
inline RatioEstimate mc_alpha(int n, Group group, std::int64_t samples, std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("mc_alpha: need at least 1000 samples");
  if (n < 1 || (group == Group::SO && n < 2))
    throw std::invalid_argument("mc_alpha: invalid dimension for group");
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  double mean = 0.0, m2 = 0.0;  // Welford accumulators
  Eigen::MatrixXd z(n, n);
  for (std::int64_t s = 0; s < samples; ++s) {
    double stat;
    if (n == 1) {
      stat = std::abs(sd * rng.gaussian());
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = sd * rng.gaussian();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(z);
      const auto& sigma = svd.singularValues();  // descending
      const int count = group == Group::O ? n : n - 1;
      double acc = 0.0;
      for (int k = 0; k < count; ++k) acc += sigma[k];
      stat = acc / n;
    }
    const double delta = stat - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (stat - mean);
  }
  RatioEstimate est;
  est.n = n;
  est.group = group;
  est.alpha = mean;
  est.alpha_squared = mean * mean;
  est.stderr_alpha = std::sqrt(m2 / static_cast<double>(samples - 1) /
                               static_cast<double>(samples));
  est.samples = samples;
  est.seed = seed;
  return est;
}

inline std::string csv_header() { return "n,group,samples,alpha,alpha_squared,stderr,seed"; }

inline std::string csv_row(const RatioEstimate& e) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%d,%s,%lld,%.12g,%.12g,%.12g,%llu", e.n, to_string(e.group),
                static_cast<long long>(e.samples), e.alpha, e.alpha_squared, e.stderr_alpha,
                static_cast<unsigned long long>(e.seed));
  return buf;
}

}  // namespace approx_ratio
}  // namespace lncg
