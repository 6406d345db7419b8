#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Central differences of a scalar function over a flat parameter vector.
inline std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double step = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + step;
    const double up = f(x);
    x[k] = keep - step;
    const double down = f(x);
    x[k] = keep;
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

/// max_k |a_k - b_k| / max(|a_k|, |b_k|, floor).
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max({std::abs(a[k]), std::abs(b[k]), floor});
    worst = std::max(worst, std::abs(a[k] - b[k]) / scale);
  }
  return worst;
}

}  // namespace oracle
