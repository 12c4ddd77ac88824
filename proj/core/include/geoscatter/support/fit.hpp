#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace geoscatter {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept (two-pass, centered).
inline LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_fit needs two or more pairs");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  return f;
}

/// OLS on (log x, log |y|).
inline LineFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return ols_fit(lx, ly);
}

} // namespace geoscatter
