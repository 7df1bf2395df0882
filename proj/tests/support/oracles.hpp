#pragma once

// Brute-force reference implementations used to check the library.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0 || nb == 0) return 0;
  return dot(a, b) / (na * nb);
}

/// 1/(n(n-1)) * sum_{k<l} (1 - sim).
inline double diversity(const std::vector<Eigen::VectorXd>& s) {
  const double n = static_cast<double>(s.size());
  double acc = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (std::size_t l = k + 1; l < s.size(); ++l) acc += 1.0 - sim(s[k], s[l]);
  }
  return acc / (n * (n - 1));
}

/// Central differences of f at theta.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& theta, double h = 1e-6) {
  Eigen::VectorXd g(theta.size());
  Eigen::VectorXd t = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    t[i] = theta[i] + h;
    const double up = f(t);
    t[i] = theta[i] - h;
    const double down = f(t);
    t[i] = theta[i];
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double denom = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / denom;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double population_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace oracle
