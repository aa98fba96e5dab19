#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "oromet/error.hpp"

namespace oromet {

/// L2-regularized logistic regression with per-class loss weights.
/// The objective is
///   sum_i cw(y_i) * log(1 + exp(-t_i * (x_i.w + b))) + ||w||^2 / (2C)
/// with t_i in {-1,+1} and the bias unpenalized; "balanced" class weights
/// are n / (2 * n_class) computed on the training rows.
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  double C = 1.0;
  double weight_positive = 1.0;
  double weight_negative = 1.0;

  double score(const double* row) const {
    double s = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * row[k];
    return s;
  }

  /// Decision threshold 0.5 on the sigmoid, i.e. the sign of the score.
  bool predict(const double* row) const { return score(row) >= 0.0; }
};

namespace logit {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double log1p_exp(double z) {  // log(1 + e^z), stable for large |z|
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

struct Problem {
  const std::vector<double>* features = nullptr;  // row-major, rows*dim
  const std::vector<int>* labels = nullptr;       // 0/1
  std::size_t rows = 0;
  std::size_t dim = 0;
  double C = 1.0;
  double weight_positive = 1.0;
  double weight_negative = 1.0;
};

inline double loss(const Problem& p, const std::vector<double>& w, double b) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const double* row = p.features->data() + i * p.dim;
    double s = b;
    for (std::size_t k = 0; k < p.dim; ++k) s += w[k] * row[k];
    const int y = (*p.labels)[i];
    const double cw = y == 1 ? p.weight_positive : p.weight_negative;
    const double t = y == 1 ? 1.0 : -1.0;
    total += cw * log1p_exp(-t * s);
  }
  double reg = 0.0;
  for (double wk : w) reg += wk * wk;
  return total + reg / (2.0 * p.C);
}

/// Gradient over (w, b); the last component is the bias derivative.
inline std::vector<double> gradient(const Problem& p, const std::vector<double>& w, double b) {
  std::vector<double> g(p.dim + 1, 0.0);
  for (std::size_t i = 0; i < p.rows; ++i) {
    const double* row = p.features->data() + i * p.dim;
    double s = b;
    for (std::size_t k = 0; k < p.dim; ++k) s += w[k] * row[k];
    const int y = (*p.labels)[i];
    const double cw = y == 1 ? p.weight_positive : p.weight_negative;
    const double r = cw * (sigmoid(s) - y);
    for (std::size_t k = 0; k < p.dim; ++k) g[k] += r * row[k];
    g[p.dim] += r;
  }
  for (std::size_t k = 0; k < p.dim; ++k) g[k] += w[k] / p.C;
  return g;
}

// Dense Cholesky solve of (A + damping*I) x = rhs; A in row-major order.
// Returns false when the factorization hits a non-positive pivot.
inline bool solve_spd(std::vector<double> a, std::vector<double> rhs, double damping,
                      std::size_t n, std::vector<double>& out) {
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += damping;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) sum -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (sum <= 0.0) return false;
        a[i * n + i] = std::sqrt(sum);
      } else {
        a[i * n + j] = sum / a[j * n + j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {  // forward
    double sum = rhs[i];
    for (std::size_t k = 0; k < i; ++k) sum -= a[i * n + k] * rhs[k];
    rhs[i] = sum / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {  // backward
    double sum = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) sum -= a[k * n + i] * rhs[k];
    rhs[i] = sum / a[i * n + i];
  }
  out = std::move(rhs);
  return true;
}

}  // namespace logit

/// Deterministic full-batch Newton fit with Levenberg damping.
/// Stops when the gradient 2-norm drops below `tolerance`; throws
/// ConvergenceError (carrying the final norm) if the iteration cap is hit.
inline LogisticModel train_logistic(const std::vector<double>& features,
                                    const std::vector<int>& labels, std::size_t dim, double C,
                                    double tolerance = 1e-8, std::size_t max_iterations = 10000) {
  if (dim == 0) throw ValidationError("feature subset must be nonempty");
  if (!(C > 0.0)) throw ValidationError("regularization strength C must be positive");
  const std::size_t rows = labels.size();
  if (features.size() != rows * dim)
    throw ValidationError("feature matrix size does not match rows*dim");

  std::size_t positives = 0;
  for (int y : labels) positives += static_cast<std::size_t>(y);
  const std::size_t negatives = rows - positives;
  if (positives == 0 || negatives == 0)
    throw ValidationError("training rows must contain both classes");

  logit::Problem problem;
  problem.features = &features;
  problem.labels = &labels;
  problem.rows = rows;
  problem.dim = dim;
  problem.C = C;
  problem.weight_positive = static_cast<double>(rows) / (2.0 * static_cast<double>(positives));
  problem.weight_negative = static_cast<double>(rows) / (2.0 * static_cast<double>(negatives));

  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  const std::size_t n = dim + 1;
  double grad_norm = 0.0;

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    const auto g = logit::gradient(problem, w, b);
    grad_norm = 0.0;
    for (double gk : g) grad_norm += gk * gk;
    grad_norm = std::sqrt(grad_norm);
    if (grad_norm < tolerance) {
      LogisticModel model;
      model.weights = std::move(w);
      model.bias = b;
      model.C = C;
      model.weight_positive = problem.weight_positive;
      model.weight_negative = problem.weight_negative;
      return model;
    }

    // Hessian of the weighted loss plus the ridge block.
    std::vector<double> h(n * n, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double* row = features.data() + i * dim;
      double s = b;
      for (std::size_t k = 0; k < dim; ++k) s += w[k] * row[k];
      const int y = labels[i];
      const double cw = y == 1 ? problem.weight_positive : problem.weight_negative;
      const double p = logit::sigmoid(s);
      const double curv = cw * p * (1.0 - p);
      for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t c = 0; c <= a; ++c) h[a * n + c] += curv * row[a] * row[c];
        h[dim * n + a] += curv * row[a];
      }
      h[dim * n + dim] += curv;
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = a + 1; c < n; ++c) h[a * n + c] = h[c * n + a];
    for (std::size_t k = 0; k < dim; ++k) h[k * n + k] += 1.0 / C;

    const double current = logit::loss(problem, w, b);
    double damping = 0.0;
    std::vector<double> step;
    for (;;) {
      if (logit::solve_spd(h, g, damping, n, step)) {
        std::vector<double> w_next = w;
        for (std::size_t k = 0; k < dim; ++k) w_next[k] -= step[k];
        const double b_next = b - step[dim];
        if (logit::loss(problem, w_next, b_next) <= current) {
          w = std::move(w_next);
          b = b_next;
          break;
        }
      }
      damping = damping == 0.0 ? 1e-8 : damping * 10.0;
      if (damping > 1e12)
        throw ConvergenceError("Newton damping exhausted; gradient norm " +
                               std::to_string(grad_norm), grad_norm);
    }
  }
  throw ConvergenceError("logistic regression did not converge in " +
                         std::to_string(max_iterations) + " iterations; gradient norm " +
                         std::to_string(grad_norm), grad_norm);
}

}  // namespace oromet
