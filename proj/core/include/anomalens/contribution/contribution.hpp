#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/types.hpp"

namespace anomalens::contribution {

/// Proximal operator of t * ||.||_1: sign(v_i) * max(|v_i| - t, 0).
Vector soft_threshold(const Vector& v, double t);

/// Eight values log-spaced from 1e-1 down to 1e-4.
std::vector<double> default_lambdas();

struct ContributionConfig {
  /// Regularization strengths, tried from largest to smallest.
  std::vector<double> lambdas = default_lambdas();
  /// Fixed step size; unset selects backtracking.
  std::optional<double> step_size;
  /// First trial step of the backtracking search. Later iterations start
  /// from twice the previously accepted step and halve on rejection.
  double initial_step = 1.0;
  std::size_t max_iters = 500;
  /// Stop once MSE(x - eta) drops below this value. Defaults to the
  /// detector's threshold.
  std::optional<double> mse_stop;
  /// Stop a lambda run early once no coordinate moves more than this.
  double tolerance = 0.0;
};

/// Contribution degree eta, in normalized units: positive where the record
/// sits above the value the model finds plausible.
struct ContributionResult {
  Vector eta;
  double lambda_used = 0.0;
  std::size_t iterations = 0;
  double final_mse = 0.0;
  bool converged = false;  // final_mse < mse_stop (or the record was never anomalous)
};

/// Smooth reconstruction score S(z) of a normalized record z and its gradient
/// with respect to z. The solver minimizes S(x - eta) + lambda * ||eta||_1.
struct SmoothScore {
  std::function<double(const Vector&)> value;
  std::function<double(const Vector&, Vector&)> value_and_gradient;
};

SmoothScore detector_score(const detection::AutoencoderDetector& detector);

/// Proximal gradient for one lambda, starting from eta = 0:
///   eta <- soft_threshold(eta - step * grad, step * lambda)
/// When `objective_trace` is given, the composite objective after every
/// accepted step is appended. Throws NumericalError on non-finite values.
ContributionResult solve_for_lambda(const SmoothScore& score, const Vector& x, double lambda,
                                    const ContributionConfig& config, double mse_stop,
                                    std::vector<double>* objective_trace = nullptr);

/// Runs lambdas from largest to smallest and returns the first (sparsest)
/// run that reaches mse_stop; if none does, the run with the lowest final
/// MSE, flagged not converged. A record already at or below mse_stop yields
/// eta = 0 without iterating.
ContributionResult sweep_lambdas(const SmoothScore& score, const Vector& x,
                                 const ContributionConfig& config, double mse_stop);

/// Sparse contribution degree of a raw record under an autoencoder detector.
ContributionResult estimate_contribution(const detection::AutoencoderDetector& detector,
                                         const FeatureVector& raw,
                                         const ContributionConfig& config = {});

/// Same iteration with lambda = 0 (plain gradient descent on eta) and the
/// same stopping rule.
ContributionResult contribution_without_l1(const detection::AutoencoderDetector& detector,
                                           const FeatureVector& raw,
                                           const ContributionConfig& config = {});

}  // namespace anomalens::contribution
