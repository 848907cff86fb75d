#include "anomalens/contribution/contribution.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "anomalens/error.hpp"

namespace anomalens::contribution {

namespace {

constexpr double kMinStep = 1e-14;

[[noreturn]] void fail(double lambda, std::size_t iteration) {
  throw NumericalError("contribution: non-finite value at lambda=" + std::to_string(lambda) +
                       ", iteration " + std::to_string(iteration));
}

ContributionResult zero_result(Index n, double lambda, double mse) {
  ContributionResult r;
  r.eta = Vector::Zero(n);
  r.lambda_used = lambda;
  r.final_mse = mse;
  r.converged = true;
  return r;
}

}  // namespace

Vector soft_threshold(const Vector& v, double t) {
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::abs(v[i]) - t;
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, v[i]) : 0.0;
  }
  return out;
}

std::vector<double> default_lambdas() {
  std::vector<double> lambdas;
  for (int i = 0; i < 8; ++i) lambdas.push_back(std::pow(10.0, -1.0 - 3.0 * i / 7.0));
  return lambdas;
}

SmoothScore detector_score(const detection::AutoencoderDetector& detector) {
  if (!detector.trained()) throw DataError("contribution: detector is not trained");
  const nn::DenseNetwork* net = &detector.network();
  return SmoothScore{
      [net](const Vector& z) { return nn::reconstruction_mse(*net, z); },
      [net](const Vector& z, Vector& grad) {
        return nn::reconstruction_mse_and_gradient(*net, z, grad);
      }};
}

ContributionResult solve_for_lambda(const SmoothScore& score, const Vector& x, double lambda,
                                    const ContributionConfig& config, double mse_stop,
                                    std::vector<double>* objective_trace) {
  const Index n = x.size();
  Vector eta = Vector::Zero(n);
  Vector grad_z;
  double smooth = score.value_and_gradient(x, grad_z);
  if (!std::isfinite(smooth) || !grad_z.allFinite()) fail(lambda, 0);

  ContributionResult result;
  result.lambda_used = lambda;
  double step = config.step_size.value_or(config.initial_step);
  [[maybe_unused]] double objective = smooth;

  for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
    // d/d(eta) S(x - eta) = -grad_z
    const Vector grad_eta = -grad_z;
    Vector candidate;
    double candidate_smooth = 0.0;
    if (config.step_size) {
      candidate = soft_threshold(eta - step * grad_eta, step * lambda);
      candidate_smooth = score.value(x - candidate);
      if (!std::isfinite(candidate_smooth) || !candidate.allFinite()) fail(lambda, iter);
    } else {
      if (iter > 1) step *= 2.0;
      for (;;) {
        candidate = soft_threshold(eta - step * grad_eta, step * lambda);
        candidate_smooth = score.value(x - candidate);
        if (!std::isfinite(candidate_smooth) || !candidate.allFinite()) fail(lambda, iter);
        const Vector move = candidate - eta;
        const double model =
            smooth + grad_eta.dot(move) + move.squaredNorm() / (2.0 * step);
        if (candidate_smooth <= model) break;
        step *= 0.5;
        if (step < kMinStep) break;
      }
      if (step < kMinStep) break;  // no admissible step: stationary to working precision
    }

    const double max_move = (candidate - eta).cwiseAbs().maxCoeff();
    eta = std::move(candidate);
    smooth = score.value_and_gradient(x - eta, grad_z);
    if (!std::isfinite(smooth) || !grad_z.allFinite()) fail(lambda, iter);
    result.iterations = iter;

    const double composite = smooth + lambda * eta.lpNorm<1>();
    if (objective_trace != nullptr) objective_trace->push_back(composite);
#ifndef NDEBUG
    if (!config.step_size) {
      assert(composite <= objective + 1e-12 * (1.0 + std::abs(objective)));
    }
    objective = composite;
#endif

    if (smooth < mse_stop) {
      result.converged = true;
      break;
    }
    if (max_move <= config.tolerance) break;
  }
  result.eta = std::move(eta);
  result.final_mse = smooth;
  return result;
}

ContributionResult sweep_lambdas(const SmoothScore& score, const Vector& x,
                                 const ContributionConfig& config, double mse_stop) {
  if (config.lambdas.empty()) throw DataError("contribution: no lambda values configured");
  if (config.max_iters == 0) throw DataError("contribution: max_iters must be at least 1");
  std::vector<double> lambdas = config.lambdas;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw DataError("contribution: lambda values must be positive");
  }
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  const double initial = score.value(x);
  if (!std::isfinite(initial)) fail(lambdas.front(), 0);
  if (initial <= mse_stop) return zero_result(x.size(), lambdas.front(), initial);

  std::optional<ContributionResult> best;
  for (double lambda : lambdas) {
    ContributionResult run = solve_for_lambda(score, x, lambda, config, mse_stop);
    if (run.converged) return run;
    if (!best || run.final_mse < best->final_mse) best = std::move(run);
  }
  return *best;
}

ContributionResult estimate_contribution(const detection::AutoencoderDetector& detector,
                                         const FeatureVector& raw,
                                         const ContributionConfig& config) {
  const SmoothScore score = detector_score(detector);
  const Vector x = detector.normalizer().apply(raw);
  return sweep_lambdas(score, x, config, config.mse_stop.value_or(detector.threshold()));
}

ContributionResult contribution_without_l1(const detection::AutoencoderDetector& detector,
                                           const FeatureVector& raw,
                                           const ContributionConfig& config) {
  const SmoothScore score = detector_score(detector);
  const Vector x = detector.normalizer().apply(raw);
  const double mse_stop = config.mse_stop.value_or(detector.threshold());
  const double initial = score.value(x);
  if (!std::isfinite(initial)) fail(0.0, 0);
  if (initial <= mse_stop) return zero_result(x.size(), 0.0, initial);
  return solve_for_lambda(score, x, 0.0, config, mse_stop);
}

}  // namespace anomalens::contribution
