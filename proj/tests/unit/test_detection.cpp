#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/detection/pca.hpp"
#include "anomalens/error.hpp"
#include "generators.hpp"

using namespace anomalens;
using namespace anomalens::detection;
using namespace anomalens::testing;

namespace {

nn::DenseNetwork linear_net(Matrix w) {
  const Index n = w.rows();
  return nn::DenseNetwork({nn::Layer{std::move(w), Vector::Zero(n), nn::Activation::kIdentity}});
}

TrainingStats flat_stats(Index n) {
  return TrainingStats{Vector::Zero(n), Vector::Ones(n), 0.0, 0.0};
}

AutoencoderDetector unit_box_detector(Matrix w, double threshold) {
  const Index n = w.rows();
  return AutoencoderDetector(linear_net(std::move(w)), Normalizer(Vector::Zero(n), Vector::Ones(n)),
                             flat_stats(n), threshold);
}

}  // namespace

TEST_CASE("normalizer: affine map fitted on training extremes") {
  Dataset train{{0.0, 100.0, 200.0}, {5.0, 5.0, 5.0}};
  const auto norm = Normalizer::fit(train);
  CHECK(norm.apply(Vector{{100.0, 5.0}}) == Vector{{0.5, 0.0}});
  CHECK(norm.apply(Vector{{400.0, 9.0}}) == Vector{{2.0, 0.0}});
  CHECK(norm.apply(norm.min()) == Vector::Zero(2));
  CHECK(norm.apply(Vector{{200.0, 5.0}}) == Vector{{1.0, 0.0}});
  CHECK_THROWS_AS(Normalizer::fit(Dataset(2, 0)), DataError);
}

TEST_CASE("property: normalizer round trip and unit box") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(8));
    const Dataset train = random_matrix(rng, n, 2 + static_cast<Index>(rng.below(30)), -50.0, 50.0);
    const auto norm = Normalizer::fit(train);
    const Dataset z = norm.apply(train);
    CHECK(z.minCoeff() >= 0.0);
    CHECK(z.maxCoeff() <= 1.0);
    for (Index i = 0; i < n; ++i) {
      CHECK(z.row(i).minCoeff() == 0.0);
      CHECK(z.row(i).maxCoeff() == 1.0);
    }
    const Vector x = random_vector(rng, n, -100.0, 100.0);
    CHECK((norm.invert(norm.apply(x)) - x).cwiseAbs().maxCoeff() <= 1e-12 * 100.0);
  }
}

TEST_CASE("score: identity and hand-computed reconstruction") {
  const auto id = unit_box_detector(Matrix::Identity(2, 2), 0.1);
  CHECK(id.score(Vector{{0.3, 0.9}}) == 0.0);
  CHECK_FALSE(id.is_anomalous(Vector{{5.0, -3.0}}));
  CHECK(id.reconstruction_error(Vector{{0.3, 0.9}}).isZero(0.0));

  // Reconstruction of (1, 0) is (0.5, 0.5).
  const auto avg = unit_box_detector(Matrix::Constant(2, 2, 0.5), 0.0);
  CHECK(avg.score(Vector{{1.0, 0.0}}) == doctest::Approx(0.25).epsilon(1e-15));

  const auto zero = unit_box_detector(Matrix::Zero(2, 2), 0.0);
  CHECK(zero.is_anomalous(Vector{{0.2, 0.0}}));
  CHECK(zero.reconstruction_error(Vector{{0.2, 0.7}}) == Vector{{-0.2, -0.7}});
  CHECK_THROWS_AS(zero.score(Vector::Zero(3)), DataError);
}

TEST_CASE("decision uses a strict inequality") {
  auto det = unit_box_detector(Matrix::Constant(2, 2, 0.5), 0.25);
  const auto d = det.evaluate(Vector{{1.0, 0.0}});
  CHECK(d.score == det.threshold());
  CHECK_FALSE(d.anomalous);
  det.set_threshold(0.2499);
  CHECK(det.is_anomalous(Vector{{1.0, 0.0}}));
  CHECK_THROWS_AS(det.set_threshold(-1.0), DataError);
}

TEST_CASE("property: score equals mean square of the error vector") {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    const auto net = random_network(rng, 3, 6, true);
    const Index n = net.input_dim();
    const Dataset train = random_matrix(rng, n, 10, 0.0, 10.0);
    const auto norm = Normalizer::fit(train);
    AutoencoderDetector det(net, norm, compute_training_stats(net, norm, train));
    const Vector x = random_vector(rng, n, -2.0, 12.0);
    const Vector e = det.reconstruction_error(x);
    CHECK(std::abs(det.score(x) - e.squaredNorm() / static_cast<double>(n)) <= 1e-12 * (1.0 + det.score(x)));
  }
}

TEST_CASE("outlier degree is a raw z-score with a sentinel for constant dims") {
  Dataset train{{1.0, 3.0}, {4.0, 4.0}};
  const auto norm = Normalizer::fit(train);
  const auto net = linear_net(Matrix::Identity(2, 2));
  AutoencoderDetector det(net, norm, compute_training_stats(net, norm, train));
  CHECK(det.stats().feature_mean == Vector{{2.0, 4.0}});
  CHECK(det.stats().feature_std == Vector{{1.0, 0.0}});
  CHECK(det.outlier_degree(Vector{{2.0, 4.0}}).isZero(0.0));
  CHECK(det.outlier_degree(Vector{{4.0, 4.0}})[0] == 2.0);
  CHECK(det.outlier_degree(Vector{{2.0, 5.0}})[1] == kOutlierSentinel);
  CHECK(det.outlier_degree(Vector{{2.0, 3.0}})[1] == -kOutlierSentinel);
}

TEST_CASE("train_detector: threshold from training MSE stats, few false alarms on fresh data") {
  Rng rng(77);
  auto sample = [&](Index records) {
    Dataset d(6, records);
    for (Index t = 0; t < records; ++t) {
      const double a = rng.uniform(), b = rng.uniform();
      d.col(t) << a, b, a + b, a - b, 2 * a, 0.5 * b + 0.01 * rng.normal();
    }
    return d;
  };
  const Dataset train = sample(600);
  const Index hidden[] = {3};
  const auto plan = ActivationPlan::uniform(1, nn::Activation::kSigmoid, nn::Activation::kIdentity);
  nn::TrainConfig cfg{.epochs = 60, .batch_size = 20, .learning_rate = 0.1, .weight_decay = 1e-6, .seed = 3};
  const auto det = train_detector(train, hidden, plan, cfg);
  CHECK(det.threshold() == doctest::Approx(det.stats().mse_mean + 3.0 * det.stats().mse_std).epsilon(1e-15));
  const Vector train_scores = det.score_batch(train);
  CHECK(train_scores.mean() == doctest::Approx(det.stats().mse_mean).epsilon(1e-12));

  const Vector fresh = det.score_batch(sample(2000));
  const double flagged = (fresh.array() > det.threshold()).cast<double>().mean();
  CHECK(flagged <= 0.05);

  const auto again = train_detector(train, hidden, plan, cfg);
  CHECK(again.score_batch(train) == train_scores);
}

TEST_CASE("train_detector: active relu biases start every unit active") {
  Rng rng(9);
  const Dataset train = random_matrix(rng, 8, 50, 0.0, 1.0);
  const Index hidden[] = {5};
  auto plan = ActivationPlan::uniform(1, nn::Activation::kRelu, nn::Activation::kIdentity);
  plan.relu_bias = ActivationPlan::ReluBias::kActive;
  nn::TrainConfig cfg{.epochs = 0, .batch_size = 10};
  const auto det = train_detector(train, hidden, plan, cfg);
  const auto& l = det.network().layer(0);
  const Matrix pre = (l.weights * det.normalizer().apply(train)).colwise() + l.biases;
  CHECK(pre.minCoeff() >= -1e-12);
  for (Index i = 0; i < pre.rows(); ++i) CHECK(pre.row(i).minCoeff() == doctest::Approx(0.0));
}

TEST_CASE("pca: principal direction of points on y = x") {
  Dataset train{{0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0, 3.0}};
  const auto pca = PcaBaseline::fit(train, 1);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(pca.components()(0, 0)) == doctest::Approx(s));
  CHECK(std::abs(pca.components()(0, 1)) == doctest::Approx(s));
  CHECK(pca.score(Vector{{1.7, 1.7}}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(PcaBaseline::fit(train, 3), DataError);
}

TEST_CASE("property: pca against brute-force covariance and least squares") {
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(7));
    const Index m = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n + 1)));
    const Dataset train = random_matrix(rng, n, 40, 0.0, 5.0);
    const auto pca = PcaBaseline::fit(train, m);
    const Matrix& p = pca.components();
    CHECK(p.rows() == m);
    if (m > 0) CHECK((p * p.transpose() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-8);
    for (Index k = 1; k < m; ++k) CHECK(pca.explained_variance()[k] <= pca.explained_variance()[k - 1]);

    // Brute-force sample covariance: each component is an eigenvector.
    const Dataset z = pca.normalizer().apply(train);
    const Vector mean = z.rowwise().mean();
    CHECK((mean - pca.mean()).cwiseAbs().maxCoeff() <= 1e-12);
    Matrix cov = Matrix::Zero(n, n);
    for (Index c = 0; c < z.cols(); ++c) cov += (z.col(c) - mean) * (z.col(c) - mean).transpose();
    cov /= static_cast<double>(z.cols());
    for (Index k = 0; k < m; ++k) {
      const Vector v = p.row(k).transpose();
      CHECK((cov * v - pca.explained_variance()[k] * v).norm() <= 1e-8);
    }

    // Residual from the normal equations min_c ||P^T c - y||.
    const Vector x = random_vector(rng, n, -1.0, 6.0);
    const Vector y = pca.normalizer().apply(x) - mean;
    double expected = y.squaredNorm() / static_cast<double>(n);
    if (m > 0) {
      const Matrix a = p.transpose();
      const Vector c = (a.transpose() * a).ldlt().solve(a.transpose() * y);
      expected = (y - a * c).squaredNorm() / static_cast<double>(n);
    }
    CHECK(std::abs(pca.score(x) - expected) <= 1e-10);
    if (m == n) CHECK(pca.score_batch(train).cwiseAbs().maxCoeff() <= 1e-8);
  }
}
