#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "anomalens/error.hpp"
#include "anomalens/eval/events.hpp"
#include "anomalens/eval/roc.hpp"
#include "anomalens/eval/summary.hpp"
#include "generators.hpp"

using namespace anomalens;
using namespace anomalens::eval;

namespace {

double pairwise_auroc(const std::vector<double>& s, const std::vector<char>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (!y[a]) continue;
    for (std::size_t n = 0; n < s.size(); ++n) {
      if (y[n]) continue;
      pairs += 1.0;
      wins += s[a] > s[n] ? 1.0 : (s[a] == s[n] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

RocCurve roc(const std::vector<double>& s, const std::vector<char>& y) {
  std::unique_ptr<bool[]> flags(new bool[y.size()]);
  for (std::size_t i = 0; i < y.size(); ++i) flags[i] = y[i] != 0;
  return roc_auc(s, std::span<const bool>(flags.get(), y.size()));
}

}  // namespace

TEST_CASE("roc: separated, constant and degenerate inputs") {
  CHECK(roc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}).auroc == 1.0);
  CHECK(roc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}).auroc == 0.0);
  const auto flat = roc({0.5, 0.5, 0.5}, {0, 1, 1});
  CHECK(flat.auroc == 0.5);
  CHECK(flat.points.size() == 2);
  CHECK_THROWS_AS(roc({0.1, 0.2}, {1, 1}), DataError);
  CHECK_THROWS_AS(roc({0.1, 0.2}, {0, 0}), DataError);
}

TEST_CASE("property: roc matches the pairwise estimator and is monotone") {
  Rng rng(404);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng.below(999);
    std::vector<double> s(n);
    std::vector<char> y(n);
    const bool coarse = rng.bernoulli(0.5);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.3) ? 1 : 0;
      const double v = rng.normal() + (y[i] ? 0.7 : 0.0);
      s[i] = coarse ? std::round(v * 3.0) / 3.0 : v;
    }
    y[0] = 1;
    y[1] = 0;
    const auto curve = roc(s, y);
    CHECK(std::abs(curve.auroc - pairwise_auroc(s, y)) <= 1e-10);
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == 1.0);
    CHECK(curve.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
      CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
    }
  }
}

TEST_CASE("threshold_for_fpr") {
  std::vector<double> s(1000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i) * 0.001;
  Rng rng(1);
  rng.shuffle(std::span<double>(s));
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  CHECK(threshold_for_fpr(s, 0.03) == sorted[969]);
  const double top = threshold_for_fpr(s, 0.0);
  CHECK(top == std::nextafter(sorted.back(), std::numeric_limits<double>::infinity()));
  CHECK(threshold_for_fpr(s, 1.0) == -std::numeric_limits<double>::infinity());

  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + rng.below(200));
    for (double& x : v) x = std::round(rng.normal() * 4.0);
    const double target = rng.uniform();
    const double thr = threshold_for_fpr(v, target);
    const auto above = [&](double th) {
      return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x > th; })) /
             static_cast<double>(v.size());
    };
    CHECK(above(thr) <= target);
    // Any smaller candidate among the scores would exceed the target.
    for (double x : v) if (x < thr) CHECK(above(x) > target);
  }
}

TEST_CASE("event rates: vacuous, detected and saturated cases") {
  EventWindowConfig cfg;
  const std::vector<double> quiet(50, 0.0);
  const auto vacuous = event_tpr_fpr(quiet, 1.0, {}, cfg);
  CHECK(vacuous.tpr == 1.0);
  CHECK(vacuous.zero_events);
  CHECK(vacuous.fpr == 0.0);

  std::vector<double> spike(50, 0.0);
  spike[22] = 5.0;
  const std::vector<EventSpan> ev{{20, 1}};
  const auto hit = event_tpr_fpr(spike, 1.0, ev, cfg);
  CHECK(hit.tpr == 1.0);
  CHECK(hit.detected == 1);
  CHECK(hit.fpr == 0.0);
  CHECK(hit.normal_bins == 50 - 11);

  const auto all = event_tpr_fpr(spike, -1.0, ev, cfg);
  CHECK(all.fpr == 1.0);
  spike[22] = 0.0;
  spike[26] = 5.0;
  CHECK(event_tpr_fpr(spike, 1.0, ev, cfg).tpr == 0.0);

  cfg.excluded = {{0, 10}};
  CHECK(event_tpr_fpr(quiet, 1.0, ev, cfg).normal_bins == 50 - 11 - 10);
  cfg.window = -1;
  CHECK_THROWS_AS(event_tpr_fpr(quiet, 1.0, ev, cfg), DataError);
}

TEST_CASE("property: event rates ignore reordering outside windows and window contents") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(120);
    for (double& x : s) x = rng.uniform();
    const std::vector<EventSpan> ev{{30, 3}, {80, 2}};
    EventWindowConfig cfg{.window = 4};
    const auto base = event_tpr_fpr(s, 0.8, ev, cfg);

    // Permute the normal bins among themselves.
    std::vector<Index> normal;
    for (Index i = 0; i < 120; ++i) {
      const bool inside = (i >= 26 && i < 37) || (i >= 76 && i < 86);
      if (!inside) normal.push_back(i);
    }
    std::vector<Index> shuffled = normal;
    rng.shuffle(std::span<Index>(shuffled));
    std::vector<double> permuted = s;
    for (std::size_t i = 0; i < normal.size(); ++i) permuted[normal[i]] = s[shuffled[i]];
    const auto p = event_tpr_fpr(permuted, 0.8, ev, cfg);
    CHECK(p.tpr == base.tpr);
    CHECK(p.fpr == base.fpr);

    std::vector<double> rewritten = s;
    for (Index i = 26; i < 37; ++i) rewritten[i] = rng.uniform(0.0, 2.0);
    CHECK(event_tpr_fpr(rewritten, 0.8, ev, cfg).fpr == base.fpr);
    CHECK(normal_bin_scores(s, ev, cfg).size() == normal.size());
  }
}

TEST_CASE("bootstrap mean is order-independent and brackets the mean") {
  Rng rng(3);
  std::vector<double> v(10);
  for (double& x : v) x = rng.uniform();
  const auto a = bootstrap_mean(v, 5);
  std::reverse(v.begin(), v.end());
  const auto b = bootstrap_mean(v, 5);
  CHECK(a.mean == b.mean);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.lo <= a.mean);
  CHECK(a.mean <= a.hi);
  const std::vector<double> same(5, 0.4);
  const auto c = bootstrap_mean(same, 1);
  CHECK(c.lo == doctest::Approx(0.4));
  CHECK(c.hi == doctest::Approx(0.4));
  CHECK_THROWS_AS(bootstrap_mean(std::vector<double>{}, 1), DataError);
}
