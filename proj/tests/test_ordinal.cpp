#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "dvio/core/rng.hpp"
#include "support/ordinal_oracle.hpp"

using namespace dvio;
using dvio::testing::brute_force_select;
using dvio::testing::same_pairs;

namespace {

struct HistoryTable {
  std::map<FeatureId, std::vector<PredictionSample>> data;
  PredictionHistory fn() const {
    return [this](FeatureId id) {
      const auto it = data.find(id);
      if (it == data.end()) return std::span<const PredictionSample>{};
      return std::span<const PredictionSample>(it->second);
    };
  }
};

}  // namespace

TEST_CASE("pair accepted with consistent history") {
  HistoryTable hist;
  hist.data[0] = {{0, 1.0}, {1, 1.1}};
  hist.data[1] = {{0, 2.0}, {1, 2.1}};
  std::vector<OrdinalFeature> feats = {{0, Vec2(10, 10), 1.0},
                                       {1, Vec2(10.8, 10.5), 2.0}};
  const auto pairs = select_pairs(feats, hist.fn(), {});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].id_i == 0);
  CHECK(pairs[0].id_j == 1);
  CHECK(pairs[0].established_order == -1);  // feature 0 predicted farther
  CHECK(pairs[0].frames_verified == 2);
}

TEST_CASE("locality rejects distant features") {
  HistoryTable hist;
  hist.data[0] = {{0, 1.0}, {1, 1.0}};
  hist.data[1] = {{0, 2.0}, {1, 2.0}};
  std::vector<OrdinalFeature> feats = {{0, Vec2(0, 0), 1.0},
                                       {1, Vec2(100, 0), 2.0}};
  OrdinalConfig cfg;
  cfg.tau_dist = 50.0;
  CHECK(select_pairs(feats, hist.fn(), cfg).empty());
}

TEST_CASE("margin rejects near-equal predictions") {
  HistoryTable hist;
  hist.data[0] = {{0, 1.0}, {1, 1.0}};
  hist.data[1] = {{0, 1.03}, {1, 1.03}};
  std::vector<OrdinalFeature> feats = {{0, Vec2(5, 5), 1.00},
                                       {1, Vec2(6, 5), 1.03}};
  CHECK(select_pairs(feats, hist.fn(), {}).empty());  // 0.03 < 0.05 * 1.03
}

TEST_CASE("single sign reversal rejects the pair") {
  HistoryTable hist;
  hist.data[0] = {{0, 1.0}, {1, 1.0}, {2, 2.5}};  // flips above feature 1
  hist.data[1] = {{0, 2.0}, {1, 2.0}, {2, 2.0}};
  std::vector<OrdinalFeature> feats = {{0, Vec2(5, 5), 1.0},
                                       {1, Vec2(6, 5), 2.0}};
  CHECK(select_pairs(feats, hist.fn(), {}).empty());
}

TEST_CASE("too little common history rejects the pair") {
  HistoryTable hist;
  hist.data[0] = {{1, 1.0}};
  hist.data[1] = {{1, 2.0}};
  std::vector<OrdinalFeature> feats = {{0, Vec2(5, 5), 1.0},
                                       {1, Vec2(6, 5), 2.0}};
  OrdinalConfig cfg;
  CHECK(select_pairs(feats, hist.fn(), cfg).empty());
  cfg.min_common_frames = 1;
  CHECK(select_pairs(feats, hist.fn(), cfg).size() == 1);
}

TEST_CASE("selection equals the brute-force filter on random frames") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = make_engine(seed, 30);
    std::uniform_real_distribution<double> upx(0.0, 320.0);
    std::uniform_real_distribution<double> upy(0.0, 240.0);
    std::uniform_real_distribution<double> ud(0.1, 3.0);
    std::uniform_int_distribution<int> uh(0, 4);
    std::normal_distribution<double> jitter(0.0, 0.02);

    const int n = 150;
    HistoryTable hist;
    std::vector<OrdinalFeature> feats;
    for (int i = 0; i < n; ++i) {
      const double base = ud(rng);
      feats.push_back({i, Vec2(upx(rng), upy(rng)), base});
      const int h = uh(rng);
      for (int k = 0; k < h; ++k) {
        hist.data[i].push_back({k, base + jitter(rng)});
      }
    }
    OrdinalConfig cfg;
    cfg.tau_dist = 40.0;
    const auto fast = select_pairs(feats, hist.fn(), cfg);
    const auto slow = brute_force_select(feats, hist.fn(), cfg);
    CHECK(same_pairs(fast, slow));
  }
}

TEST_CASE("budget caps pairs per feature") {
  HistoryTable hist;
  std::vector<OrdinalFeature> feats;
  for (int i = 0; i < 8; ++i) {
    feats.push_back({i, Vec2(10.0 + i, 10.0), 1.0 + 0.5 * i});
    hist.data[i] = {{0, 1.0 + 0.5 * i}, {1, 1.0 + 0.5 * i}};
  }
  OrdinalConfig cfg;
  const auto pairs = select_pairs(feats, hist.fn(), cfg);
  std::map<FeatureId, int> count;
  for (const auto& p : pairs) {
    ++count[p.id_i];
    ++count[p.id_j];
  }
  for (const auto& [id, c] : count) CHECK(c <= cfg.max_pairs_per_feature);
  CHECK_FALSE(pairs.empty());
  // Brute force agrees under the same budget.
  CHECK(same_pairs(pairs, brute_force_select(feats, hist.fn(), cfg)));
}

TEST_CASE("ordinal residual hinge") {
  OrdinalConfig cfg;
  CHECK(ordinal_residual(1.0, 0.5, cfg) == doctest::Approx(0.0));
  CHECK(ordinal_residual(0.5, 0.6, cfg) == doctest::Approx(0.11));
  CHECK(ordinal_residual(1.0, 1.0, cfg) == doctest::Approx(0.02));
}

TEST_CASE("ordinal residual is nonnegative and piecewise linear") {
  OrdinalConfig cfg;
  auto rng = make_engine(4, 31);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double di = u(rng), dj = u(rng);
    const double r = ordinal_residual(di, dj, cfg);
    CHECK(r >= 0.0);
    if (di >= dj + cfg.epsilon_coeff * di) CHECK(r == doctest::Approx(0.0));
  }
  // Continuity across the kink along a line d_i = t, d_j fixed.
  const double dj = 1.0;
  const double kink = dj / (1.0 - cfg.epsilon_coeff);
  const double eps = 1e-9;
  CHECK(std::abs(ordinal_residual(kink - eps, dj, cfg) -
                 ordinal_residual(kink + eps, dj, cfg)) < 1e-8);
}

TEST_CASE("ordinal jacobian matches the hinge sides") {
  OrdinalConfig cfg;
  double j_di, j_dj;
  ordinal_jacobian(0.5, 0.6, cfg, j_di, j_dj);  // active
  CHECK(j_di == doctest::Approx(cfg.epsilon_coeff - 1.0));
  CHECK(j_dj == doctest::Approx(1.0));
  ordinal_jacobian(1.0, 0.5, cfg, j_di, j_dj);  // inactive
  CHECK(j_di == doctest::Approx(0.0));
  CHECK(j_dj == doctest::Approx(0.0));
}
