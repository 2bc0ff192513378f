#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "hte/boost.hpp"
#include "hte/common.hpp"
#include "hte/rng.hpp"

using namespace hte;

namespace {

Matrix column_matrix(const std::vector<std::vector<double>>& cols) {
  Matrix m(cols.front().size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < cols[c].size(); ++r) m.at(r, c) = cols[c][r];
  }
  return m;
}

// Collects (leaf, rows routed to it) pairs for the leaf-value identity.
void leaf_rows(const SplitNode* node, const Matrix& X,
               std::vector<std::size_t> rows,
               std::vector<std::pair<const SplitNode*, std::vector<std::size_t>>>& out) {
  if (node->is_leaf()) {
    out.emplace_back(node, std::move(rows));
    return;
  }
  std::vector<std::size_t> left, right;
  for (std::size_t r : rows) {
    (X.at(r, static_cast<std::size_t>(node->feature)) <= node->threshold ? left : right)
        .push_back(r);
  }
  leaf_rows(node->left.get(), X, std::move(left), out);
  leaf_rows(node->right.get(), X, std::move(right), out);
}

}  // namespace

TEST_CASE("gradients: squared error") {
  auto g = gradients(Loss::squared_error, {3.0}, {3.0});
  CHECK(g.g[0] == 0.0);
  CHECK(g.h[0] == 1.0);
  auto g2 = gradients(Loss::squared_error, {1.0}, {4.0});
  CHECK(g2.g[0] == 3.0);
  CHECK(g2.h[0] == 1.0);
}

TEST_CASE("gradients: logistic at zero margin") {
  // sigmoid(0) = 0.5 by hand: g = 0.5 - 1, h = 0.25.
  auto g = gradients(Loss::logistic, {1.0}, {0.0});
  CHECK(g.g[0] == doctest::Approx(-0.5));
  CHECK(g.h[0] == doctest::Approx(0.25));
}

TEST_CASE("gradients: errors") {
  CHECK_THROWS_AS(gradients(Loss::squared_error, {1.0, 2.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(gradients(Loss::logistic, {0.5}, {0.0}), ValidationError);
}

TEST_CASE("fit_tree: zero gradients give a single zero leaf") {
  Matrix X = column_matrix({{0, 0, 1, 1}});
  std::vector<double> g(4, 0.0), h(4, 1.0);
  BoostConfig cfg;
  auto tree = fit_tree(X, g, h, cfg);
  CHECK(tree->is_leaf());
  CHECK(tree->leaf_value == 0.0);
}

TEST_CASE("fit_tree: closed-form leaves on a binary feature") {
  Matrix X = column_matrix({{0, 0, 1, 1}});
  std::vector<double> g{-1, -1, 1, 1};
  std::vector<double> h(4, 1.0);
  BoostConfig cfg;
  cfg.lambda = 0.0;
  cfg.gamma = 0.0;
  cfg.max_depth = 1;
  cfg.min_child_weight = 0.0;
  auto tree = fit_tree(X, g, h, cfg);
  REQUIRE_FALSE(tree->is_leaf());
  CHECK(tree->threshold == doctest::Approx(0.5));
  CHECK(tree->left->leaf_value == doctest::Approx(1.0));    // -G_L/H_L = 2/2
  CHECK(tree->right->leaf_value == doctest::Approx(-1.0));  // -G_R/H_R

  // Hand-computed gain is 1/2 (4/2 + 4/2 - 0/4) = 2; gamma above it kills
  // the split.
  cfg.gamma = 2.5;
  auto pruned = fit_tree(X, g, h, cfg);
  CHECK(pruned->is_leaf());
  CHECK(pruned->leaf_value == doctest::Approx(0.0));
  cfg.gamma = 1.5;
  CHECK_FALSE(fit_tree(X, g, h, cfg)->is_leaf());
}

TEST_CASE("fit_tree: empty input and bad hessians are errors") {
  Matrix empty;
  std::vector<double> none;
  BoostConfig cfg;
  CHECK_THROWS_AS(fit_tree(empty, none, none, cfg), ValidationError);
  Matrix X = column_matrix({{1, 2}});
  std::vector<double> g{1, -1}, h{1, -0.5};
  CHECK_THROWS_AS(fit_tree(X, g, h, cfg), ValidationError);
}

TEST_CASE("every fitted leaf equals -sum(g)/(sum(h)+lambda) over its rows") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 80;
    Matrix X(n, 3);
    std::vector<double> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 3; ++j) X.at(i, j) = rng.normal();
      g[i] = rng.normal();
      h[i] = 0.5 + rng.uniform01();
    }
    BoostConfig cfg;
    cfg.max_depth = 3;
    cfg.lambda = trial % 2 ? 1.3 : 0.0;
    cfg.min_child_weight = 1.0;
    auto tree = fit_tree(X, g, h, cfg);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::pair<const SplitNode*, std::vector<std::size_t>>> leaves;
    leaf_rows(tree.get(), X, all, leaves);
    for (const auto& [leaf, rows] : leaves) {
      double G = 0, H = 0;
      for (std::size_t r : rows) {
        G += g[r];
        H += h[r];
      }
      CHECK(leaf->leaf_value == doctest::Approx(-G / (H + cfg.lambda)).epsilon(1e-10));
    }
  }
}

TEST_CASE("fit_boosted: constant target is reproduced exactly") {
  Matrix X = column_matrix({{1, 2, 3, 4, 5}});
  std::vector<double> y(5, 7.5);
  BoostConfig cfg;
  cfg.n_rounds = 13;
  auto model = fit_boosted(X, {"x"}, y, Loss::squared_error, cfg);
  for (double p : model.predict(X)) CHECK(p == doctest::Approx(7.5));
}

TEST_CASE("fit_boosted: zero rounds predict the base score") {
  Matrix X = column_matrix({{1, 2, 3}});
  std::vector<double> y{1, 2, 6};
  BoostConfig cfg;
  cfg.n_rounds = 0;
  auto model = fit_boosted(X, {"x"}, y, Loss::squared_error, cfg);
  CHECK(model.base_score == doctest::Approx(3.0));
  for (double p : model.predict(X)) CHECK(p == doctest::Approx(3.0));
}

TEST_CASE("fit_boosted: one unshrunk round recovers group means") {
  Matrix X = column_matrix({{0, 0, 0, 1, 1, 1}});
  std::vector<double> y{1, 2, 3, 10, 11, 12};
  BoostConfig cfg;
  cfg.n_rounds = 1;
  cfg.max_depth = 1;
  cfg.lambda = 0.0;
  cfg.gamma = 0.0;
  cfg.learning_rate = 1.0;
  cfg.min_child_weight = 0.0;
  auto model = fit_boosted(X, {"x"}, y, Loss::squared_error, cfg);
  auto pred = model.predict(X);
  CHECK(pred[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pred[3] == doctest::Approx(11.0).epsilon(1e-12));
}

TEST_CASE("fit_boosted: training loss is non-increasing at gamma = 0") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 120;
    Matrix X(n, 4);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 4; ++j) X.at(i, j) = rng.normal();
      y[i] = std::sin(X.at(i, 0)) + 0.5 * X.at(i, 1) + 0.3 * rng.normal();
    }
    BoostConfig cfg;
    cfg.n_rounds = 40;
    auto model = fit_boosted(X, {"a", "b", "c", "d"}, y, Loss::squared_error, cfg);
    for (std::size_t r = 1; r < model.round_loss.size(); ++r) {
      CHECK(model.round_loss[r] <= model.round_loss[r - 1] + 1e-12);
    }
  }
}

TEST_CASE("fit_boosted: logistic training loss decreases at the default rate") {
  Rng rng(5);
  const std::size_t n = 150;
  Matrix X(n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X.at(i, 0) = rng.normal();
    X.at(i, 1) = rng.normal();
    y[i] = rng.bernoulli(sigmoid(2.0 * X.at(i, 0))) ? 1.0 : 0.0;
  }
  BoostConfig cfg;
  cfg.n_rounds = 30;
  auto model = fit_boosted(X, {"a", "b"}, y, Loss::logistic, cfg);
  for (std::size_t r = 1; r < model.round_loss.size(); ++r) {
    CHECK(model.round_loss[r] <= model.round_loss[r - 1] + 1e-12);
  }
  for (double p : model.predict(X)) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("fit_boosted: degenerate inputs") {
  Matrix X = column_matrix({{1, 2, 3}});
  CHECK_THROWS_AS(
      fit_boosted(X, {"x"}, {1.0, 1.0, 1.0}, Loss::logistic, BoostConfig{}),
      ValidationError);
  Matrix no_cols;
  no_cols.rows = 3;
  CHECK_THROWS_AS(
      fit_boosted(no_cols, {}, {1.0, 0.0, 1.0}, Loss::logistic, BoostConfig{}),
      ValidationError);
}

TEST_CASE("predict: arity checks and determinism on duplicated rows") {
  Matrix X = column_matrix({{0, 1, 0, 1}, {5, 6, 5, 6}});
  std::vector<double> y{1, 2, 1, 2};
  BoostConfig cfg;
  cfg.n_rounds = 5;
  auto model = fit_boosted(X, {"a", "b"}, y, Loss::squared_error, cfg);
  auto pred = model.predict(X);
  CHECK(pred[0] == pred[2]);
  CHECK(pred[1] == pred[3]);
  Matrix wrong(4, 1);
  CHECK_THROWS_AS(model.predict(wrong), ValidationError);
}

TEST_CASE("predictions depend on feature order only (monotone transform invariance)") {
  Rng rng(17);
  const std::size_t n = 60;
  Matrix X(n, 1);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X.at(i, 0) = rng.normal();
    y[i] = X.at(i, 0) > 0 ? 1.5 : -0.5;
  }
  // exp is strictly monotone; thresholds are recomputed by the fit.
  Matrix Xt(n, 1);
  for (std::size_t i = 0; i < n; ++i) Xt.at(i, 0) = std::exp(X.at(i, 0));
  BoostConfig cfg;
  cfg.n_rounds = 10;
  auto m1 = fit_boosted(X, {"x"}, y, Loss::squared_error, cfg);
  auto m2 = fit_boosted(Xt, {"x"}, y, Loss::squared_error, cfg);
  auto p1 = m1.predict(X);
  auto p2 = m2.predict(Xt);
  for (std::size_t i = 0; i < n; ++i) CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-12));
}

TEST_CASE("JSON round trip preserves predictions bit-exactly") {
  Rng rng(29);
  const std::size_t n = 50;
  Matrix X(n, 3);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) X.at(i, j) = rng.normal();
    y[i] = X.at(i, 1) * 2.0 + rng.normal();
  }
  BoostConfig cfg;
  cfg.n_rounds = 8;
  auto model = fit_boosted(X, {"a", "b", "c"}, y, Loss::squared_error, cfg);
  auto restored = BoostedEnsemble::from_json_string(model.to_json_string());
  auto p1 = model.predict(X);
  auto p2 = restored.predict(X);
  for (std::size_t i = 0; i < n; ++i) CHECK(p1[i] == p2[i]);
}

TEST_CASE("same config and data give identical models") {
  Rng rng(31);
  const std::size_t n = 70;
  Matrix X(n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X.at(i, 0) = rng.normal();
    X.at(i, 1) = rng.normal();
    y[i] = X.at(i, 0) - X.at(i, 1) + rng.normal();
  }
  BoostConfig cfg;
  cfg.n_rounds = 12;
  auto a = fit_boosted(X, {"a", "b"}, y, Loss::squared_error, cfg);
  auto b = fit_boosted(X, {"a", "b"}, y, Loss::squared_error, cfg);
  CHECK(a.to_json_string() == b.to_json_string());
}

TEST_CASE("equal-gain splits resolve to the lowest feature index") {
  // Two identical columns: every candidate gain ties, so the split must
  // land on feature 0.
  Matrix X = column_matrix({{0, 0, 1, 1}, {0, 0, 1, 1}});
  std::vector<double> g{-1, -1, 1, 1};
  std::vector<double> h(4, 1.0);
  BoostConfig cfg;
  cfg.max_depth = 1;
  cfg.min_child_weight = 0.0;
  auto tree = fit_tree(X, g, h, cfg);
  REQUIRE_FALSE(tree->is_leaf());
  CHECK(tree->feature == 0);
}

TEST_CASE("config validation bounds") {
  BoostConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = BoostConfig{};
  cfg.max_depth = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = BoostConfig{};
  cfg.lambda = -1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
