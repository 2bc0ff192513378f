#include "hte/causal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hte/common.hpp"
#include "hte/parallel.hpp"

namespace hte {

std::size_t CausalSample::n_treated() const {
  return static_cast<std::size_t>(std::count(W.begin(), W.end(), 1));
}

std::size_t CausalSample::n_control() const {
  return static_cast<std::size_t>(std::count(W.begin(), W.end(), 0));
}

void CausalSample::validate() const {
  if (X.rows != W.size() || X.rows != Y.size()) {
    throw ValidationError("causal sample: X, W, Y lengths differ");
  }
  if (feature_names.size() != X.cols) {
    throw ValidationError("causal sample: feature names do not match X");
  }
  for (int w : W) {
    if (w != 0 && w != 1) throw ValidationError("causal sample: W must be 0/1");
  }
  if (n_treated() == 0 || n_control() == 0) {
    throw ValidationError("causal sample: both treatment arms must be non-empty");
  }
}

namespace {

constexpr double kPropensityClipLo = 0.01;
constexpr double kPropensityClipHi = 0.99;

}  // namespace

NuisanceFit fit_nuisance(const CausalSample& sample, int folds,
                         const BoostConfig& config, std::uint64_t seed) {
  sample.validate();
  if (folds < 2) throw ValidationError("fit_nuisance: folds must be >= 2");
  if (sample.n_treated() < static_cast<std::size_t>(folds) ||
      sample.n_control() < static_cast<std::size_t>(folds)) {
    throw ValidationError("fit_nuisance: each arm needs at least `folds` rows");
  }

  const std::size_t n = sample.n();
  NuisanceFit fit;
  fit.oof.fold.assign(n, -1);
  fit.oof.e_hat.assign(n, 0.0);
  fit.oof.m1_hat.assign(n, 0.0);
  fit.oof.m0_hat.assign(n, 0.0);

  // Arm-stratified fold assignment keeps every training set two-armed.
  Rng rng(split_seed(seed, 0x6f6c64ULL));
  std::vector<std::size_t> treated, control;
  for (std::size_t i = 0; i < n; ++i) {
    (sample.W[i] == 1 ? treated : control).push_back(i);
  }
  rng.shuffle(treated);
  rng.shuffle(control);
  for (std::size_t i = 0; i < treated.size(); ++i) {
    fit.oof.fold[treated[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  for (std::size_t i = 0; i < control.size(); ++i) {
    fit.oof.fold[control[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  for (int k = 0; k < folds; ++k) {
    std::vector<std::size_t> train_rows, train_treated, train_control, held;
    for (std::size_t i = 0; i < n; ++i) {
      if (fit.oof.fold[i] == k) {
        held.push_back(i);
      } else {
        train_rows.push_back(i);
        (sample.W[i] == 1 ? train_treated : train_control).push_back(i);
      }
    }

    auto submatrix = [&](const std::vector<std::size_t>& rows) {
      Matrix m(rows.size(), sample.X.cols);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto src = sample.X.row(rows[r]);
        std::copy(src.begin(), src.end(), m.row(r).begin());
      }
      return m;
    };

    std::vector<double> w_train(train_rows.size());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      w_train[r] = static_cast<double>(sample.W[train_rows[r]]);
    }
    std::vector<double> y_treated(train_treated.size()), y_control(train_control.size());
    for (std::size_t r = 0; r < train_treated.size(); ++r) y_treated[r] = sample.Y[train_treated[r]];
    for (std::size_t r = 0; r < train_control.size(); ++r) y_control[r] = sample.Y[train_control[r]];

    auto e_model = fit_boosted(submatrix(train_rows), sample.feature_names, w_train,
                               Loss::logistic, config);
    auto m1_model = fit_boosted(submatrix(train_treated), sample.feature_names,
                                y_treated, Loss::squared_error, config);
    auto m0_model = fit_boosted(submatrix(train_control), sample.feature_names,
                                y_control, Loss::squared_error, config);

    Matrix held_X = submatrix(held);
    auto e_pred = e_model.predict(held_X);
    auto m1_pred = m1_model.predict(held_X);
    auto m0_pred = m0_model.predict(held_X);
    for (std::size_t r = 0; r < held.size(); ++r) {
      fit.oof.e_hat[held[r]] = e_pred[r];
      fit.oof.m1_hat[held[r]] = m1_pred[r];
      fit.oof.m0_hat[held[r]] = m0_pred[r];
    }

    fit.models.propensity.push_back(std::move(e_model));
    fit.models.outcome_treated.push_back(std::move(m1_model));
    fit.models.outcome_control.push_back(std::move(m0_model));
  }

  std::size_t clipped = 0;
  for (double& e : fit.oof.e_hat) {
    if (e < kPropensityClipLo || e > kPropensityClipHi) {
      e = std::clamp(e, kPropensityClipLo, kPropensityClipHi);
      ++clipped;
    }
    fit.oof.e_min = std::min(fit.oof.e_min, e);
    fit.oof.e_max = std::max(fit.oof.e_max, e);
  }
  fit.oof.clip_share = static_cast<double>(clipped) / static_cast<double>(n);
  if (clipped > 0) {
    fit.oof.warnings.push_back(
        "propensity overlap: " + std::to_string(clipped) +
        " rows clipped to [0.01, 0.99]; treatment may be near-deterministic");
  }
  return fit;
}

std::vector<double> aipw_scores(const CausalSample& sample,
                                const NuisancePredictions& nuisance) {
  const std::size_t n = sample.n();
  if (nuisance.e_hat.size() != n || nuisance.m1_hat.size() != n ||
      nuisance.m0_hat.size() != n) {
    throw ValidationError("aipw_scores: nuisance predictions misaligned with sample");
  }
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    double e = nuisance.e_hat[i];
    if (!(e > 0.0 && e < 1.0)) {
      throw NumericError("aipw_scores: propensity outside (0, 1) despite clipping");
    }
    double m1 = nuisance.m1_hat[i];
    double m0 = nuisance.m0_hat[i];
    double w = static_cast<double>(sample.W[i]);
    scores[i] = m1 - m0 + w * (sample.Y[i] - m1) / e -
                (1.0 - w) * (sample.Y[i] - m0) / (1.0 - e);
  }
  return scores;
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

AteReport estimate_ate(const std::vector<double>& scores) {
  const std::size_t n = scores.size();
  if (n < 2) throw ValidationError("estimate_ate: needs at least 2 scores");
  double mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                static_cast<double>(n);
  double ss = 0.0;
  for (double s : scores) {
    double d = s - mean;
    ss += d * d;
  }
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  double se = std::max(sd / std::sqrt(static_cast<double>(n)), 1e-12);

  AteReport report;
  report.ate = mean;
  report.se = se;
  report.ci_lo = mean - 1.96 * se;
  report.ci_hi = mean + 1.96 * se;
  double z = std::abs(mean) / se;
  report.p_value = std::erfc(z / std::sqrt(2.0));
  report.stars = significance_stars(report.p_value);
  report.n = n;
  return report;
}

void ForestConfig::validate() const {
  if (n_trees < 1) throw ValidationError("forest: n_trees must be >= 1");
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
    throw ValidationError("forest: subsample_fraction must be in (0, 1]");
  }
  if (!(honesty_fraction > 0.0 && honesty_fraction < 1.0)) {
    throw ValidationError("forest: honesty_fraction must be in (0, 1)");
  }
  if (min_node < 1) throw ValidationError("forest: min_node must be >= 1");
  if (max_depth < 0) throw ValidationError("forest: max_depth must be >= 0");
  if (mtry < 0) throw ValidationError("forest: mtry must be >= 0");
}

int ForestConfig::resolve_mtry(std::size_t d) const {
  if (mtry > 0) return std::min(mtry, static_cast<int>(d));
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
}

namespace {

struct ArmStats {
  int n1 = 0, n0 = 0;
  double sum1 = 0.0, sum0 = 0.0;

  void add(int w, double y) {
    if (w == 1) {
      ++n1;
      sum1 += y;
    } else {
      ++n0;
      sum0 += y;
    }
  }
  bool two_armed() const { return n1 > 0 && n0 > 0; }
  double tau() const { return sum1 / n1 - sum0 / n0; }
};

struct CausalSplit {
  double criterion = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool found = false;
};

CausalSplit find_causal_split(const Matrix& X, const std::vector<int>& W,
                              const std::vector<double>& Y,
                              const std::vector<std::size_t>& rows,
                              const std::vector<int>& features,
                              const ForestConfig& cfg, const ArmStats& node) {
  CausalSplit best;
  const double n_total = static_cast<double>(rows.size());
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(rows.size());
  for (int f : features) {
    order.clear();
    for (std::size_t r : rows) order.emplace_back(X.at(r, static_cast<std::size_t>(f)), r);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ArmStats left;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      std::size_t r = order[i].second;
      left.add(W[r], Y[r]);
      if (order[i].first == order[i + 1].first) continue;
      ArmStats right{node.n1 - left.n1, node.n0 - left.n0,
                     node.sum1 - left.sum1, node.sum0 - left.sum0};
      if (left.n1 < cfg.min_node || left.n0 < cfg.min_node ||
          right.n1 < cfg.min_node || right.n0 < cfg.min_node) {
        continue;
      }
      double delta = left.tau() - right.tau();
      double criterion = delta * delta;
      if (cfg.weighted_criterion) {
        double nl = static_cast<double>(i + 1);
        double nr = n_total - nl;
        criterion *= nl * nr / (n_total * n_total);
      }
      if (criterion <= 0.0) continue;
      // Ascending feature/threshold scan order settles exact ties to the
      // lowest (feature, threshold).
      if (!best.found || criterion > best.criterion) {
        best.criterion = criterion;
        best.feature = f;
        best.threshold = 0.5 * (order[i].first + order[i + 1].first);
        best.found = true;
      }
    }
  }
  return best;
}

std::unique_ptr<CausalTreeNode> grow_node(const Matrix& X, const std::vector<int>& W,
                                          const std::vector<double>& Y,
                                          const std::vector<std::size_t>& rows,
                                          int depth, const ForestConfig& cfg,
                                          Rng& rng) {
  auto node = std::make_unique<CausalTreeNode>();
  ArmStats stats;
  for (std::size_t r : rows) stats.add(W[r], Y[r]);

  if (depth >= cfg.max_depth || !stats.two_armed() ||
      stats.n1 < 2 * cfg.min_node || stats.n0 < 2 * cfg.min_node) {
    return node;
  }

  // mtry feature draw; sorted so the scan order (and tie-breaking) is by
  // feature index.
  const std::size_t d = X.cols;
  int mtry = cfg.resolve_mtry(d);
  std::vector<int> all_features(d);
  std::iota(all_features.begin(), all_features.end(), 0);
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(mtry));
  for (int i = 0; i < mtry; ++i) {
    std::size_t j = rng.uniform_index(d - static_cast<std::size_t>(i));
    chosen.push_back(all_features[j]);
    std::swap(all_features[j], all_features[d - static_cast<std::size_t>(i) - 1]);
  }
  std::sort(chosen.begin(), chosen.end());

  CausalSplit split = find_causal_split(X, W, Y, rows, chosen, cfg, stats);
  if (!split.found) return node;

  std::vector<std::size_t> left_rows, right_rows;
  for (std::size_t r : rows) {
    (X.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left_rows
                                                                         : right_rows)
        .push_back(r);
  }
  node->feature = split.feature;
  node->threshold = split.threshold;
  node->left = grow_node(X, W, Y, left_rows, depth + 1, cfg, rng);
  node->right = grow_node(X, W, Y, right_rows, depth + 1, cfg, rng);
  return node;
}

void populate_node(CausalTreeNode& node, const Matrix& X, const std::vector<int>& W,
                   const std::vector<double>& Y,
                   const std::vector<std::size_t>& rows, double inherited_tau,
                   bool inherited_valid) {
  ArmStats stats;
  for (std::size_t r : rows) stats.add(W[r], Y[r]);
  double tau = inherited_tau;
  bool valid = inherited_valid;
  if (stats.two_armed()) {
    tau = stats.tau();
    valid = true;
  }
  node.tau = tau;
  node.n_treated = stats.n1;
  node.n_control = stats.n0;
  node.fallback = !stats.two_armed();
  if (node.is_leaf()) return;
  std::vector<std::size_t> left_rows, right_rows;
  for (std::size_t r : rows) {
    (X.at(r, static_cast<std::size_t>(node.feature)) <= node.threshold ? left_rows
                                                                       : right_rows)
        .push_back(r);
  }
  populate_node(*node.left, X, W, Y, left_rows, tau, valid);
  populate_node(*node.right, X, W, Y, right_rows, tau, valid);
}

void count_leaves(const CausalTreeNode& node, int& leaves, int& fallback_leaves) {
  if (node.is_leaf()) {
    ++leaves;
    if (node.fallback) ++fallback_leaves;
    return;
  }
  count_leaves(*node.left, leaves, fallback_leaves);
  count_leaves(*node.right, leaves, fallback_leaves);
}

}  // namespace

std::unique_ptr<CausalTreeNode> grow_causal_structure(
    const Matrix& X, const std::vector<int>& W, const std::vector<double>& Y,
    const std::vector<std::size_t>& rows, const ForestConfig& config, Rng& rng) {
  return grow_node(X, W, Y, rows, 0, config, rng);
}

void populate_leaf_estimates(CausalTreeNode& root, const Matrix& X,
                             const std::vector<int>& W,
                             const std::vector<double>& Y,
                             const std::vector<std::size_t>& estimation_rows) {
  populate_node(root, X, W, Y, estimation_rows, 0.0, false);
}

CausalForest fit_causal_forest(const CausalSample& sample, const ForestConfig& config) {
  config.validate();
  sample.validate();
  const std::size_t n = sample.n();
  if (sample.n_treated() < 2 * static_cast<std::size_t>(config.min_node) ||
      sample.n_control() < 2 * static_cast<std::size_t>(config.min_node)) {
    throw ValidationError("fit_causal_forest: each arm needs at least 2*min_node rows");
  }

  CausalForest forest;
  forest.config = config;
  forest.feature_names = sample.feature_names;
  forest.trees.resize(static_cast<std::size_t>(config.n_trees));

  parallel_for(static_cast<std::size_t>(config.n_trees), config.threads,
               [&](std::size_t b) {
    Rng rng(split_seed(config.seed, b));
    // Bootstrap with replacement, then subsample a fraction of it without
    // replacement.
    std::vector<std::size_t> bootstrap(n);
    for (std::size_t i = 0; i < n; ++i) bootstrap[i] = rng.uniform_index(n);
    rng.shuffle(bootstrap);
    std::size_t m = std::max<std::size_t>(
        2, static_cast<std::size_t>(config.subsample_fraction * static_cast<double>(n)));
    m = std::min(m, n);
    bootstrap.resize(m);

    // Honesty split: structure half then estimation half.
    std::size_t n_split = std::max<std::size_t>(
        1, static_cast<std::size_t>(config.honesty_fraction * static_cast<double>(m)));
    n_split = std::min(n_split, m - 1);
    std::vector<std::size_t> split_rows(bootstrap.begin(), bootstrap.begin() + n_split);
    std::vector<std::size_t> est_rows(bootstrap.begin() + n_split, bootstrap.end());

    CausalTree tree;
    tree.root = grow_node(sample.X, sample.W, sample.Y, split_rows, 0, config, rng);
    populate_leaf_estimates(*tree.root, sample.X, sample.W, sample.Y, est_rows);
    count_leaves(*tree.root, tree.n_leaves, tree.n_fallback_leaves);
    forest.trees[b] = std::move(tree);
  });

  long total_leaves = 0, total_fallback = 0;
  for (const auto& t : forest.trees) {
    total_leaves += t.n_leaves;
    total_fallback += t.n_fallback_leaves;
  }
  forest.fallback_leaf_share =
      total_leaves ? static_cast<double>(total_fallback) / static_cast<double>(total_leaves)
                   : 0.0;
  return forest;
}

double predict_cate_tree(const CausalTree& tree, std::span<const double> x,
                         bool* used_fallback) {
  const CausalTreeNode* node = tree.root.get();
  while (!node->is_leaf()) {
    node = x[static_cast<std::size_t>(node->feature)] <= node->threshold
               ? node->left.get()
               : node->right.get();
  }
  if (used_fallback) *used_fallback = node->fallback;
  return node->tau;
}

CatePrediction predict_cate(const CausalForest& forest, const Matrix& X) {
  if (X.cols != forest.feature_names.size()) {
    throw ValidationError("predict_cate: feature count mismatch");
  }
  CatePrediction out;
  out.tau.assign(X.rows, 0.0);
  std::size_t fallback_hits = 0;
  for (std::size_t r = 0; r < X.rows; ++r) {
    double total = 0.0;
    for (const auto& tree : forest.trees) {
      bool fb = false;
      total += predict_cate_tree(tree, X.row(r), &fb);
      if (fb) ++fallback_hits;
    }
    out.tau[r] = total / static_cast<double>(forest.trees.size());
  }
  if (X.rows > 0 && !forest.trees.empty()) {
    out.fallback_hit_share = static_cast<double>(fallback_hits) /
                             static_cast<double>(X.rows * forest.trees.size());
  }
  return out;
}

}  // namespace hte
