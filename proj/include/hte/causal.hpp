#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hte/boost.hpp"
#include "hte/frame.hpp"
#include "hte/rng.hpp"

namespace hte {

// Covariates, binary treatment and outcome. W = 1 is the positive arm
// (positive sentiment under the pipeline's coding), W = 0 the negative arm.
struct CausalSample {
  Matrix X;
  std::vector<int> W;
  std::vector<double> Y;
  std::vector<std::string> feature_names;

  std::size_t n() const { return Y.size(); }
  std::size_t n_treated() const;
  std::size_t n_control() const;
  void validate() const;
};

struct NuisanceModels {
  std::vector<BoostedEnsemble> propensity;        // one per fold
  std::vector<BoostedEnsemble> outcome_treated;   // m1, one per fold
  std::vector<BoostedEnsemble> outcome_control;   // m0, one per fold
};

struct NuisancePredictions {
  std::vector<double> e_hat;   // out-of-fold, clipped to [0.01, 0.99]
  std::vector<double> m1_hat;  // out-of-fold
  std::vector<double> m0_hat;  // out-of-fold
  std::vector<int> fold;       // fold id per row
  double e_min = 1.0;          // post-clip overlap summary
  double e_max = 0.0;
  double clip_share = 0.0;     // fraction of rows clipped at either bound
  std::vector<std::string> warnings;
};

struct NuisanceFit {
  NuisanceModels models;
  NuisancePredictions oof;
};

// K-fold cross-fitting: each row's nuisance predictions come from models
// trained on the other folds. The propensity model is logistic boosting on
// W; the outcome models are squared-error boosting on the treated/control
// rows. Folds are stratified by arm so every training set sees both arms.
NuisanceFit fit_nuisance(const CausalSample& sample, int folds,
                         const BoostConfig& config, std::uint64_t seed);

// Doubly robust score per row:
//   G_i = m1(X_i) - m0(X_i) + W_i (Y_i - m1(X_i)) / e(X_i)
//         - (1 - W_i)(Y_i - m0(X_i)) / (1 - e(X_i)).
std::vector<double> aipw_scores(const CausalSample& sample,
                                const NuisancePredictions& nuisance);

struct AteDiagnostics {
  double e_min = 0.0;
  double e_max = 0.0;
  double clip_share = 0.0;
  double fallback_rate = 0.0;
};

struct AteReport {
  std::string treatment_name;
  double ate = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double p_value = 1.0;
  std::string stars;  // "" / "*" / "**" / "***"
  std::size_t n = 0;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
  AteDiagnostics diagnostics;
};

// ate = mean(G); se = stddev(G)/sqrt(n) (floored at 1e-12); two-sided
// normal p-value; stars at p < 0.05 / 0.01 / 0.001.
AteReport estimate_ate(const std::vector<double>& scores);
std::string significance_stars(double p_value);

struct ForestConfig {
  int n_trees = 500;
  double subsample_fraction = 0.5;  // of the bootstrap sample
  double honesty_fraction = 0.5;    // share used for structure
  int min_node = 5;                 // per arm, in both children
  int max_depth = 8;
  int mtry = 0;  // features tried per split; 0 = ceil(sqrt(d))
  // Weighted criterion (n_L n_R / n^2)(tau_L - tau_R)^2; set false for the
  // literal unweighted squared difference.
  bool weighted_criterion = true;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
  int resolve_mtry(std::size_t d) const;
};

struct CausalTreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::unique_ptr<CausalTreeNode> left;
  std::unique_ptr<CausalTreeNode> right;
  // Honest estimate from the estimation half.
  double tau = 0.0;
  int n_treated = 0;
  int n_control = 0;
  bool fallback = false;  // estimate inherited from an ancestor

  bool is_leaf() const { return feature < 0; }
};

struct CausalTree {
  std::unique_ptr<CausalTreeNode> root;
  int n_leaves = 0;
  int n_fallback_leaves = 0;
};

struct CausalForest {
  std::vector<CausalTree> trees;
  ForestConfig config;
  std::vector<std::string> feature_names;
  double fallback_leaf_share = 0.0;  // across all leaves of all trees
};

// Honest causal forest: per tree, bootstrap then subsample, split the draw
// into a structure half and an estimation half, grow greedily by the
// squared difference in child treatment effects, then fill leaf estimates
// from the estimation half only. Tree b's randomness derives from
// (seed, b), so results are identical for any thread count.
CausalForest fit_causal_forest(const CausalSample& sample, const ForestConfig& config);

struct CatePrediction {
  std::vector<double> tau;
  double fallback_hit_share = 0.0;  // (row, tree) lookups on fallback leaves
};

// Forest CATE: arithmetic mean of the per-tree estimates.
CatePrediction predict_cate(const CausalForest& forest, const Matrix& X);
double predict_cate_tree(const CausalTree& tree, std::span<const double> x,
                         bool* used_fallback = nullptr);

// Structure growth and honest leaf estimation, separated so the honesty
// property is directly testable: re-estimating a fixed structure never
// depends on the structure half's outcomes.
std::unique_ptr<CausalTreeNode> grow_causal_structure(
    const Matrix& X, const std::vector<int>& W, const std::vector<double>& Y,
    const std::vector<std::size_t>& rows, const ForestConfig& config, Rng& rng);
void populate_leaf_estimates(CausalTreeNode& root, const Matrix& X,
                             const std::vector<int>& W,
                             const std::vector<double>& Y,
                             const std::vector<std::size_t>& estimation_rows);

// Everything the pipeline carries per treatment: the forest plus the
// cross-fitted nuisance layer behind the AIPW scores.
struct CausalForestModel {
  CausalForest forest;
  NuisanceFit nuisance;
};

}  // namespace hte
