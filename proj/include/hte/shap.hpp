#pragma once

#include <span>
#include <string>
#include <vector>

#include "hte/boost.hpp"
#include "hte/frame.hpp"

namespace hte {

// Interventional coalition value over an explicit background sample:
//   v(S, x) = mean over background rows b of raw_prediction(z),
// where z takes x's values on S and b's values elsewhere. Attribution works
// on the raw margin scale, which coincides with the prediction for
// squared-error models. v(full, x) is the model output at x; v(empty, x) is
// the background-average prediction (the baseline).
struct ValueFunction {
  const BoostedEnsemble* model = nullptr;
  Matrix background;

  double eval(const std::vector<int>& subset, std::span<const double> x) const;
  double eval_mask(std::uint32_t mask, std::span<const double> x) const;
};

// v(S + {j}, x) - v(S, x); j must not already be in S.
double marginal_contribution(const ValueFunction& v, std::span<const double> x,
                             int j, const std::vector<int>& subset);

// Exact Shapley values by subset enumeration:
//   phi_j = sum_{S subset of F\{j}} |S|!(d-|S|-1)!/d! * [v(S+{j},x) - v(S,x)].
// Bounded at d <= 20.
std::vector<double> shap_exact(const ValueFunction& v, std::span<const double> x);

struct AttributionResult {
  double baseline = 0.0;
  std::vector<std::string> feature_names;
  Matrix phi;                      // rows of X x features
  std::vector<double> importance;  // mean |phi| per feature
  std::size_t background_rows = 0;
};

// Fast path: per-tree, per-reference recursive attribution, summed over
// trees and background rows and scaled by the learning rate. Agrees with
// shap_exact under the same value function (the enumeration is the oracle
// in the tests).
AttributionResult shap_tree(const BoostedEnsemble& model, const Matrix& background,
                            const Matrix& X, int threads = 1);

struct RankedFeature {
  std::string name;
  double importance;
};

struct FeatureRanking {
  std::vector<RankedFeature> ranked;              // descending importance
  std::vector<std::string> positive_subset;       // importance strictly > 0
};

// Descending mean-|phi|; exact ties keep column order.
FeatureRanking rank_features(const AttributionResult& result);

void write_attribution_csv(const std::string& path, const AttributionResult& r);

}  // namespace hte
