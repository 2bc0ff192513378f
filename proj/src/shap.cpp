#include "hte/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hte/common.hpp"
#include "hte/parallel.hpp"

namespace hte {
namespace {

// Binomial coefficient in double; exact for every value needed here.
double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / i;
  return c;
}

// Shapley kernel weight for a coalition of size s among u players:
// s!(u-s-1)!/u! = 1/(u * C(u-1, s)).
double coalition_weight(int s, int u) {
  return 1.0 / (static_cast<double>(u) * binomial(u - 1, s));
}

// Total Shapley weight mass for a leaf that requires a fixed set of `a`
// players present and `b` players absent, summed over the free players:
//   T(a, b, u) = sum_m C(u-1-a-b, m) * w(a+m, u).
double leaf_weight_sum(int a, int b, int u) {
  int free_players = u - 1 - a - b;
  double total = 0.0;
  for (int m = 0; m <= free_players; ++m) {
    total += binomial(free_players, m) * coalition_weight(a + m, u);
  }
  return total;
}

enum : std::int8_t { kUnknown = 0, kIn = 1, kOut = 2 };

// Collects the features at which x and the reference diverge on a reachable
// node, honoring assignments made higher up the path. `state` backtracks
// with the path; `seen` accumulates so a feature diverging in two sibling
// subtrees is still one player.
void collect_players(const SplitNode* node, std::span<const double> x,
                     std::span<const double> ref, std::vector<std::int8_t>& state,
                     std::vector<std::uint8_t>& seen, int& player_count) {
  if (node->is_leaf()) return;
  auto f = static_cast<std::size_t>(node->feature);
  const SplitNode* x_child = x[f] <= node->threshold ? node->left.get() : node->right.get();
  const SplitNode* r_child = ref[f] <= node->threshold ? node->left.get() : node->right.get();
  if (state[f] == kIn) {
    collect_players(x_child, x, ref, state, seen, player_count);
    return;
  }
  if (state[f] == kOut) {
    collect_players(r_child, x, ref, state, seen, player_count);
    return;
  }
  if (x_child == r_child) {
    collect_players(x_child, x, ref, state, seen, player_count);
    return;
  }
  if (!seen[f]) {
    seen[f] = 1;
    ++player_count;
  }
  state[f] = kIn;
  collect_players(x_child, x, ref, state, seen, player_count);
  state[f] = kOut;
  collect_players(r_child, x, ref, state, seen, player_count);
  state[f] = kUnknown;
}

struct PathGame {
  std::span<const double> x;
  std::span<const double> ref;
  int u = 0;  // number of divergence players for this (x, ref, tree)
  std::vector<std::int8_t>* state;
  std::vector<std::pair<int, bool>> constraints;  // (feature, required-in?)
  double* phi;

  void descend(const SplitNode* node, int n_in, int n_out) {
    if (node->is_leaf()) {
      for (const auto& [feature, required_in] : constraints) {
        double w = required_in ? leaf_weight_sum(n_in - 1, n_out, u)
                               : -leaf_weight_sum(n_in, n_out - 1, u);
        phi[feature] += w * node->leaf_value;
      }
      return;
    }
    auto f = static_cast<std::size_t>(node->feature);
    const SplitNode* x_child =
        x[f] <= node->threshold ? node->left.get() : node->right.get();
    const SplitNode* r_child =
        ref[f] <= node->threshold ? node->left.get() : node->right.get();
    auto& st = (*state)[f];
    if (st == kIn) {
      descend(x_child, n_in, n_out);
      return;
    }
    if (st == kOut) {
      descend(r_child, n_in, n_out);
      return;
    }
    if (x_child == r_child) {
      descend(x_child, n_in, n_out);
      return;
    }
    constraints.emplace_back(node->feature, true);
    st = kIn;
    descend(x_child, n_in + 1, n_out);
    constraints.back().second = false;
    st = kOut;
    descend(r_child, n_in, n_out + 1);
    constraints.pop_back();
    st = kUnknown;
  }
};

// Adds the single-reference Shapley values of one tree to phi.
void tree_reference_shap(const SplitNode* root, std::span<const double> x,
                         std::span<const double> ref,
                         std::vector<std::int8_t>& state,
                         std::vector<std::uint8_t>& seen, double* phi) {
  int player_count = 0;
  collect_players(root, x, ref, state, seen, player_count);
  std::fill(seen.begin(), seen.end(), std::uint8_t{0});
  if (player_count == 0) return;  // x and ref share the leaf; nothing to attribute
  PathGame game;
  game.x = x;
  game.ref = ref;
  game.u = player_count;
  game.state = &state;
  game.phi = phi;
  game.descend(root, 0, 0);
}

}  // namespace

double ValueFunction::eval_mask(std::uint32_t mask, std::span<const double> x) const {
  const std::size_t d = model->n_features();
  if (background.rows == 0) throw ValidationError("value function: empty background");
  if (background.cols != d || x.size() != d) {
    throw ValidationError("value function: arity mismatch");
  }
  std::vector<double> z(d);
  double total = 0.0;
  for (std::size_t b = 0; b < background.rows; ++b) {
    auto ref = background.row(b);
    for (std::size_t j = 0; j < d; ++j) {
      z[j] = (mask >> j) & 1u ? x[j] : ref[j];
    }
    total += model->predict_raw_row(z);
  }
  return total / static_cast<double>(background.rows);
}

double ValueFunction::eval(const std::vector<int>& subset,
                           std::span<const double> x) const {
  std::uint32_t mask = 0;
  for (int j : subset) {
    if (j < 0 || static_cast<std::size_t>(j) >= model->n_features()) {
      throw ValidationError("value function: feature index out of range");
    }
    mask |= 1u << j;
  }
  return eval_mask(mask, x);
}

double marginal_contribution(const ValueFunction& v, std::span<const double> x,
                             int j, const std::vector<int>& subset) {
  for (int s : subset) {
    if (s == j) throw ValidationError("marginal_contribution: j already in S");
  }
  auto with_j = subset;
  with_j.push_back(j);
  return v.eval(with_j, x) - v.eval(subset, x);
}

std::vector<double> shap_exact(const ValueFunction& v, std::span<const double> x) {
  const int d = static_cast<int>(v.model->n_features());
  if (d > 20) {
    throw ValidationError("shap_exact: feature count above the 2^d enumeration bound (20)");
  }
  const std::uint32_t n_masks = 1u << d;
  std::vector<double> value(n_masks);
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    value[mask] = v.eval_mask(mask, x);
  }
  std::vector<double> phi(static_cast<std::size_t>(d), 0.0);
  for (int j = 0; j < d; ++j) {
    const std::uint32_t bit = 1u << j;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      int s = std::popcount(mask);
      phi[static_cast<std::size_t>(j)] +=
          coalition_weight(s, d) * (value[mask | bit] - value[mask]);
    }
  }
  return phi;
}

AttributionResult shap_tree(const BoostedEnsemble& model, const Matrix& background,
                            const Matrix& X, int threads) {
  const std::size_t d = model.n_features();
  if (background.rows == 0) throw ValidationError("shap_tree: empty background");
  if (background.cols != d || X.cols != d) {
    throw ValidationError("shap_tree: arity mismatch between model, background and X");
  }

  AttributionResult result;
  result.feature_names = model.feature_names;
  result.background_rows = background.rows;
  result.phi = Matrix(X.rows, d, 0.0);

  double base = 0.0;
  for (std::size_t b = 0; b < background.rows; ++b) {
    base += model.predict_raw_row(background.row(b));
  }
  result.baseline = background.rows ? base / static_cast<double>(background.rows) : 0.0;

  parallel_for(X.rows, threads, [&](std::size_t r) {
    std::vector<std::int8_t> state(d, kUnknown);
    std::vector<std::uint8_t> seen(d, 0);
    std::vector<double> acc(d, 0.0);
    auto x = X.row(r);
    for (std::size_t b = 0; b < background.rows; ++b) {
      auto ref = background.row(b);
      for (const auto& tree : model.trees) {
        tree_reference_shap(tree.get(), x, ref, state, seen, acc.data());
      }
    }
    const double scale = model.learning_rate / static_cast<double>(background.rows);
    for (std::size_t j = 0; j < d; ++j) result.phi.at(r, j) = acc[j] * scale;
  });

  result.importance.assign(d, 0.0);
  if (X.rows > 0) {
    for (std::size_t r = 0; r < X.rows; ++r) {
      for (std::size_t j = 0; j < d; ++j) {
        result.importance[j] += std::abs(result.phi.at(r, j));
      }
    }
    for (double& v : result.importance) v /= static_cast<double>(X.rows);
  }
  return result;
}

FeatureRanking rank_features(const AttributionResult& result) {
  if (result.feature_names.empty()) {
    throw ValidationError("rank_features: empty attribution result");
  }
  std::vector<std::size_t> order(result.feature_names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.importance[a] > result.importance[b];
  });
  FeatureRanking out;
  for (std::size_t j : order) {
    out.ranked.push_back({result.feature_names[j], result.importance[j]});
    if (result.importance[j] > 0.0) {
      out.positive_subset.push_back(result.feature_names[j]);
    }
  }
  return out;
}

void write_attribution_csv(const std::string& path, const AttributionResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write attribution CSV: " + path);
  out << "# shap-values v1\n";
  out << "# baseline," << format_double(r.baseline) << '\n';
  out << "# background_rows," << r.background_rows << '\n';
  for (std::size_t j = 0; j < r.feature_names.size(); ++j) {
    out << "# importance," << r.feature_names[j] << ','
        << format_double(r.importance[j]) << '\n';
  }
  for (std::size_t j = 0; j < r.feature_names.size(); ++j) {
    if (j) out << ',';
    out << r.feature_names[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < r.phi.rows; ++i) {
    for (std::size_t j = 0; j < r.phi.cols; ++j) {
      if (j) out << ',';
      out << format_double(r.phi.at(i, j));
    }
    out << '\n';
  }
}

}  // namespace hte
