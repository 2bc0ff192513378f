#include "hte/boost.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hte/common.hpp"

namespace hte {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void BoostConfig::validate() const {
  if (n_rounds < 0) throw ValidationError("boost: n_rounds must be >= 0");
  if (max_depth < 1) throw ValidationError("boost: max_depth must be >= 1");
  if (lambda < 0) throw ValidationError("boost: lambda must be >= 0");
  if (gamma < 0) throw ValidationError("boost: gamma must be >= 0");
  if (min_child_weight < 0) throw ValidationError("boost: min_child_weight must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("boost: learning_rate must be in (0, 1]");
  }
}

int SplitNode::depth() const {
  if (is_leaf()) return 0;
  return 1 + std::max(left->depth(), right->depth());
}

std::unique_ptr<SplitNode> SplitNode::clone() const {
  auto node = std::make_unique<SplitNode>();
  node->feature = feature;
  node->threshold = threshold;
  node->leaf_value = leaf_value;
  if (left) node->left = left->clone();
  if (right) node->right = right->clone();
  return node;
}

Gradients gradients(Loss loss, const std::vector<double>& y,
                    const std::vector<double>& yhat) {
  if (y.size() != yhat.size()) {
    throw ValidationError("gradients: y and yhat length mismatch");
  }
  Gradients out;
  out.g.resize(y.size());
  out.h.resize(y.size());
  if (loss == Loss::squared_error) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      out.g[i] = yhat[i] - y[i];
      out.h[i] = 1.0;
    }
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) {
        throw ValidationError("gradients: logistic loss requires y in {0,1}");
      }
      double p = sigmoid(yhat[i]);
      out.g[i] = p - y[i];
      out.h[i] = p * (1.0 - p);
    }
  }
  return out;
}

namespace {

struct BestSplit {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool found = false;
};

// Exact greedy search over one node's rows. `order` is scratch space reused
// across nodes.
BestSplit find_best_split(const Matrix& X, std::span<const double> g,
                          std::span<const double> h,
                          const std::vector<std::size_t>& rows,
                          const BoostConfig& cfg,
                          std::vector<std::pair<double, std::size_t>>& order) {
  double G = 0.0, H = 0.0;
  for (std::size_t r : rows) {
    G += g[r];
    H += h[r];
  }
  const double parent_score = G * G / (H + cfg.lambda);

  BestSplit best;
  for (std::size_t f = 0; f < X.cols; ++f) {
    order.clear();
    for (std::size_t r : rows) order.emplace_back(X.at(r, f), r);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      gl += g[order[i].second];
      hl += h[order[i].second];
      if (order[i].first == order[i + 1].first) continue;  // not a boundary
      double gr = G - gl, hr = H - hl;
      if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
      double gain = 0.5 * (gl * gl / (hl + cfg.lambda) + gr * gr / (hr + cfg.lambda) -
                           parent_score) -
                    cfg.gamma;
      if (gain <= 0.0) continue;
      // Strict improvement wins; scanning features and thresholds in
      // ascending order settles exact ties to the lowest (feature, threshold).
      if (!best.found || gain > best.gain) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (order[i].first + order[i + 1].first);
        best.found = true;
      }
    }
  }
  return best;
}

std::unique_ptr<SplitNode> build_node(const Matrix& X, std::span<const double> g,
                                      std::span<const double> h,
                                      const std::vector<std::size_t>& rows,
                                      int depth, const BoostConfig& cfg,
                                      std::vector<std::pair<double, std::size_t>>& order) {
  auto node = std::make_unique<SplitNode>();
  double G = 0.0, H = 0.0;
  for (std::size_t r : rows) {
    G += g[r];
    H += h[r];
  }
  if (depth < cfg.max_depth && rows.size() >= 2) {
    BestSplit best = find_best_split(X, g, h, rows, cfg, order);
    if (best.found) {
      std::vector<std::size_t> left_rows, right_rows;
      left_rows.reserve(rows.size());
      right_rows.reserve(rows.size());
      for (std::size_t r : rows) {
        (X.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold
             ? left_rows
             : right_rows)
            .push_back(r);
      }
      node->feature = best.feature;
      node->threshold = best.threshold;
      node->left = build_node(X, g, h, left_rows, depth + 1, cfg, order);
      node->right = build_node(X, g, h, right_rows, depth + 1, cfg, order);
      return node;
    }
  }
  node->leaf_value = -G / (H + cfg.lambda);
  return node;
}

double training_loss(Loss loss, const std::vector<double>& y,
                     const std::vector<double>& yhat) {
  double total = 0.0;
  if (loss == Loss::squared_error) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      double r = yhat[i] - y[i];
      total += 0.5 * r * r;
    }
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) {
      double p = std::clamp(sigmoid(yhat[i]), 1e-15, 1.0 - 1e-15);
      total += y[i] > 0.5 ? -std::log(p) : -std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(y.size());
}

nlohmann::ordered_json node_to_json(const SplitNode& node) {
  nlohmann::ordered_json j;
  if (node.is_leaf()) {
    j["leaf"] = node.leaf_value;
  } else {
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["left"] = node_to_json(*node.left);
    j["right"] = node_to_json(*node.right);
  }
  return j;
}

std::unique_ptr<SplitNode> node_from_json(const nlohmann::json& j) {
  auto node = std::make_unique<SplitNode>();
  if (j.contains("leaf")) {
    node->leaf_value = j.at("leaf").get<double>();
  } else {
    node->feature = j.at("feature").get<int>();
    node->threshold = j.at("threshold").get<double>();
    node->left = node_from_json(j.at("left"));
    node->right = node_from_json(j.at("right"));
  }
  return node;
}

}  // namespace

std::unique_ptr<SplitNode> fit_tree(const Matrix& X, std::span<const double> g,
                                    std::span<const double> h,
                                    const BoostConfig& config) {
  config.validate();
  if (X.rows == 0 || g.empty()) throw ValidationError("fit_tree: empty input");
  if (g.size() != X.rows || h.size() != X.rows) {
    throw ValidationError("fit_tree: gradient length mismatch");
  }
  for (double hi : h) {
    if (hi < 0.0) throw ValidationError("fit_tree: negative hessian");
  }
  std::vector<std::size_t> rows(X.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(X.rows);
  return build_node(X, g, h, rows, 0, config, order);
}

BoostedEnsemble::BoostedEnsemble(const BoostedEnsemble& other)
    : loss(other.loss),
      base_score(other.base_score),
      learning_rate(other.learning_rate),
      feature_names(other.feature_names),
      round_loss(other.round_loss) {
  trees.reserve(other.trees.size());
  for (const auto& t : other.trees) trees.push_back(t->clone());
}

BoostedEnsemble& BoostedEnsemble::operator=(const BoostedEnsemble& other) {
  if (this == &other) return *this;
  BoostedEnsemble copy(other);
  *this = std::move(copy);
  return *this;
}

double BoostedEnsemble::predict_raw_row(std::span<const double> x) const {
  if (x.size() != feature_names.size()) {
    throw ValidationError("predict: row arity mismatch");
  }
  double score = base_score;
  for (const auto& t : trees) score += learning_rate * t->eval(x);
  return score;
}

std::vector<double> BoostedEnsemble::predict_raw(const Matrix& X) const {
  if (X.cols != feature_names.size()) {
    throw ValidationError("predict: feature count mismatch (model expects " +
                          std::to_string(feature_names.size()) + ", got " +
                          std::to_string(X.cols) + ")");
  }
  std::vector<double> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = predict_raw_row(X.row(r));
  return out;
}

std::vector<double> BoostedEnsemble::predict(const Matrix& X) const {
  auto out = predict_raw(X);
  if (loss == Loss::logistic) {
    for (double& v : out) v = sigmoid(v);
  }
  return out;
}

std::vector<double> BoostedEnsemble::predict(const FrameTable& table) const {
  std::vector<std::size_t> idx;
  idx.reserve(feature_names.size());
  for (const auto& n : feature_names) idx.push_back(table.column_index(n));
  return predict(table.to_matrix(idx));
}

BoostedEnsemble fit_boosted(const Matrix& X, std::vector<std::string> names,
                            const std::vector<double>& y, Loss loss,
                            const BoostConfig& config) {
  config.validate();
  if (X.cols == 0) throw ValidationError("fit_boosted: empty feature set");
  if (X.rows != y.size()) throw ValidationError("fit_boosted: X/y length mismatch");
  if (X.rows < 2) throw ValidationError("fit_boosted: needs at least 2 rows");

  BoostedEnsemble model;
  model.loss = loss;
  model.learning_rate = config.learning_rate;
  model.feature_names = std::move(names);

  double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  if (loss == Loss::squared_error) {
    model.base_score = mean_y;
  } else {
    for (double v : y) {
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("fit_boosted: logistic target must be in {0,1}");
      }
    }
    if (mean_y <= 0.0 || mean_y >= 1.0) {
      throw ValidationError("fit_boosted: degenerate logistic target (all 0 or all 1)");
    }
    model.base_score = std::log(mean_y / (1.0 - mean_y));
  }

  std::vector<double> yhat(y.size(), model.base_score);
  model.round_loss.reserve(static_cast<std::size_t>(config.n_rounds));
  for (int round = 0; round < config.n_rounds; ++round) {
    Gradients grad = gradients(loss, y, yhat);
    auto tree = fit_tree(X, grad.g, grad.h, config);
    for (std::size_t r = 0; r < X.rows; ++r) {
      yhat[r] += config.learning_rate * tree->eval(X.row(r));
    }
    model.trees.push_back(std::move(tree));
    model.round_loss.push_back(training_loss(loss, y, yhat));
  }
  return model;
}

BoostedEnsemble fit_boosted(const FrameTable& table, const std::string& target,
                            Loss loss, const BoostConfig& config) {
  std::size_t target_idx = table.column_index(target);
  std::vector<std::size_t> feature_idx;
  std::vector<std::string> names;
  for (std::size_t i : table.indices_with_role(Role::feature)) {
    if (i == target_idx) continue;
    feature_idx.push_back(i);
    names.push_back(table.name(i));
  }
  if (feature_idx.empty()) throw ValidationError("fit_boosted: empty feature set");
  return fit_boosted(table.to_matrix(feature_idx), std::move(names),
                     table.column(target_idx), loss, config);
}

std::string BoostedEnsemble::to_json_string() const {
  nlohmann::ordered_json j;
  j["format"] = "hte-boosted-ensemble";
  j["version"] = 1;
  j["loss"] = loss == Loss::squared_error ? "squared_error" : "logistic";
  j["base_score"] = base_score;
  j["learning_rate"] = learning_rate;
  j["feature_names"] = feature_names;
  nlohmann::ordered_json jt = nlohmann::ordered_json::array();
  for (const auto& t : trees) jt.push_back(node_to_json(*t));
  j["trees"] = std::move(jt);
  return j.dump(2);
}

BoostedEnsemble BoostedEnsemble::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "hte-boosted-ensemble" || j.value("version", 0) != 1) {
    throw ValidationError("model JSON: unknown format or version");
  }
  BoostedEnsemble model;
  model.loss = j.at("loss").get<std::string>() == "logistic" ? Loss::logistic
                                                             : Loss::squared_error;
  model.base_score = j.at("base_score").get<double>();
  model.learning_rate = j.at("learning_rate").get<double>();
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& jt : j.at("trees")) model.trees.push_back(node_from_json(jt));
  return model;
}

void BoostedEnsemble::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  out << to_json_string() << '\n';
}

BoostedEnsemble BoostedEnsemble::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

}  // namespace hte
