#include "hte/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hte/cluster.hpp"
#include "hte/common.hpp"
#include "hte/dgp.hpp"
#include "hte/rng.hpp"
#include "hte/sha256.hpp"
#include "hte/shap.hpp"
#include "hte/stats.hpp"

namespace fs = std::filesystem;

namespace hte {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_num(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' expects a number, got '" +
                          value + "'");
  }
}

long parse_int(const std::string& key, const std::string& value) {
  double v = parse_num(key, value);
  long i = static_cast<long>(v);
  if (static_cast<double>(i) != v) {
    throw ValidationError("config: key '" + key + "' expects an integer, got '" +
                          value + "'");
  }
  return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config: key '" + key + "' expects true/false");
}

void apply_boost_entry(BoostConfig& cfg, const std::string& key,
                       const std::string& field, const std::string& value) {
  if (field == "n_rounds") cfg.n_rounds = static_cast<int>(parse_int(key, value));
  else if (field == "max_depth") cfg.max_depth = static_cast<int>(parse_int(key, value));
  else if (field == "lambda") cfg.lambda = parse_num(key, value);
  else if (field == "gamma") cfg.gamma = parse_num(key, value);
  else if (field == "min_child_weight") cfg.min_child_weight = parse_num(key, value);
  else if (field == "learning_rate") cfg.learning_rate = parse_num(key, value);
  else throw ValidationError("config: unknown key '" + key + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  return out;
}

void ensure_out_dir(const PipelineConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + config.out_dir);
}

FrameTable load_input(const PipelineConfig& config, bool need_outcome) {
  if (config.input.empty()) throw ValidationError("config: input path required");
  FrameTable table = load_csv(config.input, config.csv);
  if (need_outcome) {
    if (config.outcome.empty()) {
      throw ValidationError("config: outcome column required");
    }
    if (!table.has_column(config.outcome)) {
      throw ValidationError("config: outcome column '" + config.outcome +
                            "' not found in " + config.input);
    }
    table = table.with_role(config.outcome, Role::outcome);
  }
  return table;
}

void validate_common(const PipelineConfig& config) {
  if (!(config.split > 0.0 && config.split < 1.0)) {
    throw ValidationError("config: split must be in (0, 1)");
  }
  if (config.folds < 2) throw ValidationError("config: folds must be >= 2");
  if (config.background_rows < 1) {
    throw ValidationError("config: background_rows must be >= 1");
  }
  config.model_boost.validate();
  config.nuisance_boost.validate();
  config.forest.validate();
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

void apply_config_entry(PipelineConfig& config, const std::string& raw_key,
                        const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::string value = trim(raw_value);
  if (key == "input") config.input = value;
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "outcome") config.outcome = value;
  else if (key == "sentiment") config.sentiment = value;
  else if (key == "split") config.split = parse_num(key, value);
  else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "k_clusters") config.k_clusters = static_cast<int>(parse_int(key, value));
  else if (key == "cluster_height_threshold") config.cluster_height_threshold = parse_num(key, value);
  else if (key == "threads") config.threads = static_cast<int>(parse_int(key, value));
  else if (key == "background_rows") config.background_rows = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "folds") config.folds = static_cast<int>(parse_int(key, value));
  else if (key == "missing_marker") config.csv.missing_marker = value;
  else if (key == "impute") {
    if (value == "none") config.csv.impute = CsvOptions::Impute::none;
    else if (value == "mean") config.csv.impute = CsvOptions::Impute::mean;
    else throw ValidationError("config: impute must be none or mean");
  } else if (key.rfind("framework.", 0) == 0) {
    std::string name = key.substr(10);
    if (name.empty()) throw ValidationError("config: framework key needs a name");
    config.frameworks[name] = split_list(value);
  } else if (key.rfind("boost.", 0) == 0) {
    apply_boost_entry(config.model_boost, key, key.substr(6), value);
  } else if (key.rfind("nuisance.", 0) == 0) {
    apply_boost_entry(config.nuisance_boost, key, key.substr(9), value);
  } else if (key.rfind("forest.", 0) == 0) {
    std::string field = key.substr(7);
    if (field == "n_trees") config.forest.n_trees = static_cast<int>(parse_int(key, value));
    else if (field == "subsample_fraction") config.forest.subsample_fraction = parse_num(key, value);
    else if (field == "honesty_fraction") config.forest.honesty_fraction = parse_num(key, value);
    else if (field == "min_node") config.forest.min_node = static_cast<int>(parse_int(key, value));
    else if (field == "max_depth") config.forest.max_depth = static_cast<int>(parse_int(key, value));
    else if (field == "mtry") config.forest.mtry = static_cast<int>(parse_int(key, value));
    else if (field == "weighted_criterion") config.forest.weighted_criterion = parse_bool(key, value);
    else throw ValidationError("config: unknown key '" + key + "'");
  } else {
    throw ValidationError("config: unknown key '" + key + "'");
  }
}

PipelineConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  PipelineConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ": line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    apply_config_entry(config, t.substr(0, eq), t.substr(eq + 1));
  }
  return config;
}

StageResult cmd_cluster(const PipelineConfig& config) {
  validate_common(config);
  ensure_out_dir(config);
  FrameTable table = load_input(config, !config.outcome.empty());
  if (!config.outcome.empty() && !table.has_column(config.outcome)) {
    throw ValidationError("config: outcome column '" + config.outcome + "' not found");
  }

  StageResult result;
  CorrelationMatrix rho = pearson_matrix(table);
  for (const auto& w : rho.warnings) result.messages.push_back("warning: " + w);

  std::string corr_path = path_join(config.out_dir, "correlation.csv");
  write_correlation_csv(corr_path, rho);
  result.files.push_back(corr_path);

  Matrix D = correlation_distance(rho);
  Dendrogram dend = ward_linkage(D);
  std::string dend_path = path_join(config.out_dir, "dendrogram.csv");
  write_dendrogram_csv(dend_path, dend);
  result.files.push_back(dend_path);

  int k = config.k_clusters > 0
              ? config.k_clusters
              : default_cluster_count(dend, config.cluster_height_threshold);
  if (k > dend.n_leaves) k = dend.n_leaves;
  auto assignment = dend.n_leaves == 1 ? std::vector<int>{0} : cut_clusters(dend, k);
  auto reps = select_representatives(rho, assignment);

  std::string reps_path = path_join(config.out_dir, "representatives.csv");
  {
    auto out = open_out(reps_path);
    out << "cluster,representative,members\n";
    for (std::size_t c = 0; c < reps.size(); ++c) {
      int count = static_cast<int>(std::count(assignment.begin(), assignment.end(),
                                              static_cast<int>(c)));
      out << c << ',' << rho.names[reps[c]] << ',' << count << '\n';
    }
  }
  result.files.push_back(reps_path);
  for (std::size_t c = 0; c < reps.size(); ++c) {
    result.messages.push_back("cluster " + std::to_string(c) +
                              " representative: " + rho.names[reps[c]]);
  }
  return result;
}

namespace {

struct ShapArtifacts {
  AttributionResult attribution;
  FeatureRanking ranking;
};

ShapArtifacts run_shap_stage(const PipelineConfig& config, const FrameTable& table,
                             StageResult& result) {
  const std::size_t n = table.n_rows();
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(split_seed(config.seed, 1));
  rng.shuffle(rows);
  std::size_t n_train = static_cast<std::size_t>(config.split * static_cast<double>(n));
  if (n_train < 2 || n_train >= n) {
    throw ValidationError("shap: degenerate train/test split (train " +
                          std::to_string(n_train) + " of " + std::to_string(n) + ")");
  }
  std::vector<std::size_t> train_rows(rows.begin(), rows.begin() + n_train);
  std::vector<std::size_t> test_rows(rows.begin() + n_train, rows.end());

  FrameTable train = table.take_rows(train_rows);
  FrameTable test = table.take_rows(test_rows);

  BoostConfig boost_cfg = config.model_boost;
  boost_cfg.seed = config.seed;
  BoostedEnsemble model = fit_boosted(train, config.outcome, Loss::squared_error,
                                      boost_cfg);

  std::string model_path = path_join(config.out_dir, "model.json");
  model.save(model_path);
  result.files.push_back(model_path);

  // Background: up to background_rows train rows, sampled without
  // replacement with the pipeline seed.
  std::vector<std::size_t> bg_rows(train.n_rows());
  std::iota(bg_rows.begin(), bg_rows.end(), std::size_t{0});
  Rng bg_rng(split_seed(config.seed, 2));
  bg_rng.shuffle(bg_rows);
  if (bg_rows.size() > config.background_rows) bg_rows.resize(config.background_rows);

  std::vector<std::size_t> model_cols;
  for (const auto& name : model.feature_names) {
    model_cols.push_back(table.column_index(name));
  }
  Matrix background = train.take_rows(bg_rows).to_matrix(model_cols);
  Matrix test_X = test.to_matrix(model_cols);

  ShapArtifacts artifacts;
  artifacts.attribution = shap_tree(model, background, test_X, config.threads);
  artifacts.ranking = rank_features(artifacts.attribution);

  std::string phi_path = path_join(config.out_dir, "shap_values.csv");
  write_attribution_csv(phi_path, artifacts.attribution);
  result.files.push_back(phi_path);

  std::string rank_path = path_join(config.out_dir, "shap_ranking.csv");
  {
    auto out = open_out(rank_path);
    out << "rank,feature,importance,selected\n";
    for (std::size_t i = 0; i < artifacts.ranking.ranked.size(); ++i) {
      const auto& entry = artifacts.ranking.ranked[i];
      out << (i + 1) << ',' << entry.name << ','
          << format_double(entry.importance) << ','
          << (entry.importance > 0.0 ? 1 : 0) << '\n';
    }
  }
  result.files.push_back(rank_path);

  if (artifacts.ranking.positive_subset.empty()) {
    result.messages.push_back(
        "warning: no feature has positive SHAP importance; the selected subset is empty");
  }
  return artifacts;
}

}  // namespace

StageResult cmd_shap(const PipelineConfig& config) {
  validate_common(config);
  ensure_out_dir(config);
  FrameTable table = load_input(config, true);
  StageResult result;
  run_shap_stage(config, table, result);
  return result;
}

std::vector<RankingEntry> read_ranking_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ranking file: " + path);
  std::vector<RankingEntry> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string rank, feature, importance, selected;
    if (!std::getline(ss, rank, ',') || !std::getline(ss, feature, ',') ||
        !std::getline(ss, importance, ',') || !std::getline(ss, selected)) {
      throw ValidationError(path + ": malformed ranking row '" + line + "'");
    }
    RankingEntry entry;
    entry.feature = feature;
    entry.importance = parse_num("importance", trim(importance));
    entry.selected = trim(selected) == "1";
    out.push_back(entry);
  }
  if (out.empty()) throw ValidationError(path + ": empty ranking file");
  return out;
}

StageResult cmd_ate(const PipelineConfig& config, const std::string& framework) {
  validate_common(config);
  ensure_out_dir(config);
  auto it = config.frameworks.find(framework);
  if (it == config.frameworks.end()) {
    std::string known;
    for (const auto& [name, _] : config.frameworks) {
      known += (known.empty() ? "" : ", ") + name;
    }
    throw ValidationError("unknown framework '" + framework + "' (available: " +
                          (known.empty() ? "none configured" : known) + ")");
  }
  const std::vector<std::string>& conditioners = it->second;

  if (config.sentiment.empty()) {
    throw ValidationError("config: sentiment column required for the ATE stage");
  }

  FrameTable table = load_input(config, true);
  if (!table.has_column(config.sentiment)) {
    throw ValidationError("config: sentiment column '" + config.sentiment +
                          "' not found");
  }
  for (const auto& c : conditioners) {
    if (!table.has_column(c)) {
      throw ValidationError("framework '" + framework + "': conditioner column '" +
                            c + "' not found");
    }
  }

  StageResult result;

  std::string rank_path = path_join(config.out_dir, "shap_ranking.csv");
  if (!fs::exists(rank_path)) {
    StageResult shap_result = cmd_shap(config);
    result.files.insert(result.files.end(), shap_result.files.begin(),
                        shap_result.files.end());
    result.messages.insert(result.messages.end(), shap_result.messages.begin(),
                           shap_result.messages.end());
  }
  auto ranking = read_ranking_csv(rank_path);

  // Treatments: the sentiment column plus every SHAP-selected feature, in
  // ranking order (the reports mirror the SHAP plot's order).
  std::vector<std::string> treatments;
  for (const auto& entry : ranking) {
    if (entry.feature == config.sentiment ||
        (entry.selected && entry.feature != config.outcome)) {
      treatments.push_back(entry.feature);
    }
  }
  if (std::find(treatments.begin(), treatments.end(), config.sentiment) ==
      treatments.end()) {
    treatments.insert(treatments.begin(), config.sentiment);
  }

  std::vector<std::string> selected;
  for (const auto& entry : ranking) {
    if (entry.selected) selected.push_back(entry.feature);
  }

  std::vector<AteReport> reports;
  for (std::size_t t_idx = 0; t_idx < treatments.size(); ++t_idx) {
    const std::string& treatment = treatments[t_idx];

    // Covariates: remaining selected features plus the framework's
    // conditioners, deduplicated in that order.
    std::vector<std::string> covariates;
    auto add_covariate = [&](const std::string& name) {
      if (name == treatment || name == config.outcome) return;
      if (std::find(covariates.begin(), covariates.end(), name) == covariates.end()) {
        covariates.push_back(name);
      }
    };
    for (const auto& s : selected) add_covariate(s);
    for (const auto& c : conditioners) add_covariate(c);
    if (covariates.empty()) {
      throw ValidationError("ate: no covariates left for treatment '" + treatment +
                            "'; add conditioners or widen the SHAP subset");
    }

    FrameTable working = table;
    std::string w_column = treatment;
    if (treatment == config.sentiment) {
      for (double v : working.column(treatment)) {
        if (v != 0.0 && v != 1.0) {
          throw ValidationError("sentiment column '" + treatment +
                                "' must be binary 0/1 (positive arm = 1)");
        }
      }
    } else {
      working = binarize_at_median(working, treatment);
      w_column = treatment + "__hi";
    }

    CausalSample sample;
    std::vector<std::size_t> cov_idx;
    for (const auto& c : covariates) cov_idx.push_back(working.column_index(c));
    sample.X = working.to_matrix(cov_idx);
    sample.feature_names = covariates;
    const auto& w_col = working.column(w_column);
    sample.W.resize(w_col.size());
    for (std::size_t i = 0; i < w_col.size(); ++i) {
      sample.W[i] = w_col[i] > 0.5 ? 1 : 0;
    }
    sample.Y = working.column(config.outcome);
    if (sample.n_treated() == 0 || sample.n_control() == 0) {
      throw ValidationError("ate: treatment '" + treatment +
                            "' is degenerate after binarization (one arm empty)");
    }

    NuisanceFit nuisance = fit_nuisance(sample, config.folds, config.nuisance_boost,
                                        split_seed(config.seed, 1000 + t_idx));
    auto scores = aipw_scores(sample, nuisance.oof);
    AteReport report = estimate_ate(scores);
    report.treatment_name = treatment;
    report.n_treated = sample.n_treated();
    report.n_control = sample.n_control();
    report.diagnostics.e_min = nuisance.oof.e_min;
    report.diagnostics.e_max = nuisance.oof.e_max;
    report.diagnostics.clip_share = nuisance.oof.clip_share;
    for (const auto& w : nuisance.oof.warnings) {
      result.messages.push_back("warning: [" + treatment + "] " + w);
    }

    ForestConfig forest_cfg = config.forest;
    forest_cfg.seed = split_seed(config.seed, 2000 + t_idx);
    forest_cfg.threads = config.threads;
    CausalForest forest = fit_causal_forest(sample, forest_cfg);
    report.diagnostics.fallback_rate = forest.fallback_leaf_share;

    reports.push_back(std::move(report));
  }

  std::string csv_path = path_join(config.out_dir, "ate_" + framework + ".csv");
  write_ate_reports_csv(csv_path, reports);
  result.files.push_back(csv_path);
  std::string json_path = path_join(config.out_dir, "ate_" + framework + ".json");
  write_ate_reports_json(json_path, framework, reports);
  result.files.push_back(json_path);
  return result;
}

StageResult cmd_pipeline(const PipelineConfig& config) {
  validate_common(config);
  // Fail on configuration gaps before any compute.
  for (const char* required : {"asset_composition", "balance_sheet"}) {
    if (config.frameworks.find(required) == config.frameworks.end()) {
      throw ValidationError(std::string("pipeline: framework list '") + required +
                            "' missing from config");
    }
  }
  if (config.outcome.empty() || config.sentiment.empty()) {
    throw ValidationError("pipeline: outcome and sentiment columns required");
  }
  ensure_out_dir(config);

  StageResult total;
  auto absorb = [&total](const StageResult& stage) {
    total.files.insert(total.files.end(), stage.files.begin(), stage.files.end());
    total.messages.insert(total.messages.end(), stage.messages.begin(),
                          stage.messages.end());
  };
  absorb(cmd_cluster(config));
  absorb(cmd_shap(config));
  absorb(cmd_ate(config, "asset_composition"));
  absorb(cmd_ate(config, "balance_sheet"));

  nlohmann::ordered_json summary;
  summary["tool"] = "hte";
  summary["seed"] = config.seed;
  summary["input"] = config.input;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : total.files) {
    nlohmann::ordered_json entry;
    entry["path"] = fs::path(f).filename().string();
    entry["sha256"] = sha256_file(f);
    files.push_back(std::move(entry));
  }
  summary["files"] = std::move(files);

  std::string summary_path = path_join(config.out_dir, "summary.json");
  {
    auto out = open_out(summary_path);
    out << summary.dump(2) << '\n';
  }
  total.files.push_back(summary_path);
  return total;
}

StageResult cmd_dgp(const std::string& name, std::size_t n, double sigma,
                    std::uint64_t seed, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  DgpSpec spec = make_dgp(name, n, sigma, seed);
  DgpDraw draw = generate(spec);

  StageResult result;
  std::string data_path = path_join(out_dir, "dgp_" + name + ".csv");
  write_dgp_csv(data_path, draw);
  result.files.push_back(data_path);

  std::string truth_path = path_join(out_dir, "dgp_" + name + "_truth.csv");
  {
    auto out = open_out(truth_path);
    out << "e,mu,tau,true_ate\n";
    for (std::size_t i = 0; i < draw.tau.size(); ++i) {
      out << format_double(draw.e[i]) << ',' << format_double(draw.mu[i]) << ','
          << format_double(draw.tau[i]) << ',' << format_double(draw.true_ate)
          << '\n';
    }
  }
  result.files.push_back(truth_path);
  result.messages.push_back("wrote " + data_path + " (n=" + std::to_string(n) +
                            ", true ATE=" + format_double(draw.true_ate) + ")");
  return result;
}

void write_ate_reports_csv(const std::string& path,
                           const std::vector<AteReport>& reports) {
  auto out = open_out(path);
  out << "# W = 1 is the positive arm (positive sentiment; above-median for "
         "binarized features); * p < 0.05, ** p < 0.01, *** p < 0.001\n";
  out << "treatment,ate,se,ci_lo,ci_hi,p_value,stars,n,n_treated,n_control,"
         "e_min,e_max,clip_share,fallback_rate\n";
  for (const auto& r : reports) {
    out << r.treatment_name << ',' << format_double(r.ate) << ','
        << format_double(r.se) << ',' << format_double(r.ci_lo) << ','
        << format_double(r.ci_hi) << ',' << format_double(r.p_value) << ','
        << r.stars << ',' << r.n << ',' << r.n_treated << ',' << r.n_control << ','
        << format_double(r.diagnostics.e_min) << ','
        << format_double(r.diagnostics.e_max) << ','
        << format_double(r.diagnostics.clip_share) << ','
        << format_double(r.diagnostics.fallback_rate) << '\n';
  }
}

void write_ate_reports_json(const std::string& path, const std::string& framework,
                            const std::vector<AteReport>& reports) {
  nlohmann::ordered_json j;
  j["framework"] = framework;
  j["treatment_coding"] =
      "W = 1 is the positive arm (positive sentiment; above-median for "
      "binarized features)";
  j["significance"] = "* p < 0.05, ** p < 0.01, *** p < 0.001";
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json e;
    e["treatment"] = r.treatment_name;
    e["ate"] = r.ate;
    e["se"] = r.se;
    e["ci_lo"] = r.ci_lo;
    e["ci_hi"] = r.ci_hi;
    e["p_value"] = r.p_value;
    e["stars"] = r.stars;
    e["n"] = r.n;
    e["n_treated"] = r.n_treated;
    e["n_control"] = r.n_control;
    nlohmann::ordered_json diag;
    diag["e_min"] = r.diagnostics.e_min;
    diag["e_max"] = r.diagnostics.e_max;
    diag["clip_share"] = r.diagnostics.clip_share;
    diag["fallback_rate"] = r.diagnostics.fallback_rate;
    e["diagnostics"] = std::move(diag);
    arr.push_back(std::move(e));
  }
  j["reports"] = std::move(arr);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace hte
