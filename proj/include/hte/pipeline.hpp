#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hte/boost.hpp"
#include "hte/causal.hpp"
#include "hte/csv.hpp"

namespace hte {

// Batch configuration: a key = value file (see README for the schema) with
// CLI flags layered on top. Frameworks are named conditioner lists, e.g.
//   framework.asset_composition = Loans Pvt Sector, Loans Fin Inst, ...
struct PipelineConfig {
  std::string input;
  std::string out_dir = ".";
  std::string outcome;
  std::string sentiment;
  std::map<std::string, std::vector<std::string>> frameworks;
  double split = 0.8;  // train fraction for the SHAP stage
  std::uint64_t seed = 0;
  int k_clusters = 0;  // 0 = height-rule default
  double cluster_height_threshold = 0.7;
  int threads = 1;
  std::size_t background_rows = 128;
  int folds = 2;
  BoostConfig model_boost;     // profitability model behind the SHAP stage
  BoostConfig nuisance_boost;  // propensity/outcome nuisance models
  ForestConfig forest;
  CsvOptions csv;
};

PipelineConfig parse_config_file(const std::string& path);
// Applies `key = value` pairs (same keys as the file) onto an existing
// config; used by both the file parser and CLI overrides.
void apply_config_entry(PipelineConfig& config, const std::string& key,
                        const std::string& value);

// Ranking artifact produced by the SHAP stage and consumed by the ATE stage.
struct RankingEntry {
  std::string feature;
  double importance = 0.0;
  bool selected = false;  // importance strictly > 0
};
std::vector<RankingEntry> read_ranking_csv(const std::string& path);

struct StageResult {
  std::vector<std::string> files;     // artifacts written, in order
  std::vector<std::string> messages;  // human-readable notes
};

// Correlation matrix, Ward dendrogram and per-cluster representatives.
StageResult cmd_cluster(const PipelineConfig& config);
// Seeded train/test split, boosted profitability model, SHAP attribution on
// the test split, ranking with the strictly-positive importance subset.
StageResult cmd_shap(const PipelineConfig& config);
// One starred ATE report per treatment (sentiment plus each SHAP-selected
// feature, median-binarized), ordered by SHAP rank. Reuses the ranking
// artifact when present, otherwise runs the SHAP stage first.
StageResult cmd_ate(const PipelineConfig& config, const std::string& framework);
// cluster -> shap -> ate per framework -> summary manifest with digests.
StageResult cmd_pipeline(const PipelineConfig& config);
// Synthetic sample dump (plus a truth file) for end-to-end runs.
StageResult cmd_dgp(const std::string& name, std::size_t n, double sigma,
                    std::uint64_t seed, const std::string& out_dir);

void write_ate_reports_csv(const std::string& path,
                           const std::vector<AteReport>& reports);
void write_ate_reports_json(const std::string& path, const std::string& framework,
                            const std::vector<AteReport>& reports);

}  // namespace hte
