#pragma once

#include <string>
#include <vector>

#include "hte/frame.hpp"
#include "hte/stats.hpp"

namespace hte {

// Agglomeration record in the usual convention: leaves are clusters
// 0..d-1, merge i creates cluster d+i. Heights are non-decreasing (the Ward
// update is monotone).
struct Dendrogram {
  struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;
    int size = 0;  // members in the merged cluster
  };
  int n_leaves = 0;
  std::vector<Merge> merges;    // exactly n_leaves - 1 entries
  std::vector<int> leaf_order;  // left-to-right order for plotting
};

// D[i][j] = 1 - |rho[i][j]|; zero diagonal, entries in [0, 1].
Matrix correlation_distance(const CorrelationMatrix& rho);

// Agglomerative clustering with the Lance-Williams Ward update applied to D
// as given (the distance is not Euclidean; the recurrence is applied to it
// literally). At each step the minimum-distance active pair merges; exact
// ties resolve to the smallest (i, j) cluster-id pair.
Dendrogram ward_linkage(const Matrix& D);

// Undoes the last k-1 merges and labels each leaf. Labels are 0..k-1,
// numbered by each cluster's smallest member index.
std::vector<int> cut_clusters(const Dendrogram& dend, int k);

// One representative per cluster: the medoid maximizing mean |rho| to the
// other members; singletons return their only member; ties take the lowest
// column index. Returned as feature indices ordered by cluster label.
std::vector<std::size_t> select_representatives(const CorrelationMatrix& rho,
                                                const std::vector<int>& assignment);

// Default cut for the pipeline: one cluster more than the number of merges
// above the multicollinearity threshold.
int default_cluster_count(const Dendrogram& dend, double height_threshold = 0.7);

void write_dendrogram_csv(const std::string& path, const Dendrogram& dend);

}  // namespace hte
