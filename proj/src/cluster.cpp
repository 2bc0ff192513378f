#include "hte/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "hte/common.hpp"

namespace hte {

Matrix correlation_distance(const CorrelationMatrix& rho) {
  const std::size_t d = rho.names.size();
  Matrix D(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      D.at(i, j) = i == j ? 0.0 : 1.0 - std::abs(rho.rho.at(i, j));
    }
  }
  return D;
}

namespace {

// Ward step of the Lance-Williams recurrence: distance from the merge of
// clusters i and j (sizes si, sj, distance dij) to cluster k of size sk.
double ward_update(double dik, double djk, double dij, double si, double sj,
                   double sk) {
  return ((si + sk) * dik + (sj + sk) * djk - sk * dij) / (si + sj + sk);
}

}  // namespace

Dendrogram ward_linkage(const Matrix& D) {
  const std::size_t d = D.rows;
  if (D.cols != d) throw ValidationError("ward_linkage: distance matrix not square");
  Dendrogram out;
  out.n_leaves = static_cast<int>(d);
  if (d < 1) throw ValidationError("ward_linkage: empty distance matrix");
  if (d == 1) {
    // Degenerate success: single feature, no merges.
    out.leaf_order = {0};
    return out;
  }

  // Working copy indexed by slot; each active slot carries its current
  // cluster id and size. Merges reuse the lower slot.
  Matrix work = D;
  std::vector<bool> active(d, true);
  std::vector<int> cluster_id(d);
  std::vector<double> size(d, 1.0);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);

  std::vector<std::vector<int>> members(d);
  for (std::size_t i = 0; i < d; ++i) members[i] = {static_cast<int>(i)};
  // Children of each merge, for the plotting order.
  std::vector<std::pair<int, int>> children;

  for (std::size_t step = 0; step + 1 < d; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    int best_ida = 0, best_idb = 0;
    bool found = false;
    for (std::size_t i = 0; i < d; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < d; ++j) {
        if (!active[j]) continue;
        double dij = work.at(i, j);
        int ida = std::min(cluster_id[i], cluster_id[j]);
        int idb = std::max(cluster_id[i], cluster_id[j]);
        bool better = dij < best;
        if (!better && dij == best) {
          better = ida < best_ida || (ida == best_ida && idb < best_idb);
        }
        if (!found || better) {
          best = dij;
          bi = i;
          bj = j;
          best_ida = ida;
          best_idb = idb;
          found = true;
        }
      }
    }

    int new_id = static_cast<int>(d + step);
    out.merges.push_back({best_ida, best_idb, best,
                          static_cast<int>(size[bi] + size[bj])});
    children.emplace_back(best_ida, best_idb);

    for (std::size_t k = 0; k < d; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double updated = ward_update(work.at(bi, k), work.at(bj, k),
                                   work.at(bi, bj), size[bi], size[bj], size[k]);
      work.at(bi, k) = updated;
      work.at(k, bi) = updated;
    }
    size[bi] += size[bj];
    active[bj] = false;
    cluster_id[bi] = new_id;
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
  }

  // Leaf order: DFS over the merge tree, first child before second.
  out.leaf_order.reserve(d);
  std::vector<int> stack = {static_cast<int>(2 * d - 2)};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (id < static_cast<int>(d)) {
      out.leaf_order.push_back(id);
    } else {
      auto [a, b] = children[static_cast<std::size_t>(id) - d];
      stack.push_back(b);
      stack.push_back(a);
    }
  }
  return out;
}

std::vector<int> cut_clusters(const Dendrogram& dend, int k) {
  const int d = dend.n_leaves;
  if (k < 1 || k > d) {
    throw ValidationError("cut_clusters: k must be in [1, " + std::to_string(d) + "]");
  }
  // Union-find over the first d - k merges.
  std::vector<int> parent(static_cast<std::size_t>(2 * d - 1));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int m = 0; m < d - k; ++m) {
    const auto& merge = dend.merges[static_cast<std::size_t>(m)];
    int id = d + m;
    parent[find(merge.a)] = id;
    parent[find(merge.b)] = id;
  }
  // Canonical labels: clusters numbered by their smallest member.
  std::map<int, int> label_of_root;
  std::vector<int> labels(static_cast<std::size_t>(d), -1);
  for (int leaf = 0; leaf < d; ++leaf) {
    int root = find(leaf);
    auto it = label_of_root.find(root);
    if (it == label_of_root.end()) {
      int next = static_cast<int>(label_of_root.size());
      label_of_root.emplace(root, next);
      labels[static_cast<std::size_t>(leaf)] = next;
    } else {
      labels[static_cast<std::size_t>(leaf)] = it->second;
    }
  }
  return labels;
}

std::vector<std::size_t> select_representatives(const CorrelationMatrix& rho,
                                                const std::vector<int>& assignment) {
  const std::size_t d = rho.names.size();
  if (assignment.size() != d) {
    throw ValidationError("select_representatives: assignment length mismatch");
  }
  int k = 0;
  for (int label : assignment) k = std::max(k, label + 1);
  std::vector<std::vector<std::size_t>> clusters(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < d; ++i) {
    int label = assignment[i];
    if (label < 0 || label >= k) {
      throw ValidationError("select_representatives: bad cluster label");
    }
    clusters[static_cast<std::size_t>(label)].push_back(i);
  }
  std::vector<std::size_t> reps;
  reps.reserve(clusters.size());
  for (const auto& cluster : clusters) {
    if (cluster.empty()) {
      throw ValidationError("select_representatives: empty cluster label");
    }
    std::size_t best = cluster.front();
    double best_score = -1.0;
    for (std::size_t candidate : cluster) {
      double mean_abs = 0.0;
      if (cluster.size() > 1) {
        for (std::size_t other : cluster) {
          if (other == candidate) continue;
          mean_abs += std::abs(rho.rho.at(candidate, other));
        }
        mean_abs /= static_cast<double>(cluster.size() - 1);
      }
      if (mean_abs > best_score) {  // strict: ties keep the lowest index
        best_score = mean_abs;
        best = candidate;
      }
    }
    reps.push_back(best);
  }
  return reps;
}

int default_cluster_count(const Dendrogram& dend, double height_threshold) {
  int above = 0;
  for (const auto& m : dend.merges) {
    if (m.height > height_threshold) ++above;
  }
  return above + 1;
}

void write_dendrogram_csv(const std::string& path, const Dendrogram& dend) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dendrogram CSV: " + path);
  out << "cluster_a,cluster_b,height,size\n";
  for (const auto& m : dend.merges) {
    out << m.a << ',' << m.b << ',' << format_double(m.height) << ',' << m.size
        << '\n';
  }
}

}  // namespace hte
