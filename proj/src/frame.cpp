#include "hte/frame.hpp"

#include <algorithm>
#include <unordered_set>

#include "hte/common.hpp"

namespace hte {

std::string role_name(Role r) {
  switch (r) {
    case Role::feature: return "feature";
    case Role::outcome: return "outcome";
    case Role::treatment: return "treatment";
    case Role::ignored: return "ignored";
  }
  return "?";
}

FrameTable::FrameTable(std::vector<std::string> names,
                       std::vector<std::vector<double>> columns,
                       std::vector<Role> roles)
    : names_(std::move(names)), columns_(std::move(columns)), roles_(std::move(roles)) {
  if (roles_.empty()) roles_.assign(names_.size(), Role::feature);
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  validate();
}

void FrameTable::validate() const {
  if (names_.size() != columns_.size() || names_.size() != roles_.size()) {
    throw ValidationError("table: names, columns and roles must align");
  }
  if (names_.empty()) throw ValidationError("table: needs at least one column");
  if (n_rows_ < 1) throw ValidationError("table: needs at least one row");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ValidationError("table: empty column name");
    if (!seen.insert(n).second) {
      throw ValidationError("table: duplicate column name '" + n + "'");
    }
  }
  int outcomes = 0;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].size() != n_rows_) {
      throw ValidationError("table: column '" + names_[i] +
                            "' has mismatched length");
    }
    if (roles_[i] == Role::outcome) ++outcomes;
    if (roles_[i] == Role::treatment) {
      for (double v : columns_[i]) {
        if (v != 0.0 && v != 1.0) {
          throw ValidationError("table: treatment column '" + names_[i] +
                                "' contains a value other than 0/1");
        }
      }
    }
  }
  if (outcomes > 1) throw ValidationError("table: more than one outcome column");
}

bool FrameTable::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t FrameTable::column_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw ValidationError("table: no column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

FrameTable FrameTable::with_role(const std::string& name, Role role) const {
  auto roles = roles_;
  roles[column_index(name)] = role;
  return FrameTable(names_, columns_, std::move(roles));
}

FrameTable FrameTable::with_column(const std::string& name,
                                   std::vector<double> values, Role role) const {
  auto names = names_;
  auto columns = columns_;
  auto roles = roles_;
  names.push_back(name);
  columns.push_back(std::move(values));
  roles.push_back(role);
  return FrameTable(std::move(names), std::move(columns), std::move(roles));
}

FrameTable FrameTable::select(const std::vector<std::string>& names) const {
  std::vector<std::string> out_names;
  std::vector<std::vector<double>> out_cols;
  std::vector<Role> out_roles;
  for (const auto& n : names) {
    std::size_t i = column_index(n);
    out_names.push_back(names_[i]);
    out_cols.push_back(columns_[i]);
    out_roles.push_back(roles_[i]);
  }
  return FrameTable(std::move(out_names), std::move(out_cols), std::move(out_roles));
}

FrameTable FrameTable::take_rows(const std::vector<std::size_t>& rows) const {
  std::vector<std::vector<double>> out_cols(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out_cols[c].reserve(rows.size());
    for (std::size_t r : rows) out_cols[c].push_back(columns_[c][r]);
  }
  return FrameTable(names_, std::move(out_cols), roles_);
}

std::vector<std::size_t> FrameTable::indices_with_role(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (roles_[i] == role) out.push_back(i);
  }
  return out;
}

Matrix FrameTable::to_matrix(const std::vector<std::size_t>& col_indices) const {
  Matrix m(n_rows_, col_indices.size());
  for (std::size_t c = 0; c < col_indices.size(); ++c) {
    const auto& col = columns_[col_indices[c]];
    for (std::size_t r = 0; r < n_rows_; ++r) m.at(r, c) = col[r];
  }
  return m;
}

}  // namespace hte
