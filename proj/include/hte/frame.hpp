#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hte {

enum class Role { feature, outcome, treatment, ignored };

std::string role_name(Role r);

// Dense row-major matrix of doubles; the common currency between the table
// and the model-fitting code.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }
};

// Column-typed tabular dataset. Columns are 64-bit reals of equal length with
// unique non-empty names; each column carries a role. Instances are treated
// as immutable once built: the with_* helpers return modified copies, so a
// const FrameTable& is safe to share across threads.
class FrameTable {
 public:
  FrameTable() = default;
  // Validates lengths, name uniqueness, role constraints (at most one
  // outcome; treatment columns must be 0/1).
  FrameTable(std::vector<std::string> names,
             std::vector<std::vector<double>> columns,
             std::vector<Role> roles = {});

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return names_.size(); }

  const std::vector<std::string>& column_names() const { return names_; }
  bool has_column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;  // throws ValidationError
  const std::vector<double>& column(std::size_t idx) const { return columns_[idx]; }
  const std::vector<double>& column(const std::string& name) const {
    return columns_[column_index(name)];
  }
  const std::string& name(std::size_t idx) const { return names_[idx]; }
  Role role(std::size_t idx) const { return roles_[idx]; }
  Role role(const std::string& name) const { return roles_[column_index(name)]; }

  FrameTable with_role(const std::string& name, Role role) const;
  FrameTable with_column(const std::string& name, std::vector<double> values,
                         Role role) const;
  // Keeps the listed columns (in the given order) and drops the rest.
  FrameTable select(const std::vector<std::string>& names) const;
  // Keeps the listed rows, in order.
  FrameTable take_rows(const std::vector<std::size_t>& rows) const;

  std::vector<std::size_t> indices_with_role(Role role) const;

  // Row-major matrix of the given columns.
  Matrix to_matrix(const std::vector<std::size_t>& col_indices) const;

 private:
  void validate() const;

  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::vector<Role> roles_;
  std::size_t n_rows_ = 0;
};

}  // namespace hte
