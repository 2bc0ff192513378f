#pragma once

#include <string>
#include <vector>

#include "hte/frame.hpp"

namespace hte {

// Symmetric matrix of sample Pearson coefficients over the feature-role
// columns, unit diagonal. Zero-variance columns correlate as 0 (with a
// warning) so downstream clustering stays total.
struct CorrelationMatrix {
  std::vector<std::string> names;
  Matrix rho;
  std::vector<std::string> warnings;
};

CorrelationMatrix pearson_matrix(const FrameTable& table);

// Sample Pearson correlation of two equal-length vectors; 0 when either has
// zero variance (sets *degenerate when provided).
double pearson(const std::vector<double>& x, const std::vector<double>& y,
               bool* degenerate = nullptr);

// Middle of the sorted values; mean of the two middles for even n.
double median(std::vector<double> values);

// Appends `<column>__hi`: 1 where the cell is strictly above the column
// median, else 0 (median ties go to control), role = treatment.
FrameTable binarize_at_median(const FrameTable& table, const std::string& column);

void write_correlation_csv(const std::string& path, const CorrelationMatrix& m);

}  // namespace hte
