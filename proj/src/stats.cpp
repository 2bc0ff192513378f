#include "hte/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hte/common.hpp"

namespace hte {

double pearson(const std::vector<double>& x, const std::vector<double>& y,
               bool* degenerate) {
  if (degenerate) *degenerate = false;
  const std::size_t n = x.size();
  if (y.size() != n) throw ValidationError("pearson: length mismatch");
  if (n < 2) throw ValidationError("pearson: needs at least 2 rows");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const FrameTable& table) {
  auto feature_idx = table.indices_with_role(Role::feature);
  if (feature_idx.empty()) {
    throw ValidationError("pearson_matrix: no feature columns");
  }
  if (table.n_rows() < 2) {
    throw ValidationError("pearson_matrix: needs at least 2 rows");
  }
  const std::size_t d = feature_idx.size();
  CorrelationMatrix out;
  out.names.reserve(d);
  for (std::size_t i : feature_idx) out.names.push_back(table.name(i));
  out.rho = Matrix(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) out.rho.at(i, i) = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      bool degenerate = false;
      double r = pearson(table.column(feature_idx[i]),
                         table.column(feature_idx[j]), &degenerate);
      if (degenerate) {
        out.warnings.push_back("zero-variance column pair (" + out.names[i] +
                               ", " + out.names[j] + "): correlation set to 0");
      }
      out.rho.at(i, j) = r;
      out.rho.at(j, i) = r;
    }
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median: empty vector");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

FrameTable binarize_at_median(const FrameTable& table, const std::string& column) {
  const auto& col = table.column(column);
  double lo = *std::min_element(col.begin(), col.end());
  double hi = *std::max_element(col.begin(), col.end());
  if (lo == hi) {
    throw ValidationError("binarize_at_median: column '" + column +
                          "' is constant; cannot form two arms");
  }
  double m = median(col);
  std::vector<double> w(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) w[i] = col[i] > m ? 1.0 : 0.0;
  return table.with_column(column + "__hi", std::move(w), Role::treatment);
}

void write_correlation_csv(const std::string& path, const CorrelationMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write correlation CSV: " + path);
  for (const auto& n : m.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    out << m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      out << ',' << format_double(m.rho.at(i, j));
    }
    out << '\n';
  }
}

}  // namespace hte
