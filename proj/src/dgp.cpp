#include "hte/dgp.hpp"

#include <cmath>

#include "hte/common.hpp"
#include "hte/csv.hpp"
#include "hte/rng.hpp"

namespace hte {

void DgpSpec::validate() const {
  if (n < 1) throw ValidationError("dgp: n must be >= 1");
  if (d < 1) throw ValidationError("dgp: d must be >= 1");
  if (sigma < 0.0) throw ValidationError("dgp: sigma must be >= 0");
  if (!propensity || !baseline || !effect) {
    throw ValidationError("dgp: propensity, baseline and effect rules required");
  }
}

std::vector<std::string> dgp_names() {
  return {"randomized_constant", "null_effect", "confounded_step",
          "heterogeneous_linear"};
}

DgpSpec make_dgp(const std::string& name, std::size_t n, double sigma,
                 std::uint64_t seed) {
  DgpSpec spec;
  spec.name = name;
  spec.n = n;
  spec.d = 5;
  spec.sigma = sigma;
  spec.seed = seed;
  if (name == "randomized_constant") {
    spec.propensity = [](std::span<const double>) { return 0.5; };
    spec.baseline = [](std::span<const double> x) { return x[0]; };
    spec.effect = [](std::span<const double>) { return 2.0; };
    spec.true_ate = 2.0;
  } else if (name == "null_effect") {
    spec.propensity = [](std::span<const double>) { return 0.5; };
    spec.baseline = [](std::span<const double> x) { return x[0]; };
    spec.effect = [](std::span<const double>) { return 0.0; };
    spec.true_ate = 0.0;
  } else if (name == "confounded_step") {
    // Treatment probability and outcome level both rise with x1, so the
    // naive difference in means overshoots the true effect.
    spec.propensity = [](std::span<const double> x) {
      return 0.2 + 0.6 * (x[0] > 0.0 ? 1.0 : 0.0);
    };
    spec.baseline = [](std::span<const double> x) { return 3.0 * x[0]; };
    spec.effect = [](std::span<const double> x) {
      return 2.0 * (x[0] > 0.0 ? 1.0 : 0.0);
    };
    spec.true_ate = 1.0;  // 2 * P(x1 > 0) under the symmetric covariate law
  } else if (name == "heterogeneous_linear") {
    spec.propensity = [](std::span<const double>) { return 0.5; };
    spec.baseline = [](std::span<const double> x) { return x[0]; };
    spec.effect = [](std::span<const double> x) { return 1.0 + x[1]; };
    spec.true_ate = 1.0;
  } else {
    std::string known;
    for (const auto& k : dgp_names()) known += (known.empty() ? "" : ", ") + k;
    throw ValidationError("dgp: unknown process '" + name + "' (known: " + known + ")");
  }
  return spec;
}

DgpDraw generate(const DgpSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  DgpDraw draw;
  draw.true_ate = spec.true_ate;
  draw.sample.X = Matrix(spec.n, spec.d);
  draw.sample.W.resize(spec.n);
  draw.sample.Y.resize(spec.n);
  draw.tau.resize(spec.n);
  draw.e.resize(spec.n);
  draw.mu.resize(spec.n);
  for (std::size_t j = 0; j < spec.d; ++j) {
    draw.sample.feature_names.push_back("x" + std::to_string(j + 1));
  }
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto row = draw.sample.X.row(i);
    for (std::size_t j = 0; j < spec.d; ++j) row[j] = rng.normal();
    double e = spec.propensity(row);
    if (e < 0.05 || e > 0.95) {
      throw ValidationError("dgp: propensity rule left [0.05, 0.95]");
    }
    double mu = spec.baseline(row);
    double tau = spec.effect(row);
    int w = rng.bernoulli(e) ? 1 : 0;
    double noise = spec.sigma > 0.0 ? spec.sigma * rng.normal() : 0.0;
    draw.e[i] = e;
    draw.mu[i] = mu;
    draw.tau[i] = tau;
    draw.sample.W[i] = w;
    draw.sample.Y[i] = mu + w * tau + noise;
  }
  return draw;
}

void write_dgp_csv(const std::string& path, const DgpDraw& draw) {
  std::vector<std::string> names = draw.sample.feature_names;
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < draw.sample.X.cols; ++j) {
    std::vector<double> col(draw.sample.X.rows);
    for (std::size_t i = 0; i < draw.sample.X.rows; ++i) col[i] = draw.sample.X.at(i, j);
    columns.push_back(std::move(col));
  }
  names.push_back("w");
  std::vector<double> w(draw.sample.W.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = draw.sample.W[i];
  columns.push_back(std::move(w));
  names.push_back("y");
  columns.push_back(draw.sample.Y);
  write_table_csv(path, FrameTable(std::move(names), std::move(columns)));
}

}  // namespace hte
