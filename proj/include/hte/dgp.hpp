#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hte/causal.hpp"

namespace hte {

// Synthetic treatment-effect process with analytically known propensity,
// baseline and effect surfaces. Covariates are i.i.d. standard normal;
// W ~ Bernoulli(e(x)); Y = mu(x) + W * tau(x) + sigma * noise.
struct DgpSpec {
  std::string name;
  std::size_t n = 2000;
  std::size_t d = 5;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::function<double(std::span<const double>)> propensity;
  std::function<double(std::span<const double>)> baseline;
  std::function<double(std::span<const double>)> effect;
  double true_ate = 0.0;  // analytic mean of tau under the covariate law

  void validate() const;
};

// Catalog:
//   randomized_constant   e = 0.5, mu = x1, tau = 2          (ATE 2)
//   null_effect           e = 0.5, mu = x1, tau = 0          (ATE 0)
//   confounded_step       e = 0.2 + 0.6*[x1 > 0], mu = 3*x1,
//                         tau = 2*[x1 > 0]                   (ATE 1)
//   heterogeneous_linear  e = 0.5, mu = x1, tau = 1 + x2     (ATE 1)
DgpSpec make_dgp(const std::string& name, std::size_t n, double sigma,
                 std::uint64_t seed);
std::vector<std::string> dgp_names();

struct DgpDraw {
  CausalSample sample;
  double true_ate = 0.0;
  std::vector<double> tau;  // tau(X_i)
  std::vector<double> e;    // e(X_i)
  std::vector<double> mu;   // mu(X_i), for oracle outcome models
};

DgpDraw generate(const DgpSpec& spec);

// Dumps x1..xd,w,y so the sample feeds straight back into the pipeline.
void write_dgp_csv(const std::string& path, const DgpDraw& draw);

}  // namespace hte
