#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rsb/dataset.hpp"
#include "rsb/rng.hpp"

namespace rsb {

struct GlmScenario {
  int id = 1;
  double omega1 = 0.05;  // zero-inflation probability
  double omega2 = 0.0;   // large-count probability
  double y_o = 20.0;
  bool structured = false;
  std::uint64_t seed = 1;
  Eigen::Index n = 300;

  void validate() const;
};

// Scenario table entry 1..9 with the given outlier shift and seed.
GlmScenario glm_scenario(int id, double y_o = 20.0, std::uint64_t seed = 1, bool structured = false);
Eigen::VectorXd glm_true_beta();  // intercept first

struct GlmSimulated {
  CountDataset data;
  Eigen::VectorXd beta;      // truth, intercept first
  std::vector<int> d;        // 0 clean, 1 zeroed, 2 shifted
  Eigen::VectorXd y_clean;
};

GlmSimulated gen_glm_scenario(const GlmScenario& sc);

struct TrendSimulated {
  Eigen::VectorXd y;
  Eigen::VectorXd y_clean;
  Eigen::VectorXd truth;  // true rate e^theta
  std::vector<int> d;
};

// Trend truth for scenarios 1, 2 and 4 (scenario 3 is random).
double trend_truth(int id, Eigen::Index i, Eigen::Index n);
TrendSimulated gen_trend_scenario(int id, Eigen::Index n, RngStream& rng, bool contaminate = true);

}  // namespace rsb
