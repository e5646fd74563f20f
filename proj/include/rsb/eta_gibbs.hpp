#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rsb/distributions.hpp"
#include "rsb/rng.hpp"

namespace rsb {

struct MixtureHyper {
  double a_s = 1.0;
  double b_s = 1.0;
  RsbParams rsb{};

  void validate() const;
};

// Per-observation mixture state. eta2 and u are stored on the log scale
// because prior draws of eta2 overflow a double a few percent of the time.
struct EtaLatentState {
  std::vector<std::uint8_t> z;
  Eigen::VectorXd log_eta2;
  Eigen::VectorXd log_u;
  Eigen::VectorXd v;
  Eigen::VectorXd w;
  double s = 0.1;

  static EtaLatentState initial(std::size_t n);

  std::size_t size() const { return z.size(); }
  double log_eta(std::size_t i) const { return z[i] ? log_eta2[i] : 0.0; }
  double eta(std::size_t i) const { return z[i] ? std::exp(log_eta2[i]) : 1.0; }
  Eigen::VectorXd log_eta() const;
  Eigen::VectorXd eta() const;
  std::size_t outlier_count() const;
};

inline constexpr double kMinRate = 1e-300;
inline constexpr double kMaxLatent = 1e300;

// P(z = 1 | y, lambda, eta2, s) from its log odds.
double z_probability_log(double y, double log_lambda, double log_eta2, double s);
double z_probability(double y, double lambda, double eta2, double s);

bool update_z(double y, double lambda, double eta2, double s, RngStream& rng);
bool update_z_log(double y, double log_lambda, double log_eta2, double s, RngStream& rng);

double update_eta2(double y, bool z, double lambda, double u, RngStream& rng);
// log-scale version: returns log eta2
double update_eta2_log(double y, bool z, double log_lambda, double log_u, RngStream& rng);

struct Latents {
  double v;
  double w;
  double log_u;
};
Latents update_latents_log(double log_eta2, const MixtureHyper& hyper, RngStream& rng);

double update_s(const std::vector<std::uint8_t>& z, const MixtureHyper& hyper, RngStream& rng);

enum class SMode {
  Free,      // s drawn from its Beta conditional
  Fixed      // s held at state.s
};

// One sweep over observations followed by the s update. log_lambda holds
// the log rate of each observation excluding the multiplicative error.
void eta_step(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& log_lambda,
              EtaLatentState& state, const MixtureHyper& hyper, RngStream& rng, SMode s_mode = SMode::Free);

}  // namespace rsb
