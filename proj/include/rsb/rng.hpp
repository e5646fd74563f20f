#pragma once

#include <cstdint>
#include <random>

namespace rsb {

// Seeded random stream with its own variate generators. Every draw goes
// through code in this class so sequences are identical across standard
// library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  // Independent child stream; same (seed, id) always gives the same child.
  RngStream split(std::uint64_t id) const;

  std::uint64_t next_u64() { return engine_(); }

  double uniform();                                  // open interval (0,1)
  double normal();
  double exponential(double rate = 1.0);
  double gamma(double shape, double rate = 1.0);
  double log_gamma(double shape);                    // log of a Ga(shape,1) draw
  double beta(double a, double b);
  double log_beta(double a, double b);               // log of a Be(a,b) draw
  double inv_gamma(double shape, double scale);
  bool bernoulli(double p);
  double poisson(double mean);
  double poisson_log(double log_mean);
  std::size_t uniform_index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rsb
