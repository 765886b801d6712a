#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

namespace trda {

// Counter-style deterministic RNG. A stream is keyed by an arbitrary list of
// 64-bit words; streams with different keys are independent for practical
// purposes. All draws are produced with explicit algorithms (splitmix64,
// polar Box-Muller) so output is bit-identical across platforms and standard
// library implementations.
class RngStream {
 public:
  explicit RngStream(std::initializer_list<std::uint64_t> key);
  explicit RngStream(const std::vector<std::uint64_t>& key);

  std::uint64_t next_u64();
  // uniform on [0, 1) with 53 random bits
  double uniform01();
  // uniform integer in [0, bound), bound >= 1
  std::uint64_t next_below(std::uint64_t bound);
  bool bernoulli(double p);
  // standard normal (polar method, second value cached)
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index p);

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Key builder for hierarchical stream derivation: base keys get extended with
// replication / group / purpose words as the simulation fans out.
struct StreamKey {
  std::vector<std::uint64_t> words;

  StreamKey with(std::uint64_t w) const {
    StreamKey k = *this;
    k.words.push_back(w);
    return k;
  }
  RngStream stream() const { return RngStream(words); }
};

}  // namespace trda
