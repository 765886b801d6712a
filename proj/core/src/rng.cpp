#include "trda/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace trda {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

std::uint64_t fold_key(const std::uint64_t* data, std::size_t n) {
  std::uint64_t s = 0x6a09e667f3bcc909ull;
  for (std::size_t i = 0; i < n; ++i) {
    s = mix64(s + kGamma + data[i]);
  }
  return s;
}

}  // namespace

RngStream::RngStream(std::initializer_list<std::uint64_t> key)
    : state_(fold_key(key.begin(), key.size())) {}

RngStream::RngStream(const std::vector<std::uint64_t>& key)
    : state_(fold_key(key.data(), key.size())) {}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  // multiply-shift; bias is O(2^-64), irrelevant for simulation use
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  return static_cast<std::uint64_t>(m >> 64);
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

double RngStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * f;
  has_cached_ = true;
  return u * f;
}

Eigen::VectorXd RngStream::normal_vector(Eigen::Index p) {
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < p; ++i) z[i] = normal();
  return z;
}

}  // namespace trda
