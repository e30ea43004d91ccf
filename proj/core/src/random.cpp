#include "mfr/random.hpp"

#include <random>

namespace mfr {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Substream::Substream(std::initializer_list<std::uint64_t> key) : state_(0x6a09e667f3bcc909ULL) {
  for (std::uint64_t k : key) {
    state_ = mix64(state_ ^ mix64(k));
  }
}

Substream::Substream(StreamDomain domain, std::initializer_list<std::uint64_t> key)
    : Substream({static_cast<std::uint64_t>(domain)}) {
  for (std::uint64_t k : key) {
    state_ = mix64(state_ ^ mix64(k));
  }
}

Substream::result_type Substream::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Substream::uniform() {
  // 53 high bits -> [0, 1).
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Substream::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(*this);
}

bool Substream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

std::uint64_t Substream::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(*this);
}

}  // namespace mfr
