#include "waiterplan/rng.hpp"

#include <stdexcept>

namespace waiterplan {

namespace {

uint64_t splitmix64(uint64_t& x) {
  uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed) {
  uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::symmetric() { return uniform(-1.0, 1.0); }

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n <= 0");
  return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
}

VecX Rng::uniform_vec(const VecX& lo, const VecX& hi) {
  VecX out(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) out[i] = uniform(lo[i], hi[i]);
  return out;
}

VecX Rng::symmetric_vec(int n) {
  VecX out(n);
  for (int i = 0; i < n; ++i) out[i] = symmetric();
  return out;
}

Rng Rng::child(uint64_t index) const {
  uint64_t x = seed_ ^ (0xa0761d6478bd642fULL + index * 0xe7037ed1a0b428dbULL);
  return Rng(splitmix64(x));
}

}  // namespace waiterplan
