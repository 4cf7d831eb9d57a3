#include "udnmob/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace udnmob {

NormalizedEnergy::NormalizedEnergy(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::domain_error("normalized energy outside [0,1]: " + std::to_string(value));
  }
}

SbsSet SbsSet::all(std::size_t n) {
  if (n > kMaxSbs) throw ConfigError("at most 64 SBSs supported");
  return SbsSet(n == kMaxSbs ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
}

SbsSet SbsSet::from_ids(std::span<const SbsId> ids) {
  SbsSet s;
  for (SbsId a : ids) s.insert(a);
  return s;
}

void SbsSet::insert(SbsId a) {
  if (a >= kMaxSbs) throw std::out_of_range("SBS id exceeds set capacity");
  bits_ |= std::uint64_t{1} << a;
}

std::vector<SbsId> SbsSet::ids() const {
  std::vector<SbsId> out;
  out.reserve(size());
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(static_cast<SbsId>(std::countr_zero(b)));
  }
  return out;
}

SbsId SbsSet::nth(std::size_t k) const {
  std::uint64_t b = bits_;
  for (std::size_t i = 0; i < k && b != 0; ++i) b &= b - 1;
  if (b == 0) throw std::out_of_range("SbsSet::nth past end");
  return static_cast<SbsId>(std::countr_zero(b));
}

NormalizedPair normalize_energy(double raw, double e_max_raw, double e_s_raw) {
  if (!(e_max_raw > 0.0)) throw std::domain_error("e_max_raw must be positive");
  if (!(e_s_raw >= 0.0)) throw std::domain_error("e_s_raw must be non-negative");
  if (!(raw >= 0.0 && raw <= e_max_raw)) {
    throw std::domain_error("raw energy outside [0, e_max_raw]");
  }
  const double scale = e_max_raw + e_s_raw;
  // raw <= e_max_raw <= scale, so the quotient cannot leave [0,1].
  return {NormalizedEnergy(std::min(1.0, raw / scale)), e_s_raw / scale};
}

std::size_t count_handovers(std::span<const SbsId> actions) {
  std::size_t n = 0;
  for (std::size_t t = 1; t < actions.size(); ++t) {
    if (actions[t] != actions[t - 1]) ++n;
  }
  return n;
}

double total_cost(std::span<const SbsId> actions, std::span<const double> energies,
                  double handover_cost) {
  if (actions.size() != energies.size()) {
    throw std::domain_error("total_cost: actions and energies differ in length");
  }
  double sum = 0.0;
  for (double e : energies) sum += e;
  return sum + handover_cost * static_cast<double>(count_handovers(actions));
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_id_for(std::string_view name, std::uint64_t index) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h ^ splitmix64(index));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(seed ^ splitmix64(stream_id))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::domain_error("uniform_index over empty range");
  // Rejection sampling: no modulo bias.
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double RngStream::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::size_t RngStream::categorical(std::span<const double> probabilities) {
  if (probabilities.empty()) throw std::domain_error("categorical over empty support");
  double total = 0.0;
  for (double p : probabilities) total += p;
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    acc += probabilities[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

SbsId RngStream::uniform_member(SbsSet set) {
  if (set.empty()) throw std::domain_error("uniform_member of empty set");
  return set.nth(uniform_index(set.size()));
}

}  // namespace udnmob
