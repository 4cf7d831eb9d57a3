#pragma once

// Shared domain types for the mobility learners, environments and harness.
//
// Losses are normalized so that the largest service energy plus the
// handover charge equals one; every learner works on [0,1] losses.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace udnmob {

/// Dense SBS index in [0, N).
using SbsId = std::size_t;

/// Invalid configuration (bad parameters, guard violations, malformed scenario).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A policy asked for something the slot protocol forbids.
struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

class NormalizedEnergy {
 public:
  constexpr NormalizedEnergy() = default;
  explicit NormalizedEnergy(double value);

  double value() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// Cost of one slot: service energy plus a handover charge when the serving
/// SBS changed.
struct SlotCost {
  NormalizedEnergy service;
  bool switched = false;
  double handover_cost = 0.0;

  double total() const noexcept {
    return service.value() + (switched ? handover_cost : 0.0);
  }
};

/// Set of SBS ids, N <= 64.
class SbsSet {
 public:
  static constexpr std::size_t kMaxSbs = 64;

  constexpr SbsSet() = default;
  static SbsSet all(std::size_t n);
  static SbsSet from_ids(std::span<const SbsId> ids);
  static constexpr SbsSet from_bits(std::uint64_t bits) { return SbsSet(bits); }

  bool contains(SbsId a) const noexcept {
    return a < kMaxSbs && ((bits_ >> a) & 1U) != 0;
  }
  void insert(SbsId a);
  void erase(SbsId a) noexcept {
    if (a < kMaxSbs) bits_ &= ~(std::uint64_t{1} << a);
  }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
  bool empty() const noexcept { return bits_ == 0; }
  std::uint64_t bits() const noexcept { return bits_; }
  std::vector<SbsId> ids() const;
  /// k-th member in increasing id order; k < size().
  SbsId nth(std::size_t k) const;

  friend bool operator==(SbsSet, SbsSet) = default;

 private:
  constexpr explicit SbsSet(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

struct NormalizedPair {
  NormalizedEnergy energy;
  double handover_cost;
};

/// Affine map raw joules -> [0,1] with E_max + E_s = 1.
NormalizedPair normalize_energy(double raw, double e_max_raw, double e_s_raw);

/// Sum of service energies plus E_s for every t >= 2 with a_t != a_{t-1}.
double total_cost(std::span<const SbsId> actions, std::span<const double> energies,
                  double handover_cost);

/// Number of slots t >= 2 with a_t != a_{t-1}.
std::size_t count_handovers(std::span<const SbsId> actions);

// Deterministic random stream.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++ standard.
// The engine seed is splitmix64(seed ^ splitmix64(stream_id)), so distinct
// stream ids give decorrelated sequences from one experiment seed. All
// derived draws (uniform, normal, categorical) are computed here rather than
// through <random> distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via Box-Muller.
  double normal();
  /// Inverse-CDF draw; probabilities need not be exactly normalized.
  std::size_t categorical(std::span<const double> probabilities);
  /// Uniform member of a non-empty set.
  SbsId uniform_member(SbsSet set);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stable stream id for a named component and repetition index (FNV-1a).
std::uint64_t stream_id_for(std::string_view name, std::uint64_t index = 0) noexcept;

}  // namespace udnmob
