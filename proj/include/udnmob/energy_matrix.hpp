#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "udnmob/core.hpp"

namespace udnmob {

/// Row-major T x N matrix of per-slot energies.
class EnergyMatrix {
 public:
  EnergyMatrix() = default;
  EnergyMatrix(std::size_t slots, std::size_t arms, double fill = 0.0)
      : slots_(slots), arms_(arms), data_(slots * arms, fill) {}

  std::size_t slots() const noexcept { return slots_; }
  std::size_t arms() const noexcept { return arms_; }
  /// Zero-based slot index.
  double at(std::size_t slot, SbsId a) const { return data_[slot * arms_ + a]; }
  double& at(std::size_t slot, SbsId a) { return data_[slot * arms_ + a]; }
  std::span<const double> row(std::size_t slot) const {
    return {data_.data() + slot * arms_, arms_};
  }
  std::span<double> row(std::size_t slot) { return {data_.data() + slot * arms_, arms_}; }
  double max_value() const;
  double min_value() const;

 private:
  std::size_t slots_ = 0;
  std::size_t arms_ = 0;
  std::vector<double> data_;
};

}  // namespace udnmob
