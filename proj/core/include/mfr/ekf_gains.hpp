#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfr/filtering.hpp"
#include "mfr/game.hpp"

namespace mfr {

/// Gain provider backed by the covariance-only filter oracle.
///
/// Observer i's gain on target j is the trace reduction of i's own predicted
/// track of j under the beams it hears, processed in ascending radar order.
/// Holds copies of the predicted tracks and references to `noise` and
/// `sites`, which must outlive the provider.
class FilterGainProvider final : public GainProvider {
 public:
  /// `predicted[i][j]` is radar i's predicted track of target j.
  FilterGainProvider(std::vector<std::vector<TrackEstimate>> predicted, const NoiseModel& noise,
                     std::span<const RadarSite> sites);

  double gain(std::size_t observer, std::size_t target, std::span<const int> beams) const override;
  GainLadder ladder(std::size_t observer, std::size_t target, std::span<const int> beams) const;

  /// Gain of one beam from `radar` alone on observer's track of `target`.
  double single_beam_gain(std::size_t observer, std::size_t target, std::size_t radar) const;
  /// Largest single-beam gain over the observer's neighbors and the targets
  /// each neighbor can see.
  double max_single_beam_gain(const TopologySpec& topology, std::size_t observer) const;
  /// Same, maximized over every observer.
  double max_single_beam_gain(const TopologySpec& topology) const;

  const TrackEstimate& predicted(std::size_t observer, std::size_t target) const {
    return predicted_[observer][target];
  }
  std::size_t radars() const { return predicted_.size(); }

 private:
  std::vector<std::vector<TrackEstimate>> predicted_;
  const NoiseModel* noise_;
  std::span<const RadarSite> sites_;
};

/// Gain of holding an allocation for `horizon` scans: the summed trace of the
/// open-loop predictions minus the summed posterior traces, both rolled out
/// from the current predicted tracks with covariance-only updates. With
/// horizon 1 this is the one-scan gain.
class HorizonGainProvider final : public GainProvider {
 public:
  HorizonGainProvider(std::vector<std::vector<TrackEstimate>> predicted, const MotionModel& motion,
                      const NoiseModel& noise, std::span<const RadarSite> sites, int horizon);

  double gain(std::size_t observer, std::size_t target, std::span<const int> beams) const override;

 private:
  std::vector<std::vector<TrackEstimate>> predicted_;
  const MotionModel* motion_;
  const NoiseModel* noise_;
  std::span<const RadarSite> sites_;
  int horizon_;
};

}  // namespace mfr
