#include "mfr/ekf_gains.hpp"

#include <algorithm>

#include "mfr/errors.hpp"

namespace mfr {

FilterGainProvider::FilterGainProvider(std::vector<std::vector<TrackEstimate>> predicted,
                                       const NoiseModel& noise, std::span<const RadarSite> sites)
    : predicted_(std::move(predicted)), noise_(&noise), sites_(sites) {
  if (predicted_.size() != sites_.size()) {
    throw ContractError("need one predicted track set per radar");
  }
}

GainLadder FilterGainProvider::ladder(std::size_t observer, std::size_t target,
                                      std::span<const int> beams) const {
  std::vector<BeamAllocation> allocation;
  for (std::size_t l = 0; l < beams.size(); ++l) {
    if (beams[l] > 0) allocation.push_back({l, beams[l]});
  }
  return gain_ladder(predicted_.at(observer).at(target), allocation, *noise_, sites_);
}

double FilterGainProvider::gain(std::size_t observer, std::size_t target, std::span<const int> beams) const {
  return ladder(observer, target, beams).total;
}

double FilterGainProvider::single_beam_gain(std::size_t observer, std::size_t target,
                                            std::size_t radar) const {
  const BeamAllocation one{radar, 1};
  return gain_ladder(predicted_.at(observer).at(target), std::span(&one, 1), *noise_, sites_).total;
}

double FilterGainProvider::max_single_beam_gain(const TopologySpec& topology, std::size_t observer) const {
  double best = 0.0;
  for (std::size_t l : topology.neighbors[observer]) {
    for (std::size_t j : topology.observable[l]) best = std::max(best, single_beam_gain(observer, j, l));
  }
  return best;
}

double FilterGainProvider::max_single_beam_gain(const TopologySpec& topology) const {
  double best = 0.0;
  for (std::size_t i = 0; i < radars(); ++i) best = std::max(best, max_single_beam_gain(topology, i));
  return best;
}

HorizonGainProvider::HorizonGainProvider(std::vector<std::vector<TrackEstimate>> predicted,
                                         const MotionModel& motion, const NoiseModel& noise,
                                         std::span<const RadarSite> sites, int horizon)
    : predicted_(std::move(predicted)), motion_(&motion), noise_(&noise), sites_(sites), horizon_(horizon) {
  if (predicted_.size() != sites_.size()) throw ContractError("need one predicted track set per radar");
  if (horizon_ < 1) throw ContractError("horizon must be >= 1");
}

double HorizonGainProvider::gain(std::size_t observer, std::size_t target, std::span<const int> beams) const {
  std::vector<BeamAllocation> allocation;
  for (std::size_t l = 0; l < beams.size(); ++l) {
    if (beams[l] > 0) allocation.push_back({l, beams[l]});
  }
  const StateMatrix& f = motion_->transition();
  const StateMatrix& q = motion_->process_covariance();
  TrackEstimate track = predicted_.at(observer).at(target);
  StateMatrix open = track.cov;
  double total = 0.0;
  for (int k = 0; k < horizon_; ++k) {
    if (k > 0) {
      track.state = f * track.state;
      track.cov = f * track.cov * f.transpose() + q;
      open = f * open * f.transpose() + q;
    }
    track.cov = posterior_covariance(track, allocation, *noise_, sites_);
    total += open.trace() - track.cov.trace();
  }
  return total;
}

}  // namespace mfr
