#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mfr/kinematics.hpp"

namespace mfr {

/// A radar's filtered estimate of one target.
struct TrackEstimate {
  std::size_t target_id = 0;
  std::int64_t scan = 0;
  StateVector state = StateVector::Zero();
  StateMatrix cov = StateMatrix::Identity();
};

/// Per-measurement trace reductions of the cyclic update.
struct GainLadder {
  std::vector<double> increments;
  double total = 0.0;
};

/// Beams a radar spends on one target during a scan.
struct BeamAllocation {
  std::size_t radar_id = 0;
  int beams = 0;
};

enum class CovarianceCheck { positive_definite, positive_semidefinite };

/// (P + P^T) / 2.
StateMatrix symmetrize(const StateMatrix& p);
bool is_positive_definite(const StateMatrix& p);
/// Throws CovarianceError unless `p` is symmetric and passes `check`.
void require_covariance(const StateMatrix& p, CovarianceCheck check, const char* where);

/// x <- F x, P <- F P F^T + Q (symmetrized). Scan index is left untouched.
TrackEstimate predict(const TrackEstimate& track, const MotionModel& model,
                      CovarianceCheck check = CovarianceCheck::positive_definite);

/// Sequential EKF correction, one measurement at a time in list order.
///
/// The Jacobian is re-evaluated at the running estimate before each
/// increment and the azimuth residual is wrapped into (-pi, pi]. The
/// covariance is symmetrized after each increment. Every measurement must
/// carry this track's target id and scan index.
TrackEstimate update_cyclic(const TrackEstimate& track, std::span<const Measurement> measurements,
                            const NoiseModel& noise, std::span<const RadarSite> sites);

/// Covariance-only gain oracle.
///
/// Runs the covariance recursion of the cyclic update over `allocation`
/// (ascending radar, then beam) with H held at the predicted state, skipping
/// the state correction. Needs no measurement values, so utilities can be
/// evaluated before beams are committed.
/// Posterior covariance after the covariance-only part of the same ladder
/// (linearization held at predicted.state).
StateMatrix posterior_covariance(const TrackEstimate& predicted, std::span<const BeamAllocation> allocation,
                                 const NoiseModel& noise, std::span<const RadarSite> sites);

GainLadder gain_ladder(const TrackEstimate& predicted, std::span<const BeamAllocation> allocation,
                       const NoiseModel& noise, std::span<const RadarSite> sites);

}  // namespace mfr
