#include "mfr/filtering.hpp"

#include <algorithm>
#include <string>

#include "mfr/errors.hpp"

namespace mfr {

namespace {

const RadarSite& site_for(std::span<const RadarSite> sites, std::size_t radar_id) {
  if (radar_id >= sites.size() || sites[radar_id].id != radar_id) {
    auto it = std::find_if(sites.begin(), sites.end(),
                           [&](const RadarSite& s) { return s.id == radar_id; });
    if (it == sites.end()) {
      throw ContractError("unknown radar id " + std::to_string(radar_id));
    }
    return *it;
  }
  return sites[radar_id];
}

// One covariance increment P <- (I - K H) P. Returns the gain matrix.
Eigen::Matrix<double, 4, 2> covariance_step(StateMatrix& p, const MeasurementJacobian& h,
                                            const Eigen::Matrix2d& r) {
  const Eigen::Matrix<double, 4, 2> pht = p * h.transpose();
  const Eigen::Matrix2d s = h * pht + r;
  Eigen::LLT<Eigen::Matrix2d> llt(s);
  if (llt.info() != Eigen::Success || !s.allFinite()) {
    throw NumericalError("innovation covariance is singular");
  }
  const Eigen::Matrix<double, 4, 2> k = llt.solve(pht.transpose()).transpose();
  p = symmetrize((StateMatrix::Identity() - k * h) * p);
  return k;
}

}  // namespace

StateMatrix symmetrize(const StateMatrix& p) { return 0.5 * (p + p.transpose()); }

bool is_positive_definite(const StateMatrix& p) {
  if (!p.allFinite() || p != p.transpose()) return false;
  Eigen::LLT<StateMatrix> llt(p);
  return llt.info() == Eigen::Success;
}

void require_covariance(const StateMatrix& p, CovarianceCheck check, const char* where) {
  if (!p.allFinite()) throw CovarianceError(std::string(where) + ": covariance is not finite");
  if (check == CovarianceCheck::positive_definite) {
    Eigen::LLT<StateMatrix> llt(symmetrize(p));
    if (llt.info() != Eigen::Success) {
      throw CovarianceError(std::string(where) + ": covariance is not positive definite");
    }
    return;
  }
  Eigen::SelfAdjointEigenSolver<StateMatrix> eig(symmetrize(p), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw CovarianceError(std::string(where) + ": covariance is not positive semidefinite");
  }
}

TrackEstimate predict(const TrackEstimate& track, const MotionModel& model, CovarianceCheck check) {
  require_covariance(track.cov, check, "predict");
  const StateMatrix& f = model.transition();
  TrackEstimate out = track;
  out.state = f * track.state;
  out.cov = symmetrize(f * track.cov * f.transpose() + model.process_covariance());
  return out;
}

TrackEstimate update_cyclic(const TrackEstimate& track, std::span<const Measurement> measurements,
                            const NoiseModel& noise, std::span<const RadarSite> sites) {
  TrackEstimate out = track;
  for (const Measurement& z : measurements) {
    if (z.scan != track.scan) {
      throw ContractError("measurement scan " + std::to_string(z.scan) + " != track scan " +
                          std::to_string(track.scan));
    }
    if (z.target_id != track.target_id) {
      throw ContractError("measurement for target " + std::to_string(z.target_id) +
                          " applied to track " + std::to_string(track.target_id));
    }
    const RadarSite& site = site_for(sites, z.radar_id);
    const MeasurementJacobian h = linearize(site, out.state);
    const Eigen::Vector2d predicted = measure_exact(site, out.state);
    Eigen::Vector2d innovation(z.range - predicted(0), wrap_angle(z.azimuth - predicted(1)));
    const Eigen::Matrix<double, 4, 2> k =
        covariance_step(out.cov, h, noise.covariance(z.radar_id, z.target_id));
    out.state += k * innovation;
  }
  return out;
}

GainLadder gain_ladder(const TrackEstimate& predicted, std::span<const BeamAllocation> allocation,
                       const NoiseModel& noise, std::span<const RadarSite> sites) {
  GainLadder ladder;
  StateMatrix p = predicted.cov;
  double trace_before = p.trace();
  for (const BeamAllocation& a : allocation) {
    if (a.beams <= 0) continue;
    const RadarSite& site = site_for(sites, a.radar_id);
    const MeasurementJacobian h = linearize(site, predicted.state);
    const Eigen::Matrix2d r = noise.covariance(a.radar_id, predicted.target_id);
    for (int b = 0; b < a.beams; ++b) {
      covariance_step(p, h, r);
      const double trace_after = p.trace();
      ladder.increments.push_back(trace_before - trace_after);
      trace_before = trace_after;
    }
  }
  for (double g : ladder.increments) ladder.total += g;
  return ladder;
}

StateMatrix posterior_covariance(const TrackEstimate& predicted, std::span<const BeamAllocation> allocation,
                                 const NoiseModel& noise, std::span<const RadarSite> sites) {
  StateMatrix p = predicted.cov;
  for (const BeamAllocation& a : allocation) {
    if (a.beams <= 0) continue;
    const MeasurementJacobian h = linearize(site_for(sites, a.radar_id), predicted.state);
    const Eigen::Matrix2d r = noise.covariance(a.radar_id, predicted.target_id);
    for (int b = 0; b < a.beams; ++b) covariance_step(p, h, r);
  }
  return p;
}

}  // namespace mfr
