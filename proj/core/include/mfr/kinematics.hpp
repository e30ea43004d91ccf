#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "mfr/random.hpp"

namespace mfr {

/// Planar kinematic state ordered [x, y, vx, vy] in km and km/s.
using StateVector = Eigen::Vector4d;
using StateMatrix = Eigen::Matrix4d;
/// Range/azimuth Jacobian.
using MeasurementJacobian = Eigen::Matrix<double, 2, 4>;

struct TargetState {
  StateVector x = StateVector::Zero();

  bool finite() const { return x.allFinite(); }
};

/// White-noise constant-velocity motion.
///
/// With the fixed [x, y, vx, vy] ordering the transition and process
/// covariance are Kronecker products with I2:
///   F = [[1, t], [0, 1]] (x) I2
///   Q = q * [[t^3/3, t^2/2], [t^2/2, t]] (x) I2
class MotionModel {
 public:
  /// `update_time` in s, `process_noise` (sigma_w^2) in km^2/s^3.
  MotionModel(double update_time, double process_noise);

  double update_time() const { return update_time_; }
  double process_noise() const { return process_noise_; }

  const StateMatrix& transition() const { return transition_; }
  const StateMatrix& process_covariance() const { return process_cov_; }

 private:
  double update_time_;
  double process_noise_;
  StateMatrix transition_;
  StateMatrix process_cov_;
  StateMatrix process_chol_;

  friend TargetState propagate(const TargetState&, const MotionModel&, Substream&);
};

struct RadarSite {
  std::size_t id = 0;
  double x = 0.0;  // km
  double y = 0.0;  // km
};

/// Per (radar, target) measurement noise. Range std for radar i and target j
/// is range_coeff(i, j) * sigma_range; azimuth std is shared.
struct NoiseModel {
  double sigma_azimuth = 0.002;   // rad
  double sigma_range = 0.015;     // km
  Eigen::MatrixXd range_coeff;    // N x T, every entry >= 1

  /// R = diag((b_ij * sigma_r)^2, sigma_a^2).
  Eigen::Matrix2d covariance(std::size_t radar, std::size_t target) const;
  /// Throws ConfigError when an invariant fails.
  void validate(std::size_t radars, std::size_t targets) const;
};

struct Measurement {
  std::size_t radar_id = 0;
  std::size_t target_id = 0;
  double range = 0.0;    // km
  double azimuth = 0.0;  // rad, (-pi, pi]
  std::int64_t scan = 0;
};

/// Maps an angle into (-pi, pi].
double wrap_angle(double a);

/// Noise-free h(x): range and four-quadrant azimuth from `site` to `state`.
Eigen::Vector2d measure_exact(const RadarSite& site, const StateVector& state);

/// F * x, no process noise.
TargetState propagate(const TargetState& state, const MotionModel& model);
/// F * x + w with w ~ N(0, Q) drawn from `rng`.
TargetState propagate(const TargetState& state, const MotionModel& model, Substream& rng);

/// Exact measurement (zero noise). Throws DegenerateGeometryError at r = 0.
Measurement observe(const RadarSite& site, std::size_t target_id, const TargetState& state,
                    std::int64_t scan);
/// Noisy measurement with R from `noise` for (site.id, target_id).
Measurement observe(const RadarSite& site, std::size_t target_id, const TargetState& state,
                    const NoiseModel& noise, std::int64_t scan, Substream& rng);

/// dh/dx at `state`. Throws DegenerateGeometryError at r = 0.
MeasurementJacobian linearize(const RadarSite& site, const StateVector& state);

}  // namespace mfr
