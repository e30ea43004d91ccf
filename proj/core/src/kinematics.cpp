#include "mfr/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mfr/errors.hpp"

namespace mfr {

namespace {

StateMatrix kron_i2(const Eigen::Matrix2d& block) {
  StateMatrix out = StateMatrix::Zero();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      out(2 * r, 2 * c) = block(r, c);
      out(2 * r + 1, 2 * c + 1) = block(r, c);
    }
  }
  return out;
}

double checked_range(const RadarSite& site, const StateVector& state) {
  const double dx = state(0) - site.x;
  const double dy = state(1) - site.y;
  const double r = std::hypot(dx, dy);
  if (!(r > 0.0)) {
    throw DegenerateGeometryError("target co-located with radar " + std::to_string(site.id));
  }
  return r;
}

}  // namespace

MotionModel::MotionModel(double update_time, double process_noise)
    : update_time_(update_time), process_noise_(process_noise) {
  const double t = update_time;
  Eigen::Matrix2d f;
  f << 1.0, t, 0.0, 1.0;
  Eigen::Matrix2d q;
  q << t * t * t / 3.0, t * t / 2.0, t * t / 2.0, t;
  transition_ = kron_i2(f);
  process_cov_ = kron_i2(process_noise * q);
  process_chol_ = StateMatrix::Zero();
  if (process_noise > 0.0 && t > 0.0) {
    Eigen::LLT<Eigen::Matrix2d> llt(process_noise * q);
    process_chol_ = kron_i2(llt.matrixL().toDenseMatrix());
  }
}

Eigen::Matrix2d NoiseModel::covariance(std::size_t radar, std::size_t target) const {
  const double sr = range_coeff(static_cast<Eigen::Index>(radar), static_cast<Eigen::Index>(target)) *
                    sigma_range;
  Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
  r(0, 0) = sr * sr;
  r(1, 1) = sigma_azimuth * sigma_azimuth;
  return r;
}

void NoiseModel::validate(std::size_t radars, std::size_t targets) const {
  if (!(sigma_azimuth > 0.0)) throw ConfigError("noise.sigma_azimuth", "must be > 0");
  if (!(sigma_range > 0.0)) throw ConfigError("noise.sigma_range", "must be > 0");
  if (static_cast<std::size_t>(range_coeff.rows()) != radars ||
      static_cast<std::size_t>(range_coeff.cols()) != targets) {
    throw ConfigError("noise.range_coeff", "expected a " + std::to_string(radars) + "x" +
                                               std::to_string(targets) + " matrix");
  }
  for (Eigen::Index i = 0; i < range_coeff.rows(); ++i) {
    for (Eigen::Index j = 0; j < range_coeff.cols(); ++j) {
      if (!(range_coeff(i, j) >= 1.0) || !std::isfinite(range_coeff(i, j))) {
        throw ConfigError("noise.range_coeff[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                          "must be finite and >= 1");
      }
    }
  }
}

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  double w = std::remainder(a, 2.0 * pi);  // [-pi, pi]
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

Eigen::Vector2d measure_exact(const RadarSite& site, const StateVector& state) {
  const double r = checked_range(site, state);
  return {r, std::atan2(state(1) - site.y, state(0) - site.x)};
}

TargetState propagate(const TargetState& state, const MotionModel& model) {
  return {model.transition() * state.x};
}

TargetState propagate(const TargetState& state, const MotionModel& model, Substream& rng) {
  StateVector z;
  for (int i = 0; i < 4; ++i) z(i) = rng.normal();
  return {model.transition() * state.x + model.process_chol_ * z};
}

Measurement observe(const RadarSite& site, std::size_t target_id, const TargetState& state,
                    std::int64_t scan) {
  const Eigen::Vector2d h = measure_exact(site, state.x);
  return {site.id, target_id, h(0), wrap_angle(h(1)), scan};
}

Measurement observe(const RadarSite& site, std::size_t target_id, const TargetState& state,
                    const NoiseModel& noise, std::int64_t scan, Substream& rng) {
  const Eigen::Vector2d h = measure_exact(site, state.x);
  const double sr = noise.range_coeff(static_cast<Eigen::Index>(site.id),
                                      static_cast<Eigen::Index>(target_id)) *
                    noise.sigma_range;
  const double range = h(0) + sr * rng.normal();
  const double azimuth = h(1) + noise.sigma_azimuth * rng.normal();
  // Range noise can in principle push r below zero at tiny ranges; reflect.
  return {site.id, target_id, std::abs(range), wrap_angle(azimuth), scan};
}

MeasurementJacobian linearize(const RadarSite& site, const StateVector& state) {
  const double r = checked_range(site, state);
  const double dx = state(0) - site.x;
  const double dy = state(1) - site.y;
  const double r2 = r * r;
  MeasurementJacobian h = MeasurementJacobian::Zero();
  h(0, 0) = dx / r;
  h(0, 1) = dy / r;
  h(1, 0) = -dy / r2;
  h(1, 1) = dx / r2;
  return h;
}

}  // namespace mfr
