// Adaptive Kalman filter over planar robot state [x, y, heading, speed].
//
// Prediction follows a unicycle model driven by a continuous command: the
// steer value maps to a turn rate and the throttle drives speed toward
// throttle * v_max with a first-order lag. Three measurement channels are
// supported: position fix, heading, and odometry. Measurement noise (and
// optionally process noise) is rescaled per step from context tags, and the
// position covariance maps to the scalar confidence p_AKF used by fusion.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "navfuse/geometry.hpp"
#include "navfuse/types.hpp"

namespace navfuse {

using Matrix4 = Eigen::Matrix4d;
using Matrix2 = Eigen::Matrix2d;
using Vector4 = Eigen::Vector4d;

struct NavState {
  Vector4 mean = Vector4::Zero();   // x, y, heading, speed
  Matrix4 cov = Matrix4::Identity();

  double x() const { return mean(0); }
  double y() const { return mean(1); }
  double heading() const { return mean(2); }
  double speed() const { return mean(3); }
  Vec2 position() const { return {mean(0), mean(1)}; }
};

struct MotionParams {
  double v_max = 2.0;            // m/s
  double tau_v = 0.5;            // s, speed lag
  double steer_rate_gain = 1.0;  // (rad/s) per rad of steer
};

// Per-tag multipliers applied to the base noise matrices.
struct NoiseMultipliers {
  double q = 1.0;
  double r_pos = 1.0;
  double r_odo = 1.0;
  double r_heading = 1.0;
};

struct NoiseConfig {
  Matrix4 q_base = (Vector4() << 0.02, 0.02, 0.005, 0.1).finished().asDiagonal();
  Matrix2 r_pos_base = Matrix2::Identity() * 0.0225;  // (0.15 m)^2
  Matrix2 r_odo_base =
      (Eigen::Vector2d() << 1e-4, 2.5e-5).finished().asDiagonal();
  double r_heading_base = 4e-4;  // (0.02 rad)^2
  std::map<std::string, NoiseMultipliers> adaptation_table;
  double sigma_ref = 0.5;  // m, confidence reference scale
};

struct EffectiveNoise {
  Matrix4 q;
  Matrix2 r_pos;
  Matrix2 r_odo;
  double r_heading;
};

namespace akf_detail {

inline bool is_psd(const Eigen::MatrixXd& m, double tol = 1e-9) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff() >= -tol;
}

inline Matrix4 symmetrized(const Matrix4& p) {
  return 0.5 * (p + p.transpose());
}

// Shared linear update across all channels. H is M x 4.
template <int M>
NavState linear_update(const NavState& state,
                       const Eigen::Matrix<double, M, 4>& h,
                       const Eigen::Matrix<double, M, 1>& residual,
                       const Eigen::Matrix<double, M, M>& r,
                       bool wrap_heading_component = false,
                       int heading_row = -1, bool joseph_form = false) {
  if (!is_psd(r)) {
    throw std::invalid_argument("measurement noise must be symmetric PSD");
  }
  Eigen::Matrix<double, M, M> s = h * state.cov * h.transpose() + r;
  Eigen::FullPivLU<Eigen::Matrix<double, M, M>> lu(s);
  if (!lu.isInvertible()) {
    throw std::runtime_error(
        "singular innovation covariance (|S| = " + std::to_string(s.determinant()) +
        "); check measurement noise configuration");
  }
  Eigen::Matrix<double, M, 1> res = residual;
  if (wrap_heading_component && heading_row >= 0) {
    res(heading_row) = wrap_angle(res(heading_row));
  }
  Eigen::Matrix<double, 4, M> k = state.cov * h.transpose() * lu.inverse();
  NavState out;
  out.mean = state.mean + k * res;
  out.mean(2) = wrap_angle(out.mean(2));
  Matrix4 ikh = Matrix4::Identity() - k * h;
  if (joseph_form) {
    out.cov = ikh * state.cov * ikh.transpose() + k * r * k.transpose();
  } else {
    out.cov = ikh * state.cov;
  }
  out.cov = symmetrized(out.cov);
  return out;
}

}  // namespace akf_detail

// Propagates the state through one unicycle step of length dt under the given
// control. P <- F P F^T + q * dt.
inline NavState predict(const NavState& state, const ContinuousCommand& control,
                        double dt, const Matrix4& q,
                        const MotionParams& mp = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("predict: dt must be > 0");
  if (!akf_detail::is_psd(q)) {
    throw std::invalid_argument("predict: process noise must be symmetric PSD");
  }
  double theta = state.heading();
  double v = state.speed();
  double omega = control.steer * mp.steer_rate_gain;
  // Braking (negative throttle) targets zero speed; the robot does not
  // reverse.
  double v_target = std::clamp(control.throttle, 0.0, 1.0) * mp.v_max;
  double lag = dt / mp.tau_v;

  NavState out;
  out.mean(0) = state.x() + v * std::cos(theta) * dt;
  out.mean(1) = state.y() + v * std::sin(theta) * dt;
  out.mean(2) = wrap_angle(theta + omega * dt);
  out.mean(3) = v + (v_target - v) * lag;

  Matrix4 f = Matrix4::Identity();
  f(0, 2) = -v * std::sin(theta) * dt;
  f(0, 3) = std::cos(theta) * dt;
  f(1, 2) = v * std::cos(theta) * dt;
  f(1, 3) = std::sin(theta) * dt;
  f(3, 3) = 1.0 - lag;
  out.cov = akf_detail::symmetrized(f * state.cov * f.transpose() + q * dt);
  return out;
}

inline NavState update_position(const NavState& state, const Vec2& fix,
                                const Matrix2& r, bool joseph_form = false) {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  Eigen::Vector2d residual(fix.x - state.x(), fix.y - state.y());
  return akf_detail::linear_update<2>(state, h, residual, r, false, -1,
                                      joseph_form);
}

inline NavState update_heading(const NavState& state, double heading_meas,
                               double r, bool joseph_form = false) {
  Eigen::Matrix<double, 1, 4> h = Eigen::Matrix<double, 1, 4>::Zero();
  h(0, 2) = 1.0;
  Eigen::Matrix<double, 1, 1> residual;
  residual(0) = heading_meas - state.heading();
  Eigen::Matrix<double, 1, 1> rm;
  rm(0) = r;
  return akf_detail::linear_update<1>(state, h, residual, rm, true, 0,
                                      joseph_form);
}

// Odometry measures (delta_distance, delta_heading) over the last step of
// length dt. Measurement model: delta_distance = v * dt and delta_heading =
// heading - prev_heading, with prev_heading the posterior heading before the
// step. Both rows are linear in the state.
inline NavState update_odometry(const NavState& state, double delta_distance,
                                double delta_heading, const Matrix2& r,
                                double dt, double prev_heading,
                                bool joseph_form = false) {
  if (!(dt > 0.0)) throw std::invalid_argument("update_odometry: dt must be > 0");
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 3) = dt;
  h(1, 2) = 1.0;
  Eigen::Vector2d residual;
  residual(0) = delta_distance - state.speed() * dt;
  residual(1) = wrap_angle((prev_heading + delta_heading) - state.heading());
  return akf_detail::linear_update<2>(state, h, residual, r, false, -1,
                                      joseph_form);
}

// Scales the base noise matrices by the product of multipliers of every
// matching tag. Tags without a table entry have no effect.
inline EffectiveNoise adapt_noise(const NoiseConfig& base,
                                  const std::set<std::string>& tags) {
  NoiseMultipliers m;
  for (const auto& tag : tags) {
    auto it = base.adaptation_table.find(tag);
    if (it == base.adaptation_table.end()) continue;
    m.q *= it->second.q;
    m.r_pos *= it->second.r_pos;
    m.r_odo *= it->second.r_odo;
    m.r_heading *= it->second.r_heading;
  }
  return EffectiveNoise{base.q_base * m.q, base.r_pos_base * m.r_pos,
                        base.r_odo_base * m.r_odo,
                        base.r_heading_base * m.r_heading};
}

// p_AKF = 1 / (1 + trace(P_xy) / sigma_ref^2): 1 at perfect certainty,
// strictly decreasing in the position covariance trace.
inline double akf_confidence(const NavState& state, double sigma_ref) {
  double trace_xy = state.cov(0, 0) + state.cov(1, 1);
  return 1.0 / (1.0 + trace_xy / (sigma_ref * sigma_ref));
}

// Single-owner filter wrapper used by the episode runner: applies adapted
// noise each step and keeps the bookkeeping the odometry channel needs.
class AdaptiveKalmanFilter {
 public:
  AdaptiveKalmanFilter(NavState init, NoiseConfig noise, MotionParams motion)
      : state_(std::move(init)),
        noise_(std::move(noise)),
        motion_(motion),
        prev_heading_(state_.heading()) {}

  void predict_step(const ContinuousCommand& control, double dt,
                    const std::set<std::string>& tags) {
    prev_heading_ = state_.heading();
    EffectiveNoise eff = adapt_noise(noise_, tags);
    note_unknown_tags(tags);
    state_ = predict(state_, control, dt, eff.q, motion_);
  }

  void observe(const Observation& obs, double dt) {
    EffectiveNoise eff = adapt_noise(noise_, obs.context_tags);
    note_unknown_tags(obs.context_tags);
    state_ = update_position(state_, obs.position_fix, eff.r_pos);
    state_ = update_heading(state_, obs.heading, eff.r_heading);
    state_ = update_odometry(state_, obs.odo_distance, obs.odo_heading,
                             eff.r_odo, dt, prev_heading_);
  }

  const NavState& state() const { return state_; }
  double confidence() const { return akf_confidence(state_, noise_.sigma_ref); }
  const NoiseConfig& noise() const { return noise_; }

  // Tags seen without an adaptation entry; each is recorded once.
  const std::set<std::string>& ignored_tags() const { return ignored_tags_; }

 private:
  void note_unknown_tags(const std::set<std::string>& tags) {
    for (const auto& t : tags) {
      if (noise_.adaptation_table.find(t) == noise_.adaptation_table.end()) {
        ignored_tags_.insert(t);
      }
    }
  }

  NavState state_;
  NoiseConfig noise_;
  MotionParams motion_;
  double prev_heading_;
  std::set<std::string> ignored_tags_;
};

}  // namespace navfuse
