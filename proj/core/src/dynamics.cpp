#include "swarmopt/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace swarmopt {

namespace {

void check_pitch(double pitch) {
    if (!std::isfinite(pitch)) {
        throw NonFiniteError("deriv: pitch is not finite");
    }
    if (std::abs(pitch) >= std::numbers::pi / 2.0 - kPitchGuard) {
        throw AttitudeSingularityError(pitch);
    }
}

/// Third column of R = Rz(yaw) Ry(pitch) Rx(roll): the body-z (thrust) axis
/// expressed in the world frame.
Eigen::Vector3d thrust_axis(double roll, double pitch, double yaw) {
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    return {cy * sp * cr + sy * sr, sy * sp * cr - cy * sr, cp * cr};
}

}  // namespace

StateVec DroneState::stacked() const {
    StateVec x;
    x << position, velocity, attitude, body_rates;
    return x;
}

DroneState DroneState::from_stacked(const StateVec& x) {
    DroneState s;
    s.position = x.segment<3>(0);
    s.velocity = x.segment<3>(3);
    s.attitude = x.segment<3>(6);
    s.body_rates = x.segment<3>(9);
    return s;
}

bool DroneState::finite() const { return stacked().allFinite(); }

InputVec ControlInput::stacked() const {
    InputVec u;
    u << thrust, torque;
    return u;
}

ControlInput ControlInput::from_stacked(const InputVec& u) {
    return ControlInput{u(0), u.segment<3>(1)};
}

void DroneParams::validate_or_throw() const {
    if (!(mass > 0.0)) throw Error("DroneParams: mass must be > 0");
    if (!(inertia_diag.array() > 0.0).all()) throw Error("DroneParams: inertia entries must be > 0");
    if (!std::isfinite(gravity)) throw Error("DroneParams: gravity must be finite");
}

StateVec deriv(const StateVec& x, const InputVec& u, const DroneParams& params) {
    const double roll = x(6), pitch = x(7), yaw = x(8);
    check_pitch(pitch);

    const Eigen::Vector3d w = x.segment<3>(9);
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch);
    const double tp = std::tan(pitch);

    StateVec dx;
    dx.segment<3>(0) = x.segment<3>(3);
    dx.segment<3>(3) = (u(0) / params.mass) * thrust_axis(roll, pitch, yaw) -
                       Eigen::Vector3d(0.0, 0.0, params.gravity);
    // ZYX Euler-rate matrix W(att) * w.
    dx(6) = w(0) + sr * tp * w(1) + cr * tp * w(2);
    dx(7) = cr * w(1) - sr * w(2);
    dx(8) = (sr * w(1) + cr * w(2)) / cp;

    const Eigen::Vector3d jw = params.inertia_diag.cwiseProduct(w);
    dx.segment<3>(9) =
        (u.segment<3>(1) - w.cross(jw)).cwiseQuotient(params.inertia_diag);
    return dx;
}

StateVec deriv(const DroneState& x, const ControlInput& u, const DroneParams& params) {
    return deriv(x.stacked(), u.stacked(), params);
}

void deriv_jacobians(const StateVec& x, const InputVec& u, const DroneParams& params,
                     StateMat& dfdx, StateInputMat& dfdu) {
    const double roll = x(6), pitch = x(7), yaw = x(8);
    check_pitch(pitch);

    const Eigen::Vector3d w = x.segment<3>(9);
    const Eigen::Vector3d j = params.inertia_diag;
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const double tp = sp / cp;
    const double sec2p = 1.0 / (cp * cp);

    dfdx.setZero();
    dfdu.setZero();

    // pdot = v
    dfdx.block<3, 3>(0, 3).setIdentity();

    // vdot = (F/m) * axis(att) - g e_z
    const double fm = u(0) / params.mass;
    Eigen::Matrix3d daxis;  // columns: d(axis)/d(roll, pitch, yaw)
    daxis.col(0) << -cy * sp * sr + sy * cr, -sy * sp * sr - cy * cr, -cp * sr;
    daxis.col(1) << cy * cp * cr, sy * cp * cr, -sp * cr;
    daxis.col(2) << -sy * sp * cr + cy * sr, cy * sp * cr + sy * sr, 0.0;
    dfdx.block<3, 3>(3, 6) = fm * daxis;
    dfdu.block<3, 1>(3, 0) = thrust_axis(roll, pitch, yaw) / params.mass;

    // attdot = W(att) w
    Eigen::Matrix3d euler_rate;
    euler_rate << 1.0, sr * tp, cr * tp,
                  0.0, cr, -sr,
                  0.0, sr / cp, cr / cp;
    dfdx.block<3, 3>(6, 9) = euler_rate;
    // d(attdot)/d(roll)
    dfdx(6, 6) = cr * tp * w(1) - sr * tp * w(2);
    dfdx(7, 6) = -sr * w(1) - cr * w(2);
    dfdx(8, 6) = (cr * w(1) - sr * w(2)) / cp;
    // d(attdot)/d(pitch)
    dfdx(6, 7) = (sr * w(1) + cr * w(2)) * sec2p;
    dfdx(8, 7) = (sr * w(1) + cr * w(2)) * tp / cp;

    // wdot = J^-1 (tau - w x Jw); d(w x Jw)/dw = skew(w) J - skew(Jw)
    const Eigen::Vector3d jw = j.cwiseProduct(w);
    Eigen::Matrix3d skew_w, skew_jw;
    skew_w << 0, -w(2), w(1), w(2), 0, -w(0), -w(1), w(0), 0;
    skew_jw << 0, -jw(2), jw(1), jw(2), 0, -jw(0), -jw(1), jw(0), 0;
    const Eigen::Matrix3d dcross = skew_w * j.asDiagonal() - skew_jw;
    dfdx.block<3, 3>(9, 9) = j.cwiseInverse().asDiagonal() * (-dcross);
    dfdu.block<3, 3>(9, 1) = j.cwiseInverse().asDiagonal();
}

StateVec rk4_step(const StateVec& x, const InputVec& u, double h, const DroneParams& params) {
    const StateVec next =
        rk4_step([&](const StateVec& xs) { return deriv(xs, u, params); }, x, h);
    if (!next.allFinite()) {
        throw NonFiniteError("rk4_step produced a non-finite state");
    }
    return next;
}

DroneState rk4_step(const DroneState& x, const ControlInput& u, double h,
                    const DroneParams& params) {
    return DroneState::from_stacked(rk4_step(x.stacked(), u.stacked(), h, params));
}

void rk4_step_jacobians(const StateVec& x, const InputVec& u, double h,
                        const DroneParams& params, StateMat& dstep_dx,
                        StateInputMat& dstep_du) {
    const StateVec k1 = deriv(x, u, params);
    const StateVec x2 = x + (0.5 * h) * k1;
    const StateVec k2 = deriv(x2, u, params);
    const StateVec x3 = x + (0.5 * h) * k2;
    const StateVec k3 = deriv(x3, u, params);
    const StateVec x4 = x + h * k3;

    StateMat a1, a2, a3, a4;
    StateInputMat b1, b2, b3, b4;
    deriv_jacobians(x, u, params, a1, b1);
    deriv_jacobians(x2, u, params, a2, b2);
    deriv_jacobians(x3, u, params, a3, b3);
    deriv_jacobians(x4, u, params, a4, b4);

    const StateMat id = StateMat::Identity();
    const StateMat d1 = a1;
    const StateMat d2 = a2 * (id + (0.5 * h) * d1);
    const StateMat d3 = a3 * (id + (0.5 * h) * d2);
    const StateMat d4 = a4 * (id + h * d3);
    dstep_dx = id + (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);

    const StateInputMat e1 = b1;
    const StateInputMat e2 = b2 + (0.5 * h) * (a2 * e1);
    const StateInputMat e3 = b3 + (0.5 * h) * (a3 * e2);
    const StateInputMat e4 = b4 + h * (a4 * e3);
    dstep_du = (h / 6.0) * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
}

std::vector<DroneState> rollout(const DroneState& x0, std::span<const ControlInput> inputs,
                                double h, const DroneParams& params) {
    std::vector<DroneState> states;
    states.reserve(inputs.size() + 1);
    states.push_back(x0);
    for (size_t k = 0; k < inputs.size(); ++k) {
        try {
            states.push_back(rk4_step(states.back(), inputs[k], h, params));
        } catch (const AttitudeSingularityError& e) {
            throw AttitudeSingularityError(e.pitch(), static_cast<int>(k));
        } catch (const NonFiniteError&) {
            throw NonFiniteError("rollout produced a non-finite state at step " +
                                 std::to_string(k));
        }
    }
    return states;
}

}  // namespace swarmopt
