#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "swarmopt/errors.hpp"

namespace swarmopt {

inline constexpr int kStateDim = 12;
inline constexpr int kInputDim = 4;

using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using InputVec = Eigen::Matrix<double, kInputDim, 1>;
using StateMat = Eigen::Matrix<double, kStateDim, kStateDim>;
using StateInputMat = Eigen::Matrix<double, kStateDim, kInputDim>;

/// Margin kept between |pitch| and pi/2; inside it the Euler-rate matrix is
/// treated as singular and a hard error is raised instead of clamping.
inline constexpr double kPitchGuard = 1e-3;

/// 12-DOF rigid-body state: world-frame position and velocity, ZYX Euler
/// attitude (roll, pitch, yaw) and body angular rates.
struct DroneState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();    // [m]
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();    // [m/s]
    Eigen::Vector3d attitude = Eigen::Vector3d::Zero();    // roll, pitch, yaw [rad]
    Eigen::Vector3d body_rates = Eigen::Vector3d::Zero();  // [rad/s]

    StateVec stacked() const;
    static DroneState from_stacked(const StateVec& x);
    bool finite() const;
};

/// Collective thrust along body z plus body torques.
struct ControlInput {
    double thrust = 0.0;                               // [N], >= 0
    Eigen::Vector3d torque = Eigen::Vector3d::Zero();  // [N m]

    InputVec stacked() const;
    static ControlInput from_stacked(const InputVec& u);
};

/// Rigid-body constants. Defaults describe a 1 kg quadrotor with diagonal
/// inertia; scenario files may override any of them.
struct DroneParams {
    double mass = 1.0;                               // [kg]
    Eigen::Vector3d inertia_diag{0.01, 0.01, 0.02};  // [kg m^2]
    double gravity = 9.81;                           // [m/s^2]

    ControlInput hover_input() const { return ControlInput{mass * gravity, Eigen::Vector3d::Zero()}; }
    void validate_or_throw() const;
};

/// Continuous-time derivative [pdot, vdot, attdot, wdot]:
///   pdot   = v
///   vdot   = (thrust/m) R(att) e_z - g e_z
///   attdot = W(att) w            (ZYX Euler-rate matrix)
///   wdot   = J^-1 (tau - w x Jw)
/// Throws AttitudeSingularityError when |pitch| enters the guard band.
StateVec deriv(const StateVec& x, const InputVec& u, const DroneParams& params);
StateVec deriv(const DroneState& x, const ControlInput& u, const DroneParams& params);

/// Analytic Jacobians of deriv() with respect to state and input.
void deriv_jacobians(const StateVec& x, const InputVec& u, const DroneParams& params,
                     StateMat& dfdx, StateInputMat& dfdu);

/// Classical RK4 step of xdot = f(x) for any vector-space state (including
/// plain doubles). The caller freezes inputs into f (zero-order hold).
template <typename X, typename F>
X rk4_step(F&& f, const X& x, double h) {
    const X k1 = f(x);
    const X k2 = f(x + (0.5 * h) * k1);
    const X k3 = f(x + (0.5 * h) * k2);
    const X k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One RK4 step of the drone dynamics with u held constant. Throws
/// NonFiniteError if any stage produces NaN/Inf and propagates
/// AttitudeSingularityError from the stages.
StateVec rk4_step(const StateVec& x, const InputVec& u, double h, const DroneParams& params);
DroneState rk4_step(const DroneState& x, const ControlInput& u, double h,
                    const DroneParams& params);

/// Jacobians of the discrete RK4 step, chained through all four stages.
void rk4_step_jacobians(const StateVec& x, const InputVec& u, double h,
                        const DroneParams& params, StateMat& dstep_dx,
                        StateInputMat& dstep_du);

/// x(0) = x0, x(k+1) = rk4_step(x(k), inputs[k]). Returns H+1 states.
/// Step errors are rethrown with the failing step index attached.
std::vector<DroneState> rollout(const DroneState& x0, std::span<const ControlInput> inputs,
                                double h, const DroneParams& params);

/// Discrete-time model used by the trajectory optimizer. Abstract so tests
/// can substitute simple linear dynamics for the quadrotor.
class DynamicsModel {
public:
    virtual ~DynamicsModel() = default;
    virtual StateVec step(const StateVec& x, const InputVec& u, double h) const = 0;
    virtual void step_jacobians(const StateVec& x, const InputVec& u, double h,
                                StateMat& dstep_dx, StateInputMat& dstep_du) const = 0;
};

/// RK4-discretized 12-DOF quadrotor.
class QuadrotorModel final : public DynamicsModel {
public:
    explicit QuadrotorModel(DroneParams params) : params_(params) {}
    const DroneParams& params() const { return params_; }

    StateVec step(const StateVec& x, const InputVec& u, double h) const override {
        return rk4_step(x, u, h, params_);
    }
    void step_jacobians(const StateVec& x, const InputVec& u, double h, StateMat& dstep_dx,
                        StateInputMat& dstep_du) const override {
        rk4_step_jacobians(x, u, h, params_, dstep_dx, dstep_du);
    }

private:
    DroneParams params_;
};

}  // namespace swarmopt
