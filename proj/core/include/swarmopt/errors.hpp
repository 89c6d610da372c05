#pragma once

#include <stdexcept>
#include <string>

namespace swarmopt {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or block dimensions do not match the expected shape.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// NaN or Inf encountered where a finite value is required.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// |pitch| reached the guard band around pi/2 where the ZYX Euler kinematics
/// matrix is singular. `step()` is the rollout step that failed, -1 when the
/// failure is not tied to a rollout.
class AttitudeSingularityError : public Error {
public:
    AttitudeSingularityError(double pitch, int step = -1)
        : Error("attitude singularity: |pitch| = " + std::to_string(pitch) +
                " rad too close to pi/2" +
                (step >= 0 ? " at rollout step " + std::to_string(step) : "")),
          pitch_(pitch),
          step_(step) {}

    double pitch() const { return pitch_; }
    int step() const { return step_; }

private:
    double pitch_;
    int step_;
};

/// A message was dropped before anything had ever been delivered on that
/// directed edge, so no stale payload exists to fall back on.
class NoPriorMessageError : public Error {
public:
    NoPriorMessageError(int round, int sender, int receiver)
        : Error("message " + std::to_string(sender) + " -> " + std::to_string(receiver) +
                " dropped in round " + std::to_string(round) +
                " with no prior delivery to fall back on"),
          round_(round),
          sender_(sender),
          receiver_(receiver) {}

    int round() const { return round_; }
    int sender() const { return sender_; }
    int receiver() const { return receiver_; }

private:
    int round_;
    int sender_;
    int receiver_;
};

/// Scenario file problems. For Kind::Validation, `field()` names the offending
/// config entry; for Kind::Parse it is empty.
class ScenarioError : public Error {
public:
    enum class Kind { Parse, Validation };

    ScenarioError(Kind kind, std::string field, const std::string& detail)
        : Error(kind == Kind::Parse ? "scenario parse error: " + detail
                                    : "scenario validation error [" + field + "]: " + detail),
          kind_(kind),
          field_(std::move(field)) {}

    Kind kind() const { return kind_; }
    const std::string& field() const { return field_; }

private:
    Kind kind_;
    std::string field_;
};

}  // namespace swarmopt
