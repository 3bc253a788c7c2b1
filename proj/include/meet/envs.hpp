#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meet {

struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
};

/// Fixed-horizon continuous-control task with a symmetric box action space.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::string_view name() const = 0;
    virtual std::size_t observation_dim() const = 0;
    virtual std::size_t action_dim() const = 0;
    virtual double action_bound() const = 0;
    virtual std::size_t horizon() const = 0;

    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    /// Out-of-bounds actions are clipped. Throws EpisodeFinishedError after done.
    virtual StepResult step(std::span<const double> action) = 0;

    virtual std::unique_ptr<Environment> clone() const = 0;
};

/// Torque-limited swing-up; angle 0 is upright.
class PendulumEnv final : public Environment {
public:
    static constexpr double kGravity = 10.0;
    static constexpr double kMass = 1.0;
    static constexpr double kLength = 1.0;
    static constexpr double kMaxSpeed = 8.0;
    static constexpr double kMaxTorque = 2.0;

    explicit PendulumEnv(double dt = 0.05, std::size_t horizon = 200);

    std::string_view name() const override { return "pendulum"; }
    std::size_t observation_dim() const override { return 3; }
    std::size_t action_dim() const override { return 1; }
    double action_bound() const override { return kMaxTorque; }
    std::size_t horizon() const override { return horizon_; }

    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;
    std::unique_ptr<Environment> clone() const override;

    /// Overrides the physical state (testing and scripted starts).
    void set_state(double theta, double theta_dot);
    double theta() const { return theta_; }
    double theta_dot() const { return theta_dot_; }
    double dt() const { return dt_; }

    /// Rotational kinetic plus gravitational potential energy of the rod.
    double energy() const;

    std::vector<double> observation() const;

private:
    double dt_;
    std::size_t horizon_;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    std::size_t steps_ = 0;
    bool started_ = false;
};

/// Damped 2-D point mass pushed toward the origin.
class PointMassEnv final : public Environment {
public:
    static constexpr double kDt = 0.05;
    static constexpr double kDamping = 0.95;
    static constexpr std::size_t kHorizon = 150;

    std::string_view name() const override { return "pointmass"; }
    std::size_t observation_dim() const override { return 4; }
    std::size_t action_dim() const override { return 2; }
    double action_bound() const override { return 1.0; }
    std::size_t horizon() const override { return kHorizon; }

    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;
    std::unique_ptr<Environment> clone() const override;

    void set_state(double px, double py, double vx, double vy);
    std::vector<double> observation() const;

private:
    double px_ = 0.0, py_ = 0.0, vx_ = 0.0, vy_ = 0.0;
    std::size_t steps_ = 0;
    bool started_ = false;
};

/// "pendulum" or "pointmass"; throws std::invalid_argument otherwise.
std::unique_ptr<Environment> make_env(std::string_view name);

/// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

}  // namespace meet
