#include "meet/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "meet/errors.hpp"

namespace meet {

double wrap_angle(double theta) {
    constexpr double pi = std::numbers::pi;
    return std::fmod(std::fmod(theta + pi, 2.0 * pi) + 2.0 * pi, 2.0 * pi) - pi;
}

PendulumEnv::PendulumEnv(double dt, std::size_t horizon) : dt_(dt), horizon_(horizon) {
    if (!(dt > 0.0) || horizon == 0) throw std::invalid_argument("PendulumEnv: bad dt or horizon");
}

std::vector<double> PendulumEnv::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> speed(-1.0, 1.0);
    theta_ = angle(rng);
    theta_dot_ = speed(rng);
    steps_ = 0;
    started_ = true;
    return observation();
}

StepResult PendulumEnv::step(std::span<const double> action) {
    if (!started_) throw EpisodeFinishedError("PendulumEnv: step before reset");
    if (steps_ >= horizon_) throw EpisodeFinishedError("PendulumEnv: episode already finished");
    if (action.size() != 1) throw std::invalid_argument("PendulumEnv: action must have 1 component");
    const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);

    const double th = wrap_angle(theta_);
    const double cost = th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

    const double accel = 3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                         3.0 / (kMass * kLength * kLength) * u;
    theta_dot_ = std::clamp(theta_dot_ + accel * dt_, -kMaxSpeed, kMaxSpeed);
    theta_ += theta_dot_ * dt_;
    ++steps_;
    return {observation(), -cost, steps_ >= horizon_};
}

std::unique_ptr<Environment> PendulumEnv::clone() const {
    return std::make_unique<PendulumEnv>(*this);
}

void PendulumEnv::set_state(double theta, double theta_dot) {
    theta_ = theta;
    theta_dot_ = theta_dot;
    steps_ = 0;
    started_ = true;
}

double PendulumEnv::energy() const {
    const double inertia = kMass * kLength * kLength / 3.0;
    return 0.5 * inertia * theta_dot_ * theta_dot_ +
           kMass * kGravity * 0.5 * kLength * std::cos(theta_);
}

std::vector<double> PendulumEnv::observation() const {
    return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

std::vector<double> PointMassEnv::reset(std::uint64_t seed) {
    // Start on the perimeter of [-1, 1]^2, at rest.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> along(0.0, 8.0);
    const double s = along(rng);
    const int side = std::min(static_cast<int>(s / 2.0), 3);
    const double t = s - 2.0 * side - 1.0;
    switch (side) {
        case 0: px_ = t; py_ = -1.0; break;
        case 1: px_ = 1.0; py_ = t; break;
        case 2: px_ = -t; py_ = 1.0; break;
        default: px_ = -1.0; py_ = -t; break;
    }
    vx_ = 0.0;
    vy_ = 0.0;
    steps_ = 0;
    started_ = true;
    return observation();
}

StepResult PointMassEnv::step(std::span<const double> action) {
    if (!started_) throw EpisodeFinishedError("PointMassEnv: step before reset");
    if (steps_ >= kHorizon) throw EpisodeFinishedError("PointMassEnv: episode already finished");
    if (action.size() != 2) throw std::invalid_argument("PointMassEnv: action must have 2 components");
    const double ax = std::clamp(action[0], -1.0, 1.0);
    const double ay = std::clamp(action[1], -1.0, 1.0);
    vx_ = kDamping * vx_ + ax * kDt;
    vy_ = kDamping * vy_ + ay * kDt;
    px_ = std::clamp(px_ + vx_ * kDt, -1.0, 1.0);
    py_ = std::clamp(py_ + vy_ * kDt, -1.0, 1.0);
    ++steps_;
    const double reward = -std::hypot(px_, py_) - 0.01 * (ax * ax + ay * ay);
    return {observation(), reward, steps_ >= kHorizon};
}

std::unique_ptr<Environment> PointMassEnv::clone() const {
    return std::make_unique<PointMassEnv>(*this);
}

void PointMassEnv::set_state(double px, double py, double vx, double vy) {
    px_ = std::clamp(px, -1.0, 1.0);
    py_ = std::clamp(py, -1.0, 1.0);
    vx_ = vx;
    vy_ = vy;
    steps_ = 0;
    started_ = true;
}

std::vector<double> PointMassEnv::observation() const { return {px_, py_, vx_, vy_}; }

std::unique_ptr<Environment> make_env(std::string_view name) {
    if (name == "pendulum") return std::make_unique<PendulumEnv>();
    if (name == "pointmass") return std::make_unique<PointMassEnv>();
    throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

}  // namespace meet
