#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "meet/matrix.hpp"
#include "meet/mlp.hpp"

namespace meet {

/// Per-head Bernoulli participation bits for one training step.
struct HeadMask {
    std::vector<std::uint8_t> bits;
    double probability = 1.0;

    std::size_t size() const { return bits.size(); }
    bool active(std::size_t head) const { return bits[head] != 0; }
    std::size_t active_count() const;

    static HeadMask all(std::size_t heads);
};

/// Draws each bit from Bernoulli(probability), redrawing the whole mask until
/// at least one head is active.
HeadMask sample_mask(std::size_t heads, double probability, std::mt19937_64& rng);

struct HeadStats {
    double mean = 0.0;
    double variance = 0.0;  // population variance over active heads
};

HeadStats head_stats(std::span<const double> q_values, const HeadMask& mask);

/// Shared trunk plus L scalar heads. Used for online, target and gradient
/// copies alike.
struct CriticParameters {
    MlpParameters trunk;
    std::vector<MlpParameters> heads;

    CriticParameters zeros_like() const;
    bool same_architecture(const CriticParameters& other) const;
    void require_finite(std::string_view what) const;
};

void apply_gradients(CriticParameters& params, const CriticParameters& delta, double learning_rate);
void polyak_update(CriticParameters& target, const CriticParameters& online, double tau);
void add_scaled(CriticParameters& acc, const CriticParameters& other, double scale);
double squared_norm(const CriticParameters& params);
double max_abs_difference(const CriticParameters& a, const CriticParameters& b);

struct CriticConfig {
    std::size_t state_dim = 0;
    std::size_t action_dim = 0;
    std::size_t heads = 10;
    std::vector<std::size_t> trunk_hidden{64, 64};
    std::vector<std::size_t> head_hidden{};
    double gamma = 0.99;
    std::uint64_t seed = 0;
};

class EnsembleCritic {
public:
    explicit EnsembleCritic(const CriticConfig& config);

    /// Wraps explicit parameters; the target starts as an exact copy.
    EnsembleCritic(CriticParameters online, std::size_t state_dim, double gamma);

    std::size_t heads() const { return online_.heads.size(); }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t action_dim() const { return online_.trunk.input_dim() - state_dim_; }
    double gamma() const { return gamma_; }

    const CriticParameters& online() const { return online_; }
    CriticParameters& online() { return online_; }
    const CriticParameters& target() const { return target_; }
    CriticParameters& target() { return target_; }

    std::vector<double> q_all_heads(std::span<const double> state, std::span<const double> action,
                                    bool use_target) const;

    /// batch x L matrix of head values.
    Matrix q_batch(const Matrix& states, const Matrix& actions, bool use_target) const;

    void update_target(double tau) { polyak_update(target_, online_, tau); }

private:
    CriticParameters online_;
    CriticParameters target_;
    std::size_t state_dim_;
    double gamma_;
};

/// batch x L targets r + gamma * Q_target,m(s', a'); terminal rows use r.
/// Columns of inactive heads are left at zero.
Matrix td_targets(const EnsembleCritic& critic, std::span<const double> rewards,
                  const Matrix& next_states, std::span<const std::uint8_t> dones,
                  const Matrix& next_actions, const HeadMask& mask);

struct CriticLoss {
    double loss = 0.0;            // (1/M)(1/k) sum_m sum_j (Q_m - y_m)^2
    CriticParameters gradient;    // gradient of the per-sample scaled loss
    Matrix q;                     // online predictions, batch x L
    std::vector<double> td_error; // per sample, mean over active heads of y_m - Q_m
};

/// Loss and gradient where sample j's contribution is multiplied by
/// 1 / visit_counts[j] before accumulation.
CriticLoss critic_loss_and_grads(const EnsembleCritic& critic, const Matrix& states,
                                 const Matrix& actions, const Matrix& targets,
                                 const HeadMask& mask,
                                 std::span<const std::uint64_t> visit_counts);

/// Same loss with an arbitrary non-negative per-sample weight.
CriticLoss weighted_critic_loss_and_grads(const EnsembleCritic& critic, const Matrix& states,
                                          const Matrix& actions, const Matrix& targets,
                                          const HeadMask& mask,
                                          std::span<const double> sample_weights);

struct ActionValueGradient {
    double objective = 0.0;  // mean over batch and active heads of Q_m(s, a)
    Matrix action_gradient;  // d objective / d action, batch x action_dim
};

ActionValueGradient action_value_gradient(const EnsembleCritic& critic, const Matrix& states,
                                          const Matrix& actions, const HeadMask& mask);

/// SGD state for every network inside a critic.
class CriticOptimizer {
public:
    CriticOptimizer(std::size_t heads, double learning_rate, double momentum);
    void step(CriticParameters& params, const CriticParameters& delta);

private:
    SgdOptimizer trunk_;
    std::vector<SgdOptimizer> heads_;
};

}  // namespace meet
