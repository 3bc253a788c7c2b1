#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "meet/ensemble_critic.hpp"
#include "meet/envs.hpp"
#include "meet/mlp.hpp"
#include "meet/replay.hpp"

namespace meet {

struct AgentConfig {
    std::size_t total_steps = 30000;
    std::size_t heads = 10;
    double mask_prob = 0.5;
    double gamma = 0.99;
    std::size_t replay_period = 1;
    std::size_t batch_size = 256;
    double actor_lr = 1e-4;
    double critic_lr = 3e-4;
    double momentum = 0.9;
    double tau = 0.005;
    double noise_scale = 0.1;  // Gaussian std as a fraction of the action range
    std::size_t capacity = 100000;
    Strategy strategy = Strategy::meet;
    std::uint64_t seed = 0;
    std::vector<std::size_t> actor_hidden{64, 64};
    std::vector<std::size_t> critic_hidden{64, 64};
    double priority_floor = kPriorityFloor;
    double per_alpha = 0.6;
    double per_beta_start = 0.4;
    double per_beta_end = 1.0;
    double per_eps = 1e-6;
};

/// Throws std::invalid_argument naming the first out-of-range field.
void validate(const AgentConfig& config);

/// Deterministic tanh policy scaled to the action bound, with optional
/// Gaussian exploration noise.
class Actor {
public:
    Actor(std::size_t state_dim, std::size_t action_dim, double action_bound,
          std::span<const std::size_t> hidden, double noise_std, std::uint64_t seed);
    Actor(MlpParameters policy, double action_bound, double noise_std);

    std::vector<double> select_action(std::span<const double> state, bool explore,
                                      std::mt19937_64& rng) const;

    /// Noise-free actions for a batch of states.
    Matrix act(const Matrix& states) const;

    const MlpParameters& policy() const { return policy_; }
    MlpParameters& policy() { return policy_; }
    double action_bound() const { return action_bound_; }
    double noise_std() const { return noise_std_; }

private:
    MlpParameters policy_;
    double action_bound_;
    double noise_std_;
};

/// Everything one learning phase computed, in batch order.
struct LearnReport {
    HeadMask mask;
    std::vector<std::size_t> slots;
    std::vector<std::uint64_t> visits;    // after this phase's increments
    std::vector<double> means;            // raw active-head means
    std::vector<double> variances;        // raw active-head variances
    std::vector<double> priorities;       // written back; empty for uniform
    std::vector<double> sample_weights;   // scaling applied to each sample's gradient
    Matrix targets;                       // batch x L, inactive columns zero
    double critic_loss = 0.0;
    double actor_objective = 0.0;
};

struct StepDiagnostics {
    bool learned = false;
    double critic_loss = 0.0;
    double mean_priority = 0.0;
    double mean_visits = 0.0;
    std::optional<LearnReport> report;
};

class Agent {
public:
    Agent(const AgentConfig& config, const Environment& env);

    /// Resets the environment, observes s0 and picks a0.
    void begin(Environment& env);

    /// One step t >= 1 of the training loop: observe, store, mask, learn when
    /// t % K == 0 and the buffer holds a full batch, choose the next action.
    StepDiagnostics train_iteration(Environment& env, std::size_t t);

    /// One learning phase under `mask`, independent of the step counter.
    LearnReport learn(const HeadMask& mask);

    const AgentConfig& config() const { return config_; }
    const Actor& actor() const { return actor_; }
    Actor& actor() { return actor_; }
    const EnsembleCritic& critic() const { return critic_; }
    EnsembleCritic& critic() { return critic_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    ReplayBuffer& buffer() { return buffer_; }
    const HeadMask& current_mask() const { return mask_; }
    std::size_t learning_phases() const { return phases_; }

    /// Stream used for mask draws and replay sampling.
    std::mt19937_64& learn_rng() { return learn_rng_; }

private:
    void start_episode(Environment& env);

    AgentConfig config_;
    Actor actor_;
    EnsembleCritic critic_;
    ReplayBuffer buffer_;
    CriticOptimizer critic_opt_;
    SgdOptimizer actor_opt_;
    std::mt19937_64 act_rng_;
    std::mt19937_64 learn_rng_;
    HeadMask mask_;
    std::vector<double> state_;
    std::vector<double> action_;
    std::uint64_t episode_ = 0;
    std::size_t phases_ = 0;
};

/// Seed for episode `index` of a stream keyed by `seed`.
std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index);

/// Mean undiscounted return of noise-free episodes.
double evaluate(const Actor& actor, Environment& env, std::size_t episodes, std::uint64_t seed);

/// Same protocol with actions drawn uniformly from the action box.
double evaluate_random(Environment& env, std::size_t episodes, std::uint64_t seed);

}  // namespace meet
