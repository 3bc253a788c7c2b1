#include "meet/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "meet/errors.hpp"

namespace meet {

void validate(const AgentConfig& c) {
    const auto fail = [](const std::string& what) { throw std::invalid_argument("AgentConfig: " + what); };
    if (c.heads < 2) fail("heads must be >= 2");
    if (c.replay_period < 1) fail("replay period must be >= 1");
    if (c.batch_size < 1) fail("batch size must be >= 1");
    if (c.capacity < 1) fail("capacity must be >= 1");
    if (!(c.gamma >= 0.0 && c.gamma < 1.0)) fail("gamma must be in [0, 1)");
    if (!(c.tau > 0.0 && c.tau <= 1.0)) fail("tau must be in (0, 1]");
    if (!(c.mask_prob > 0.0 && c.mask_prob <= 1.0)) fail("mask probability must be in (0, 1]");
    if (!(c.actor_lr >= 0.0) || !(c.critic_lr >= 0.0)) fail("learning rates must be >= 0");
    if (!(c.momentum >= 0.0 && c.momentum < 1.0)) fail("momentum must be in [0, 1)");
    if (!(c.noise_scale >= 0.0)) fail("noise scale must be >= 0");
    if (!(c.per_alpha >= 0.0)) fail("per alpha must be >= 0");
    if (!(c.per_beta_start >= 0.0 && c.per_beta_start <= 1.0) ||
        !(c.per_beta_end >= 0.0 && c.per_beta_end <= 1.0)) {
        fail("per beta must be in [0, 1]");
    }
    if (c.critic_hidden.empty()) fail("critic needs at least one hidden layer");
}

namespace {

Matrix to_row(std::span<const double> v) {
    Matrix m(1, v.size());
    std::copy(v.begin(), v.end(), m.data().begin());
    return m;
}

MlpParameters make_policy(std::size_t state_dim, std::size_t action_dim,
                          std::span<const std::size_t> hidden, std::uint64_t seed) {
    std::vector<std::size_t> dims{state_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(action_dim);
    std::vector<Activation> acts(dims.size() - 1, Activation::relu);
    acts.back() = Activation::tanh;
    return mlp_init(dims, acts, seed);
}

}  // namespace

Actor::Actor(std::size_t state_dim, std::size_t action_dim, double action_bound,
             std::span<const std::size_t> hidden, double noise_std, std::uint64_t seed)
    : Actor(make_policy(state_dim, action_dim, hidden, seed), action_bound, noise_std) {}

Actor::Actor(MlpParameters policy, double action_bound, double noise_std)
    : policy_(std::move(policy)), action_bound_(action_bound), noise_std_(noise_std) {
    if (!(action_bound > 0.0)) throw std::invalid_argument("Actor: action bound must be > 0");
    if (!(noise_std >= 0.0)) throw std::invalid_argument("Actor: noise std must be >= 0");
}

Matrix Actor::act(const Matrix& states) const {
    Matrix a = predict(policy_, states);
    for (double& v : a.data()) v *= action_bound_;
    return a;
}

std::vector<double> Actor::select_action(std::span<const double> state, bool explore,
                                         std::mt19937_64& rng) const {
    const Matrix a = act(to_row(state));
    std::vector<double> action(a.data().begin(), a.data().end());
    if (explore && noise_std_ > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_std_);
        for (double& v : action) v += noise(rng);
    }
    for (double& v : action) v = std::clamp(v, -action_bound_, action_bound_);
    return action;
}

std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finaliser over the pair
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + index + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

const AgentConfig& checked(const AgentConfig& config) {
    validate(config);
    return config;
}

}  // namespace

Agent::Agent(const AgentConfig& config, const Environment& env)
    : config_(checked(config)),
      actor_(env.observation_dim(), env.action_dim(), env.action_bound(), config.actor_hidden,
             config.noise_scale * 2.0 * env.action_bound(), episode_seed(config.seed, 1)),
      critic_(CriticConfig{env.observation_dim(), env.action_dim(), config.heads,
                           config.critic_hidden, {}, config.gamma, episode_seed(config.seed, 2)}),
      buffer_(ReplayConfig{config.capacity, config.strategy, config.priority_floor,
                           config.per_alpha, config.per_beta_start, config.per_eps}),
      critic_opt_(config.heads, config.critic_lr, config.momentum),
      actor_opt_(config.actor_lr, config.momentum),
      act_rng_(episode_seed(config.seed, 3)),
      learn_rng_(episode_seed(config.seed, 4)) {}

void Agent::start_episode(Environment& env) {
    state_ = env.reset(episode_seed(config_.seed ^ 0xA5A5A5A5ull, episode_++));
}

void Agent::begin(Environment& env) {
    start_episode(env);
    mask_ = sample_mask(config_.heads, config_.mask_prob, learn_rng_);
    action_ = actor_.select_action(state_, /*explore=*/true, act_rng_);
}

StepDiagnostics Agent::train_iteration(Environment& env, std::size_t t) {
    if (action_.empty()) throw std::logic_error("Agent::train_iteration before begin()");

    // Observe s_t, r_t.
    StepResult result = env.step(action_);

    // Store (s_{t-1}, a_{t-1}, r_t, s_t) with N = 0 at the current max priority.
    Transition tr;
    tr.state = state_;
    tr.action = action_;
    tr.reward = result.reward;
    tr.next_state = result.observation;
    tr.done = result.done;
    tr.head_mask = mask_;
    buffer_.store(std::move(tr));

    // Fresh head mask every step.
    mask_ = sample_mask(config_.heads, config_.mask_prob, learn_rng_);

    StepDiagnostics diag;
    if (t % config_.replay_period == 0 && buffer_.size() >= config_.batch_size) {
        if (config_.strategy == Strategy::per && config_.total_steps > 0) {
            const double frac = std::min(1.0, static_cast<double>(t) /
                                                  static_cast<double>(config_.total_steps));
            buffer_.set_per_beta(config_.per_beta_start +
                                 frac * (config_.per_beta_end - config_.per_beta_start));
        }
        LearnReport report = learn(mask_);
        diag.learned = true;
        diag.critic_loss = report.critic_loss;
        diag.report = std::move(report);
    }

    if (result.done) {
        start_episode(env);
    } else {
        state_ = std::move(result.observation);
    }
    action_ = actor_.select_action(state_, /*explore=*/true, act_rng_);

    diag.mean_priority = buffer_.mean_priority();
    diag.mean_visits = static_cast<double>(buffer_.total_visits()) /
                       static_cast<double>(std::max<std::size_t>(1, buffer_.size()));
    return diag;
}

LearnReport Agent::learn(const HeadMask& mask) {
    const std::size_t k = config_.batch_size;
    const std::size_t sdim = critic_.state_dim();
    const std::size_t adim = critic_.action_dim();

    LearnReport report;
    report.mask = mask;
    const std::vector<SampledSlot> drawn = buffer_.sample_batch(k, learn_rng_);

    Matrix states(k, sdim), actions(k, adim), next_states(k, sdim);
    std::vector<double> rewards(k);
    std::vector<std::uint8_t> dones(k);
    report.slots.resize(k);
    report.visits.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const Transition& tr = buffer_.at(drawn[j].slot);
        std::copy(tr.state.begin(), tr.state.end(), states.row(j).begin());
        std::copy(tr.action.begin(), tr.action.end(), actions.row(j).begin());
        std::copy(tr.next_state.begin(), tr.next_state.end(), next_states.row(j).begin());
        rewards[j] = tr.reward;
        dones[j] = tr.done ? 1 : 0;
        report.slots[j] = drawn[j].slot;
        report.visits[j] = tr.visits;
    }

    const Matrix next_actions = actor_.act(next_states);
    report.targets = td_targets(critic_, rewards, next_states, dones, next_actions, mask);

    report.sample_weights.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        switch (config_.strategy) {
            case Strategy::meet:
                report.sample_weights[j] = 1.0 / static_cast<double>(report.visits[j]);
                break;
            case Strategy::per:
                report.sample_weights[j] = drawn[j].weight;
                break;
            case Strategy::uniform:
                report.sample_weights[j] = 1.0;
                break;
        }
    }

    // One online pass serves both the loss and the head statistics; nothing
    // has been updated yet, so the statistics see the pre-update critic.
    CriticLoss loss = weighted_critic_loss_and_grads(critic_, states, actions, report.targets,
                                                     mask, report.sample_weights);
    report.critic_loss = loss.loss;

    report.means.resize(k);
    report.variances.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const HeadStats st = head_stats(loss.q.row(j), mask);
        report.means[j] = st.mean;
        report.variances[j] = st.variance;
    }

    if (config_.strategy == Strategy::meet) {
        const NormalizedStats norm = normalize_batch_stats(report.means, report.variances);
        report.priorities.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            report.priorities[j] = meet_priority(norm.means[j], norm.variances[j],
                                                 report.visits[j], config_.priority_floor);
        }
        buffer_.update_priorities(report.slots, report.priorities);
    }

    if (config_.strategy == Strategy::per) {
        report.priorities.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            report.priorities[j] = per_priority(loss.td_error[j], config_.per_alpha, config_.per_eps);
        }
        buffer_.update_priorities(report.slots, report.priorities);
    }

    // Critic: theta <- theta + eta * Delta with Delta = -grad J.
    CriticParameters delta = loss.gradient.zeros_like();
    add_scaled(delta, loss.gradient, -1.0);
    critic_opt_.step(critic_.online(), delta);

    // Actor: ascend the mean active-head value of (s_j, pi(s_j)).
    auto [raw, tape] = forward(actor_.policy(), states);
    Matrix policy_actions = raw;
    for (double& v : policy_actions.data()) v *= actor_.action_bound();
    const ActionValueGradient avg = action_value_gradient(critic_, states, policy_actions, mask);
    Matrix d_raw = avg.action_gradient;
    for (double& v : d_raw.data()) v *= actor_.action_bound();
    const Gradients actor_grad = backward(actor_.policy(), tape, d_raw);
    actor_opt_.step(actor_.policy(), actor_grad.params);
    report.actor_objective = avg.objective;

    critic_.update_target(config_.tau);
    ++phases_;
    return report;
}

double evaluate(const Actor& actor, Environment& env, std::size_t episodes, std::uint64_t seed) {
    if (episodes == 0) throw std::invalid_argument("evaluate: need at least one episode");
    std::mt19937_64 no_noise;  // never drawn from when explore is false
    double total = 0.0;
    for (std::size_t e = 0; e < episodes; ++e) {
        std::vector<double> obs = env.reset(episode_seed(seed, e));
        bool done = false;
        while (!done) {
            StepResult r = env.step(actor.select_action(obs, /*explore=*/false, no_noise));
            total += r.reward;
            done = r.done;
            obs = std::move(r.observation);
        }
    }
    return total / static_cast<double>(episodes);
}

double evaluate_random(Environment& env, std::size_t episodes, std::uint64_t seed) {
    if (episodes == 0) throw std::invalid_argument("evaluate_random: need at least one episode");
    std::mt19937_64 rng(episode_seed(seed, 0xBADC0FFEEull));
    std::uniform_real_distribution<double> pick(-env.action_bound(), env.action_bound());
    std::vector<double> action(env.action_dim());
    double total = 0.0;
    for (std::size_t e = 0; e < episodes; ++e) {
        env.reset(episode_seed(seed, e));
        bool done = false;
        while (!done) {
            for (double& a : action) a = pick(rng);
            const StepResult r = env.step(action);
            total += r.reward;
            done = r.done;
        }
    }
    return total / static_cast<double>(episodes);
}

}  // namespace meet
