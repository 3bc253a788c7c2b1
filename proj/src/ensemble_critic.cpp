#include "meet/ensemble_critic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "meet/errors.hpp"

namespace meet {

std::size_t HeadMask::active_count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

HeadMask HeadMask::all(std::size_t heads) {
    return HeadMask{std::vector<std::uint8_t>(heads, 1), 1.0};
}

HeadMask sample_mask(std::size_t heads, double probability, std::mt19937_64& rng) {
    if (heads < 2) throw std::invalid_argument("sample_mask: need at least 2 heads");
    if (!(probability > 0.0 && probability <= 1.0)) {
        throw std::invalid_argument("sample_mask: probability must be in (0, 1]");
    }
    HeadMask mask{std::vector<std::uint8_t>(heads, 0), probability};
    std::bernoulli_distribution coin(probability);
    do {
        for (auto& b : mask.bits) b = coin(rng) ? 1 : 0;
    } while (mask.active_count() == 0);
    return mask;
}

HeadStats head_stats(std::span<const double> q_values, const HeadMask& mask) {
    if (q_values.size() != mask.size()) throw ShapeError("head_stats: mask size differs from heads");
    const std::size_t m = mask.active_count();
    if (m == 0) throw InvalidMaskError("head_stats: no active heads");
    double sum = 0.0;
    for (std::size_t l = 0; l < q_values.size(); ++l) {
        if (mask.active(l)) sum += q_values[l];
    }
    const double mean = sum / static_cast<double>(m);
    double sq = 0.0;
    for (std::size_t l = 0; l < q_values.size(); ++l) {
        if (mask.active(l)) sq += (q_values[l] - mean) * (q_values[l] - mean);
    }
    return {mean, sq / static_cast<double>(m)};
}

CriticParameters CriticParameters::zeros_like() const {
    CriticParameters z{trunk.zeros_like(), {}};
    z.heads.reserve(heads.size());
    for (const auto& h : heads) z.heads.push_back(h.zeros_like());
    return z;
}

bool CriticParameters::same_architecture(const CriticParameters& other) const {
    if (!trunk.same_architecture(other.trunk) || heads.size() != other.heads.size()) return false;
    for (std::size_t l = 0; l < heads.size(); ++l) {
        if (!heads[l].same_architecture(other.heads[l])) return false;
    }
    return true;
}

void CriticParameters::require_finite(std::string_view what) const {
    trunk.require_finite(what);
    for (const auto& h : heads) h.require_finite(what);
}

namespace {

void require_same(const CriticParameters& a, const CriticParameters& b) {
    if (!a.same_architecture(b)) throw ShapeError("critic architectures differ");
}

}  // namespace

void apply_gradients(CriticParameters& params, const CriticParameters& delta, double learning_rate) {
    require_same(params, delta);
    apply_gradients(params.trunk, delta.trunk, learning_rate);
    for (std::size_t l = 0; l < params.heads.size(); ++l) {
        apply_gradients(params.heads[l], delta.heads[l], learning_rate);
    }
}

void polyak_update(CriticParameters& target, const CriticParameters& online, double tau) {
    require_same(target, online);
    polyak_update(target.trunk, online.trunk, tau);
    for (std::size_t l = 0; l < target.heads.size(); ++l) {
        polyak_update(target.heads[l], online.heads[l], tau);
    }
}

void add_scaled(CriticParameters& acc, const CriticParameters& other, double scale) {
    require_same(acc, other);
    add_scaled(acc.trunk, other.trunk, scale);
    for (std::size_t l = 0; l < acc.heads.size(); ++l) add_scaled(acc.heads[l], other.heads[l], scale);
}

double squared_norm(const CriticParameters& params) {
    double s = squared_norm(params.trunk);
    for (const auto& h : params.heads) s += squared_norm(h);
    return s;
}

double max_abs_difference(const CriticParameters& a, const CriticParameters& b) {
    require_same(a, b);
    double m = max_abs_difference(a.trunk, b.trunk);
    for (std::size_t l = 0; l < a.heads.size(); ++l) {
        m = std::max(m, max_abs_difference(a.heads[l], b.heads[l]));
    }
    return m;
}

EnsembleCritic::EnsembleCritic(const CriticConfig& config)
    : state_dim_(config.state_dim), gamma_(config.gamma) {
    if (config.heads < 2) throw std::invalid_argument("EnsembleCritic: need at least 2 heads");
    if (config.state_dim == 0 || config.action_dim == 0) {
        throw std::invalid_argument("EnsembleCritic: state and action dims must be positive");
    }
    if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
        throw std::invalid_argument("EnsembleCritic: gamma must be in [0, 1)");
    }
    std::vector<std::size_t> trunk_dims{config.state_dim + config.action_dim};
    trunk_dims.insert(trunk_dims.end(), config.trunk_hidden.begin(), config.trunk_hidden.end());
    if (trunk_dims.size() < 2) throw std::invalid_argument("EnsembleCritic: trunk needs a hidden layer");
    const std::vector<Activation> trunk_acts(trunk_dims.size() - 1, Activation::relu);
    online_.trunk = mlp_init(trunk_dims, trunk_acts, config.seed);

    std::vector<std::size_t> head_dims{trunk_dims.back()};
    head_dims.insert(head_dims.end(), config.head_hidden.begin(), config.head_hidden.end());
    head_dims.push_back(1);
    std::vector<Activation> head_acts(head_dims.size() - 1, Activation::relu);
    head_acts.back() = Activation::identity;
    for (std::size_t l = 0; l < config.heads; ++l) {
        // Distinct seeds give the heads independent initial estimates.
        online_.heads.push_back(mlp_init(head_dims, head_acts, config.seed + 7919 * (l + 1)));
    }
    target_ = online_;
}

EnsembleCritic::EnsembleCritic(CriticParameters online, std::size_t state_dim, double gamma)
    : online_(std::move(online)), state_dim_(state_dim), gamma_(gamma) {
    if (online_.heads.size() < 2) throw std::invalid_argument("EnsembleCritic: need at least 2 heads");
    if (state_dim_ >= online_.trunk.input_dim()) {
        throw ShapeError("EnsembleCritic: trunk input must exceed state dim");
    }
    for (const auto& h : online_.heads) {
        if (h.input_dim() != online_.trunk.output_dim() || h.output_dim() != 1) {
            throw ShapeError("EnsembleCritic: head shape does not fit trunk");
        }
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("EnsembleCritic: gamma in [0,1)");
    target_ = online_;
}

namespace {

Matrix concat_columns(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("state and action batch sizes differ");
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = out.row(r);
        std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
        std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

Matrix critic_input(const EnsembleCritic& critic, const Matrix& states, const Matrix& actions) {
    if (states.cols() != critic.state_dim() || actions.cols() != critic.action_dim()) {
        throw ShapeError("critic input dims: got state " + std::to_string(states.cols()) +
                         ", action " + std::to_string(actions.cols()));
    }
    return concat_columns(states, actions);
}

struct CriticPass {
    GradientTape trunk_tape;
    std::vector<GradientTape> head_tapes;
    Matrix q;
};

CriticPass forward_with_tapes(const CriticParameters& p, const Matrix& input) {
    CriticPass pass;
    auto [features, trunk_tape] = forward(p.trunk, input);
    pass.trunk_tape = std::move(trunk_tape);
    pass.q = Matrix(input.rows(), p.heads.size());
    for (std::size_t l = 0; l < p.heads.size(); ++l) {
        auto [out, tape] = forward(p.heads[l], features);
        for (std::size_t j = 0; j < out.rows(); ++j) pass.q(j, l) = out(j, 0);
        pass.head_tapes.push_back(std::move(tape));
    }
    return pass;
}

// Pushes d(objective)/dQ (batch x L) back through heads and trunk. Heads
// whose mask bit is clear get zero gradient and feed nothing to the trunk.
std::pair<CriticParameters, Matrix> backward_pass(const CriticParameters& p, const CriticPass& pass,
                                                  const Matrix& dq, const HeadMask& mask,
                                                  bool want_params = true) {
    CriticParameters grad = want_params ? p.zeros_like() : CriticParameters{};
    const std::size_t batch = dq.rows();
    Matrix d_features(batch, p.trunk.output_dim());
    for (std::size_t l = 0; l < p.heads.size(); ++l) {
        if (!mask.active(l)) continue;
        Matrix dq_l(batch, 1);
        for (std::size_t j = 0; j < batch; ++j) dq_l(j, 0) = dq(j, l);
        auto g = want_params ? backward(p.heads[l], pass.head_tapes[l], dq_l)
                             : Gradients{{}, input_gradient(p.heads[l], pass.head_tapes[l], dq_l)};
        if (want_params) grad.heads[l] = std::move(g.params);
        auto df = d_features.data();
        auto src = g.input.data();
        for (std::size_t i = 0; i < df.size(); ++i) df[i] += src[i];
    }
    if (!want_params) return {std::move(grad), input_gradient(p.trunk, pass.trunk_tape, d_features)};
    auto trunk = backward(p.trunk, pass.trunk_tape, d_features);
    grad.trunk = std::move(trunk.params);
    return {std::move(grad), std::move(trunk.input)};
}

}  // namespace

std::vector<double> EnsembleCritic::q_all_heads(std::span<const double> state,
                                                std::span<const double> action,
                                                bool use_target) const {
    Matrix s(1, state.size());
    Matrix a(1, action.size());
    std::copy(state.begin(), state.end(), s.data().begin());
    std::copy(action.begin(), action.end(), a.data().begin());
    const Matrix q = q_batch(s, a, use_target);
    return {q.data().begin(), q.data().end()};
}

Matrix EnsembleCritic::q_batch(const Matrix& states, const Matrix& actions, bool use_target) const {
    const CriticParameters& p = use_target ? target_ : online_;
    const Matrix features = predict(p.trunk, critic_input(*this, states, actions));
    Matrix q(states.rows(), p.heads.size());
    for (std::size_t l = 0; l < p.heads.size(); ++l) {
        const Matrix out = predict(p.heads[l], features);
        for (std::size_t j = 0; j < out.rows(); ++j) q(j, l) = out(j, 0);
    }
    return q;
}

Matrix td_targets(const EnsembleCritic& critic, std::span<const double> rewards,
                  const Matrix& next_states, std::span<const std::uint8_t> dones,
                  const Matrix& next_actions, const HeadMask& mask) {
    const std::size_t batch = rewards.size();
    if (dones.size() != batch || next_states.rows() != batch || next_actions.rows() != batch) {
        throw ShapeError("td_targets: batch sizes differ");
    }
    if (mask.size() != critic.heads()) throw ShapeError("td_targets: mask size differs from heads");
    const Matrix q_next = critic.q_batch(next_states, next_actions, /*use_target=*/true);
    Matrix y(batch, critic.heads());
    for (std::size_t j = 0; j < batch; ++j) {
        for (std::size_t l = 0; l < critic.heads(); ++l) {
            if (!mask.active(l)) continue;
            y(j, l) = dones[j] ? rewards[j] : rewards[j] + critic.gamma() * q_next(j, l);
        }
    }
    return y;
}

CriticLoss weighted_critic_loss_and_grads(const EnsembleCritic& critic, const Matrix& states,
                                          const Matrix& actions, const Matrix& targets,
                                          const HeadMask& mask,
                                          std::span<const double> sample_weights) {
    const std::size_t batch = states.rows();
    if (batch == 0) throw ShapeError("critic loss: empty batch");
    if (targets.rows() != batch || targets.cols() != critic.heads() ||
        sample_weights.size() != batch) {
        throw ShapeError("critic loss: targets or weights do not match batch");
    }
    if (mask.size() != critic.heads()) throw ShapeError("critic loss: mask size differs from heads");
    const std::size_t m = mask.active_count();
    if (m == 0) throw InvalidMaskError("critic loss: no active heads");

    const CriticPass pass = forward_with_tapes(critic.online(), critic_input(critic, states, actions));
    const double norm = 1.0 / (static_cast<double>(m) * static_cast<double>(batch));

    CriticLoss result;
    result.td_error.assign(batch, 0.0);
    Matrix dq(batch, critic.heads());
    double total = 0.0;
    for (std::size_t j = 0; j < batch; ++j) {
        for (std::size_t l = 0; l < critic.heads(); ++l) {
            if (!mask.active(l)) continue;
            const double diff = pass.q(j, l) - targets(j, l);
            total += diff * diff;
            result.td_error[j] -= diff;
            dq(j, l) = 2.0 * diff * norm * sample_weights[j];
        }
        result.td_error[j] /= static_cast<double>(m);
    }
    result.loss = total * norm;
    if (!std::isfinite(result.loss)) throw NonFiniteError("critic loss is not finite");

    result.gradient = backward_pass(critic.online(), pass, dq, mask).first;
    result.gradient.require_finite("critic gradient");
    result.q = pass.q;
    return result;
}

CriticLoss critic_loss_and_grads(const EnsembleCritic& critic, const Matrix& states,
                                 const Matrix& actions, const Matrix& targets,
                                 const HeadMask& mask,
                                 std::span<const std::uint64_t> visit_counts) {
    std::vector<double> weights(visit_counts.size());
    for (std::size_t j = 0; j < visit_counts.size(); ++j) {
        if (visit_counts[j] == 0) {
            throw ContractViolation("critic loss: visit count of sample " + std::to_string(j) +
                                    " is zero");
        }
        weights[j] = 1.0 / static_cast<double>(visit_counts[j]);
    }
    return weighted_critic_loss_and_grads(critic, states, actions, targets, mask, weights);
}

ActionValueGradient action_value_gradient(const EnsembleCritic& critic, const Matrix& states,
                                          const Matrix& actions, const HeadMask& mask) {
    const std::size_t batch = states.rows();
    if (mask.size() != critic.heads()) throw ShapeError("action gradient: mask size differs");
    const std::size_t m = mask.active_count();
    if (m == 0) throw InvalidMaskError("action gradient: no active heads");
    const CriticPass pass = forward_with_tapes(critic.online(), critic_input(critic, states, actions));
    const double norm = 1.0 / (static_cast<double>(m) * static_cast<double>(batch));

    ActionValueGradient out;
    Matrix dq(batch, critic.heads());
    for (std::size_t j = 0; j < batch; ++j) {
        for (std::size_t l = 0; l < critic.heads(); ++l) {
            if (!mask.active(l)) continue;
            out.objective += pass.q(j, l) * norm;
            dq(j, l) = norm;
        }
    }
    const Matrix d_input = backward_pass(critic.online(), pass, dq, mask, false).second;
    out.action_gradient = Matrix(batch, critic.action_dim());
    for (std::size_t j = 0; j < batch; ++j) {
        for (std::size_t i = 0; i < critic.action_dim(); ++i) {
            out.action_gradient(j, i) = d_input(j, critic.state_dim() + i);
        }
    }
    return out;
}

CriticOptimizer::CriticOptimizer(std::size_t heads, double learning_rate, double momentum)
    : trunk_(learning_rate, momentum), heads_(heads, SgdOptimizer(learning_rate, momentum)) {}

void CriticOptimizer::step(CriticParameters& params, const CriticParameters& delta) {
    require_same(params, delta);
    if (params.heads.size() != heads_.size()) throw ShapeError("optimizer head count differs");
    trunk_.step(params.trunk, delta.trunk);
    for (std::size_t l = 0; l < heads_.size(); ++l) heads_[l].step(params.heads[l], delta.heads[l]);
}

}  // namespace meet
