#include "meet/replay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "meet/errors.hpp"

namespace meet {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::meet: return "meet";
        case Strategy::per: return "per";
        case Strategy::uniform: return "uniform";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "meet") return Strategy::meet;
    if (name == "per") return Strategy::per;
    if (name == "uniform") return Strategy::uniform;
    throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

ReplayBuffer::ReplayBuffer(const ReplayConfig& config)
    : config_(config), tree_(config.capacity) {
    if (!(config.priority_floor > 0.0)) throw std::invalid_argument("priority floor must be > 0");
    slots_.resize(config.capacity);
}

std::size_t ReplayBuffer::store(Transition transition) {
    const double priority = size_ == 0 ? 1.0 : std::max(tree_.max(), config_.priority_floor);
    const std::size_t slot = cursor_;
    transition.visits = 0;
    transition.priority = priority;
    slots_[slot] = std::move(transition);
    tree_.set(slot, priority);
    cursor_ = (cursor_ + 1) % config_.capacity;
    size_ = std::min(size_ + 1, config_.capacity);
    return slot;
}

std::vector<SampledSlot> ReplayBuffer::sample_batch(std::size_t k, std::mt19937_64& rng) {
    if (size_ == 0) throw EmptyError("sample_batch: replay buffer is empty");
    if (k == 0) throw std::invalid_argument("sample_batch: batch size must be >= 1");
    std::vector<SampledSlot> out(k);
    if (config_.strategy == Strategy::uniform) {
        std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
        for (auto& s : out) s.slot = pick(rng);
    } else {
        const double total = tree_.total();
        std::uniform_real_distribution<double> draw(0.0, total);
        for (auto& s : out) {
            double u = draw(rng);
            if (u >= total) u = std::nextafter(total, 0.0);
            s.slot = tree_.sample_prefix(u);
        }
        if (config_.strategy == Strategy::per) {
            double max_w = 0.0;
            for (auto& s : out) {
                const double p = tree_.get(s.slot) / total;
                s.weight = std::pow(static_cast<double>(size_) * p, -config_.per_beta);
                max_w = std::max(max_w, s.weight);
            }
            for (auto& s : out) s.weight /= max_w;
        }
    }
    for (const auto& s : out) ++slots_[s.slot].visits;
    return out;
}

void ReplayBuffer::update_priorities(std::span<const std::size_t> slots,
                                     std::span<const double> priorities) {
    if (slots.size() != priorities.size()) {
        throw std::invalid_argument("update_priorities: slot and priority counts differ");
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i] >= size_) throw std::out_of_range("update_priorities: slot not in use");
        if (!std::isfinite(priorities[i]) || priorities[i] < 0.0) {
            throw std::invalid_argument("update_priorities: priority must be finite and >= 0");
        }
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double p = std::max(config_.priority_floor, priorities[i]);
        slots_[slots[i]].priority = p;
        tree_.set(slots[i], p);
    }
}

const Transition& ReplayBuffer::at(std::size_t slot) const {
    if (slot >= size_) throw std::out_of_range("ReplayBuffer::at: slot not in use");
    return slots_[slot];
}

double ReplayBuffer::mean_priority() const {
    return size_ == 0 ? 0.0 : tree_.total() / static_cast<double>(size_);
}

std::uint64_t ReplayBuffer::total_visits() const {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < size_; ++i) n += slots_[i].visits;
    return n;
}

void ReplayBuffer::set_per_beta(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("per beta must be in [0, 1]");
    config_.per_beta = beta;
}

void ReplayBuffer::dump(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    const auto put = [&out](double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    const auto put_u64 = [&out](std::uint64_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    };
    out.write("MEETBUF1", 8);
    const std::size_t sdim = size_ ? slots_[0].state.size() : 0;
    const std::size_t adim = size_ ? slots_[0].action.size() : 0;
    put_u64(size_);
    put_u64(sdim);
    put_u64(adim);
    for (std::size_t i = 0; i < size_; ++i) {
        const auto& t = slots_[i];
        for (double v : t.state) put(v);
        for (double v : t.action) put(v);
        put(t.reward);
        for (double v : t.next_state) put(v);
        put(t.done ? 1.0 : 0.0);
        put(static_cast<double>(t.visits));
        put(t.priority);
    }
}

double meet_priority_raw(double mean, double variance, std::uint64_t visits) {
    if (visits == 0) throw ContractViolation("meet_priority: visit count must be >= 1");
    return variance * (mean + (1.0 - mean) / static_cast<double>(visits));
}

double meet_priority(double mean, double variance, std::uint64_t visits, double floor) {
    return std::max(floor, meet_priority_raw(mean, variance, visits));
}

NormalizedStats normalize_batch_stats(std::span<const double> means,
                                      std::span<const double> variances) {
    if (means.empty() || means.size() != variances.size()) {
        throw std::invalid_argument("normalize_batch_stats: need equal-length non-empty inputs");
    }
    const auto bad = [](double v) { return !std::isfinite(v); };
    if (std::any_of(means.begin(), means.end(), bad) ||
        std::any_of(variances.begin(), variances.end(), bad)) {
        throw std::invalid_argument("normalize_batch_stats: non-finite input");
    }
    NormalizedStats out;
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    const double range = *hi - *lo;
    out.means.resize(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        out.means[i] = range > 0.0 ? (means[i] - *lo) / range : 0.5;
    }
    const double vmax = *std::max_element(variances.begin(), variances.end());
    out.variances.resize(variances.size());
    for (std::size_t i = 0; i < variances.size(); ++i) {
        out.variances[i] = vmax > 0.0 ? variances[i] / vmax : 0.0;
    }
    return out;
}

double per_priority(double td_error, double alpha, double eps) {
    return std::pow(std::abs(td_error) + eps, alpha);
}

}  // namespace meet
