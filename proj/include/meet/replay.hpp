#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "meet/ensemble_critic.hpp"
#include "meet/sum_tree.hpp"

namespace meet {

enum class Strategy { meet, per, uniform };

std::string_view to_string(Strategy s);
/// Accepts "meet", "per", "uniform"; throws std::invalid_argument otherwise.
Strategy parse_strategy(std::string_view name);

inline constexpr double kPriorityFloor = 1e-6;

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
    std::uint64_t visits = 0;
    double priority = 0.0;
    HeadMask head_mask;  // acting mask at collection time
};

struct ReplayConfig {
    std::size_t capacity = 100000;
    Strategy strategy = Strategy::meet;
    double priority_floor = kPriorityFloor;
    double per_alpha = 0.6;
    double per_beta = 0.4;
    double per_eps = 1e-6;
};

struct SampledSlot {
    std::size_t slot = 0;
    double weight = 1.0;  // importance weight; 1 unless strategy is per
};

/// FIFO ring of transitions with a sum tree over slot priorities.
class ReplayBuffer {
public:
    explicit ReplayBuffer(const ReplayConfig& config);

    /// Inserts with the current maximum priority (1 into an empty buffer) and
    /// returns the slot used. Overwrites the oldest slot once full.
    std::size_t store(Transition transition);

    /// Draws k slots with replacement and increments each drawn slot's visit
    /// count once per occurrence.
    std::vector<SampledSlot> sample_batch(std::size_t k, std::mt19937_64& rng);

    /// Writes max(floor, p) for each slot, in order (a repeated slot keeps its
    /// last value).
    void update_priorities(std::span<const std::size_t> slots, std::span<const double> priorities);

    const Transition& at(std::size_t slot) const;

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return config_.capacity; }
    Strategy strategy() const { return config_.strategy; }
    const ReplayConfig& config() const { return config_; }

    double max_priority() const { return tree_.max(); }
    double total_priority() const { return tree_.total(); }
    double mean_priority() const;
    std::uint64_t total_visits() const;

    void set_per_beta(double beta);

    /// Debug dump: "MEETBUF1", u64 count, u64 state dim, u64 action dim, then
    /// per stored slot: state, action, reward, next_state, done, visits,
    /// priority as float64.
    void dump(const std::filesystem::path& path) const;

private:
    ReplayConfig config_;
    std::vector<Transition> slots_;
    SumTree tree_;
    std::size_t cursor_ = 0;
    std::size_t size_ = 0;
};

/// Exploration-exploitation score sigma^2 * (mu + (1 - mu) / N), before the
/// floor is applied. Throws ContractViolation when visits == 0.
double meet_priority_raw(double mean, double variance, std::uint64_t visits);

/// max(floor, meet_priority_raw(...)).
double meet_priority(double mean, double variance, std::uint64_t visits,
                     double floor = kPriorityFloor);

struct NormalizedStats {
    std::vector<double> means;      // min-shifted then divided by range; 0.5 if flat
    std::vector<double> variances;  // divided by max; 0 if the max is 0
};

NormalizedStats normalize_batch_stats(std::span<const double> means,
                                      std::span<const double> variances);

/// (|td_error| + eps)^alpha
double per_priority(double td_error, double alpha, double eps);

}  // namespace meet
