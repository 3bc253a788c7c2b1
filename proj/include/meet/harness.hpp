#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "meet/agent.hpp"
#include "meet/replay.hpp"

namespace meet {

struct ExperimentSpec {
    std::string env = "pendulum";
    std::vector<Strategy> strategies{Strategy::meet};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    AgentConfig agent;  // strategy and seed are overridden per run
    std::size_t eval_interval = 1000;
    std::size_t eval_episodes = 10;
    std::string out;
    // Wall-clock seconds make the CSV non-reproducible, so they are only
    // recorded on request; otherwise the column is written as 0.
    bool record_wall_time = false;
    int threads = 0;  // 0 leaves the OpenMP default
};

/// Throws std::invalid_argument on an unusable spec.
void validate(const ExperimentSpec& spec);

struct RunRecord {
    Strategy strategy = Strategy::meet;
    std::uint64_t seed = 0;
    long long step = 0;  // -1 marks a failed run
    double eval_return = 0.0;
    double critic_loss = 0.0;
    double mean_priority = 0.0;
    double wall_secs = 0.0;

    bool failed() const { return step < 0; }
};

/// Evaluation episodes of a run use seeds derived from this value, identical
/// at every evaluation point.
std::uint64_t evaluation_seed(std::uint64_t run_seed);

/// One (strategy, seed) series: evaluation at step 0, every eval_interval
/// steps, and at the final step.
std::vector<RunRecord> run_single(const ExperimentSpec& spec, Strategy strategy,
                                  std::uint64_t seed);

/// All strategy x seed series, strategy-major in the order given. Runs may
/// execute concurrently; output order never depends on scheduling.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec);

inline constexpr const char* kCsvHeader =
    "strategy,seed,step,eval_return,critic_loss,mean_priority,wall_secs";

void write_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_csv(std::istream& in);

struct StrategySummary {
    Strategy strategy = Strategy::meet;
    std::size_t seeds = 0;
    std::size_t failed = 0;
    double final_mean = 0.0;
    double final_std = 0.0;  // population std across seeds
    double auc_mean = 0.0;   // trapezoidal mean return over steps, averaged over seeds
    double peak = 0.0;       // max of the seed-mean curve
};

/// Per-strategy statistics in order of first appearance. Failed series are
/// counted but excluded. Throws EmptyError when no usable series exist.
std::vector<StrategySummary> summarize(std::span<const RunRecord> records);

void print_summary(std::ostream& out, std::span<const StrategySummary> rows);

struct BaselineStats {
    double mean = 0.0;
    double std = 0.0;  // population std across seeds
    std::vector<double> per_seed;
};

/// Uniform-random actions under the same evaluation protocol as run_single.
BaselineStats random_baseline(const std::string& env, std::span<const std::uint64_t> seeds,
                              std::size_t episodes);

// Raises glibc's mmap and trim thresholds so the per-batch matrices are
// recycled instead of being mapped and unmapped every learning phase.
// No-op on other allocators. Call once from main.
void tune_allocator();

}  // namespace meet
