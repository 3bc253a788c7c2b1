#include "meet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#ifdef __GLIBC__
#include <malloc.h>
#endif
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "meet/envs.hpp"
#include "meet/errors.hpp"

namespace meet {

void validate(const ExperimentSpec& spec) {
    if (spec.strategies.empty()) throw std::invalid_argument("experiment: no strategies");
    if (spec.seeds.empty()) throw std::invalid_argument("experiment: no seeds");
    if (spec.eval_interval < 1) throw std::invalid_argument("experiment: eval interval must be >= 1");
    if (spec.eval_episodes < 1) throw std::invalid_argument("experiment: eval episodes must be >= 1");
    make_env(spec.env);
    validate(spec.agent);
}

std::uint64_t evaluation_seed(std::uint64_t run_seed) { return episode_seed(run_seed, 0xE7A1u); }

std::vector<RunRecord> run_single(const ExperimentSpec& spec, Strategy strategy,
                                  std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    std::vector<RunRecord> out;
    const auto record = [&](long long step, double ret, double loss, double prio) {
        double secs = 0.0;
        if (spec.record_wall_time) {
            secs = std::chrono::duration<double>(clock::now() - started).count();
        }
        out.push_back({strategy, seed, step, ret, loss, prio, secs});
    };

    try {
        AgentConfig cfg = spec.agent;
        cfg.strategy = strategy;
        cfg.seed = seed;
        auto env = make_env(spec.env);
        auto eval_env = make_env(spec.env);
        Agent agent(cfg, *env);
        const std::uint64_t eval_seed = evaluation_seed(seed);

        record(0, evaluate(agent.actor(), *eval_env, spec.eval_episodes, eval_seed), 0.0, 0.0);
        if (cfg.total_steps == 0) return out;

        agent.begin(*env);
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        for (std::size_t t = 1; t <= cfg.total_steps; ++t) {
            const StepDiagnostics d = agent.train_iteration(*env, t);
            if (d.learned) {
                if (!std::isfinite(d.critic_loss)) throw NonFiniteError("critic loss diverged");
                loss_sum += d.critic_loss;
                ++loss_count;
            }
            if (t % spec.eval_interval == 0 || t == cfg.total_steps) {
                const double ret = evaluate(agent.actor(), *eval_env, spec.eval_episodes, eval_seed);
                record(static_cast<long long>(t), ret,
                       loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0,
                       agent.buffer().mean_priority());
                loss_sum = 0.0;
                loss_count = 0;
            }
        }
    } catch (const std::exception&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.push_back({strategy, seed, -1, nan, nan, nan, 0.0});
    }
    return out;
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
    validate(spec);
    struct Job {
        Strategy strategy;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (Strategy s : spec.strategies) {
        for (std::uint64_t seed : spec.seeds) jobs.push_back({s, seed});
    }
    std::vector<std::vector<RunRecord>> results(jobs.size());
    const auto n = static_cast<std::int64_t>(jobs.size());
#ifdef _OPENMP
    const int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        results[i] = run_single(spec, jobs[i].strategy, jobs[i].seed);
    }
    std::vector<RunRecord> all;
    for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
    return all;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const RunRecord> records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << to_string(r.strategy) << ',' << r.seed << ',' << r.step << ','
            << format_double(r.eval_return) << ',' << format_double(r.critic_loss) << ','
            << format_double(r.mean_priority) << ',' << format_double(r.wall_secs) << '\n';
    }
}

std::vector<RunRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::invalid_argument("CSV header does not match the run-record schema");
    }
    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected 7 fields");
        }
        try {
            RunRecord r;
            r.strategy = parse_strategy(cells[0]);
            r.seed = std::stoull(cells[1]);
            r.step = std::stoll(cells[2]);
            r.eval_return = parse_double(cells[3]);
            r.critic_loss = parse_double(cells[4]);
            r.mean_priority = parse_double(cells[5]);
            r.wall_secs = parse_double(cells[6]);
            records.push_back(r);
        } catch (const std::exception& e) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::vector<StrategySummary> summarize(std::span<const RunRecord> records) {
    if (records.empty()) throw EmptyError("summarize: no records");

    std::vector<Strategy> order;
    std::map<std::pair<int, std::uint64_t>, std::vector<RunRecord>> series;
    for (const auto& r : records) {
        if (std::find(order.begin(), order.end(), r.strategy) == order.end()) order.push_back(r.strategy);
        series[{static_cast<int>(r.strategy), r.seed}].push_back(r);
    }

    std::vector<StrategySummary> out;
    for (Strategy s : order) {
        StrategySummary row;
        row.strategy = s;
        std::vector<double> finals, aucs;
        std::map<long long, std::pair<double, std::size_t>> curve;  // step -> (sum, count)
        for (auto& [key, rs] : series) {
            if (key.first != static_cast<int>(s)) continue;
            if (std::any_of(rs.begin(), rs.end(), [](const RunRecord& r) { return r.failed(); })) {
                ++row.failed;
                continue;
            }
            std::sort(rs.begin(), rs.end(),
                      [](const RunRecord& a, const RunRecord& b) { return a.step < b.step; });
            finals.push_back(rs.back().eval_return);
            if (rs.size() == 1 || rs.back().step == rs.front().step) {
                aucs.push_back(rs.front().eval_return);
            } else {
                double area = 0.0;
                for (std::size_t i = 1; i < rs.size(); ++i) {
                    area += 0.5 * (rs[i].eval_return + rs[i - 1].eval_return) *
                            static_cast<double>(rs[i].step - rs[i - 1].step);
                }
                aucs.push_back(area / static_cast<double>(rs.back().step - rs.front().step));
            }
            for (const auto& r : rs) {
                auto& c = curve[r.step];
                c.first += r.eval_return;
                ++c.second;
            }
        }
        row.seeds = finals.size();
        if (finals.empty()) {
            out.push_back(row);
            continue;
        }
        const double n = static_cast<double>(finals.size());
        double sum = 0.0;
        for (double f : finals) sum += f;
        row.final_mean = sum / n;
        double sq = 0.0;
        for (double f : finals) sq += (f - row.final_mean) * (f - row.final_mean);
        row.final_std = std::sqrt(sq / n);
        double auc = 0.0;
        for (double a : aucs) auc += a;
        row.auc_mean = auc / n;
        row.peak = -std::numeric_limits<double>::infinity();
        for (const auto& [step, c] : curve) {
            if (c.second == finals.size()) row.peak = std::max(row.peak, c.first / n);
        }
        out.push_back(row);
    }
    if (std::all_of(out.begin(), out.end(), [](const StrategySummary& r) { return r.seeds == 0; })) {
        throw EmptyError("summarize: every run failed");
    }
    return out;
}

void print_summary(std::ostream& out, std::span<const StrategySummary> rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %6s %7s %14s %12s %14s %14s\n", "strategy", "seeds",
                  "failed", "final_mean", "final_std", "auc_mean", "peak");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-10s %6zu %7zu %14.3f %12.3f %14.3f %14.3f\n",
                      std::string(to_string(r.strategy)).c_str(), r.seeds, r.failed, r.final_mean,
                      r.final_std, r.auc_mean, r.peak);
        out << buf;
    }
}

BaselineStats random_baseline(const std::string& env_name, std::span<const std::uint64_t> seeds,
                              std::size_t episodes) {
    if (seeds.empty()) throw std::invalid_argument("random_baseline: no seeds");
    BaselineStats b;
    auto env = make_env(env_name);
    for (std::uint64_t seed : seeds) {
        b.per_seed.push_back(evaluate_random(*env, episodes, evaluation_seed(seed)));
    }
    const double n = static_cast<double>(b.per_seed.size());
    for (double v : b.per_seed) b.mean += v;
    b.mean /= n;
    for (double v : b.per_seed) b.std += (v - b.mean) * (v - b.mean);
    b.std = std::sqrt(b.std / n);
    return b;
}

void tune_allocator() {
#ifdef __GLIBC__
    constexpr int kThreshold = 256 << 20;
    mallopt(M_MMAP_THRESHOLD, kThreshold);
    mallopt(M_TRIM_THRESHOLD, kThreshold);
#endif
}

}  // namespace meet
