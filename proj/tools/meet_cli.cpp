// meet: run sampling-strategy experiments and summarize their CSV output.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "meet/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 1;
constexpr int kExitRunFailure = 2;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// CLI11 only reads config files for the top-level app, so the run
// subcommand applies its own. Keys are long flag names without dashes.
void apply_config(CLI::App& cmd, const std::string& path) {
    for (const auto& item : CLI::ConfigINI().from_file(path)) {
        if (!item.parents.empty()) throw std::invalid_argument("config: sections are not supported");
        CLI::Option* opt = cmd.get_option_no_throw("--" + item.name);
        if (opt == nullptr || item.name == "config") {
            throw std::invalid_argument("config: unknown key '" + item.name + "'");
        }
        if (opt->count() > 0) continue;  // the command line wins
        std::string value;
        for (const auto& part : item.inputs) value += (value.empty() ? "" : ",") + part;
        opt->add_result(value);
        opt->run_callback();
    }
}

}  // namespace

int main(int argc, char** argv) {
    meet::tune_allocator();
    CLI::App app{"MEET replay-sampling experiments"};
    app.require_subcommand(1);

    meet::ExperimentSpec spec;
    std::string strategies = "meet";
    std::string seeds = "0,1,2,3,4";
    std::string actor_hidden = "64,64";
    std::string critic_hidden = "64,64";

    auto* run = app.add_subcommand("run", "train agents and write a learning-curve CSV");
    std::string config_path;
    run->add_option("--config", config_path, "key = value file mirroring these flags; flags override it")
        ->check(CLI::ExistingFile);
    run->add_option("--env", spec.env, "pendulum | pointmass")
        ->check(CLI::IsMember({"pendulum", "pointmass"}))
        ->capture_default_str();
    run->add_option("--strategy", strategies, "comma list of meet, per, uniform")->capture_default_str();
    run->add_option("--seeds", seeds, "comma list of run seeds")->capture_default_str();
    run->add_option("--steps", spec.agent.total_steps, "environment steps T")->capture_default_str();
    run->add_option("--heads", spec.agent.heads, "critic heads L")->capture_default_str();
    run->add_option("--mask-prob", spec.agent.mask_prob, "head mask probability m_p")->capture_default_str();
    run->add_option("--gamma", spec.agent.gamma, "discount")->capture_default_str();
    run->add_option("--replay-period", spec.agent.replay_period, "learn every K steps")->capture_default_str();
    run->add_option("--batch", spec.agent.batch_size, "batch size k")->capture_default_str();
    run->add_option("--capacity", spec.agent.capacity, "replay capacity")->capture_default_str();
    run->add_option("--tau", spec.agent.tau, "Polyak rate")->capture_default_str();
    run->add_option("--actor-lr", spec.agent.actor_lr, "actor learning rate")->capture_default_str();
    run->add_option("--critic-lr", spec.agent.critic_lr, "critic learning rate")->capture_default_str();
    run->add_option("--momentum", spec.agent.momentum, "SGD momentum")->capture_default_str();
    run->add_option("--noise", spec.agent.noise_scale, "exploration std / action range")->capture_default_str();
    run->add_option("--actor-hidden", actor_hidden, "actor hidden widths")->capture_default_str();
    run->add_option("--critic-hidden", critic_hidden, "critic trunk hidden widths")->capture_default_str();
    run->add_option("--eval-interval", spec.eval_interval, "steps between evaluations")->capture_default_str();
    run->add_option("--eval-episodes", spec.eval_episodes, "episodes per evaluation")->capture_default_str();
    run->add_option("--threads", spec.threads, "concurrent runs (0 = OpenMP default)")->capture_default_str();
    run->add_flag("--record-time", spec.record_wall_time, "fill wall_secs (output no longer reproducible)");
    run->add_option("--out", spec.out, "CSV output path (required here or in the config file)");

    std::string in_path;
    auto* summarize = app.add_subcommand("summarize", "print per-strategy statistics of a CSV");
    summarize->add_option("--in", in_path, "CSV produced by run")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    if (run->parsed()) {
        try {
            if (!config_path.empty()) apply_config(*run, config_path);
            if (spec.out.empty()) throw std::invalid_argument("--out is required");
            spec.strategies.clear();
            for (const auto& s : split(strategies, ',')) spec.strategies.push_back(meet::parse_strategy(s));
            spec.seeds.clear();
            for (const auto& s : split(seeds, ',')) spec.seeds.push_back(std::stoull(s));
            spec.agent.actor_hidden.clear();
            for (const auto& s : split(actor_hidden, ',')) spec.agent.actor_hidden.push_back(std::stoul(s));
            spec.agent.critic_hidden.clear();
            for (const auto& s : split(critic_hidden, ',')) spec.agent.critic_hidden.push_back(std::stoul(s));
            meet::validate(spec);
        } catch (const std::exception& e) {
            std::cerr << "invalid arguments: " << e.what() << '\n';
            return kExitBadArgs;
        }

        const auto records = meet::run_experiment(spec);
        std::ofstream out(spec.out);
        if (!out) {
            std::cerr << "cannot write " << spec.out << '\n';
            return kExitRunFailure;
        }
        meet::write_csv(out, records);
        std::size_t failed = 0;
        for (const auto& r : records) failed += r.failed() ? 1 : 0;
        if (failed > 0) {
            std::cerr << failed << " run(s) failed; see rows with step -1 in " << spec.out << '\n';
            return kExitRunFailure;
        }
        return kExitOk;
    }

    try {
        std::ifstream in(in_path);
        const auto records = meet::read_csv(in);
        const auto rows = meet::summarize(records);
        meet::print_summary(std::cout, rows);
    } catch (const std::exception& e) {
        std::cerr << "summarize: " << e.what() << '\n';
        return kExitRunFailure;
    }
    return kExitOk;
}
