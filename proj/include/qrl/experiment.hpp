// experiment.hpp
// Drivers shared by the command-line tool and the acceptance suite: build
// the configured environment, train, evaluate, and render CSV artifacts.

#pragma once

#include "qrl/checkpoint.hpp"
#include "qrl/config.hpp"
#include "qrl/ddpg.hpp"
#include "qrl/frozen_lake.hpp"
#include "qrl/io.hpp"
#include "qrl/qlearning.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace qrl {

// Calls f(env) with the continuous-action environment named by the config.
template <typename F>
decltype(auto) with_environment(const ExperimentConfig& c, F&& f) {
    switch (c.task) {
    case Task::eigen: {
        std::optional<EigenProblem> problem;
        try {
            problem.emplace(eigen_env_config(c));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("hamiltonian", e.what());
        }
        EigenEnvironment env(std::move(*problem));
        return f(env);
    }
    case Task::stategen: {
        StateGenEnvironment env{StateGenProblem(state_gen_config(c))};
        return f(env);
    }
    case Task::frozenlake: break;
    }
    throw ConfigError("task", "frozenlake has no continuous-action environment; use the frozenlake command");
}

inline std::size_t environment_qubits(const ExperimentConfig& c) {
    return with_environment(c, [](const auto& env) { return env.n_qubits(); });
}

// Fresh run, or continuation of `resume`, until config.ddpg.episodes have
// completed or, if given, `stop_after` episodes in total. The exploration
// schedule always follows config.ddpg.episodes, so a run stopped early and
// resumed matches one that ran straight through.
inline Checkpoint run_training(const ExperimentConfig& c, std::optional<Checkpoint> resume = std::nullopt,
                               std::optional<std::size_t> stop_after = std::nullopt) {
    return with_environment(c, [&](auto& env) {
        Checkpoint ck;
        ck.config = c;
        ck.n_qubits = env.n_qubits();
        if (resume) {
            if (resume->n_qubits != env.n_qubits())
                throw ConfigError("n_qubits", "checkpoint qubit count does not match the environment");
            ck.trainer = std::move(resume->trainer);
            ck.trainer.hp = c.ddpg;
        } else {
            ck.trainer = TrainerState::create(env.n_qubits(), c.ddpg, c.seed);
        }
        const std::size_t last = std::min(c.ddpg.episodes, stop_after.value_or(c.ddpg.episodes));
        while (ck.trainer.episodes_done < last) run_training_episode(env, ck.trainer);
        return ck;
    });
}

inline EvaluationResult run_evaluation(const ExperimentConfig& c, const CircuitParameters& policy, std::size_t states,
                                       std::size_t steps, std::uint64_t seed) {
    return with_environment(c, [&](const auto& env) {
        if (policy.n_qubits() != env.n_qubits())
            throw ConfigError("networks.policy", "policy qubit count does not match the environment");
        RandomSource rng(seed);
        return evaluate_policy(env, policy, states, steps, rng, c.ddpg.action_scale);
    });
}

inline std::string config_comment(const ExperimentConfig& c) {
    return "qrl " + std::string(toolkit_version) + " seed=" + std::to_string(c.seed) +
           " config=" + config_to_json(c).dump();
}

inline std::string history_csv(const Checkpoint& ck) {
    CsvWriter w;
    w.comment(config_comment(ck.config));
    w.header({"episode", "return", "initial_overlap", "final_overlap", "critic_loss"});
    for (const auto& h : ck.trainer.history)
        w.row(h.episode, h.episode_return, h.initial_overlap, h.final_overlap, h.mean_critic_loss);
    return w.str();
}

inline std::string evaluation_csv(const ExperimentConfig& c, const EvaluationResult& ev, std::uint64_t eval_seed) {
    CsvWriter w;
    w.comment(config_comment(c) + " eval_seed=" + std::to_string(eval_seed) +
              " states=" + std::to_string(ev.trajectories.size()));
    w.header({"t", "mean_overlap", "var_overlap"});
    for (std::size_t t = 0; t < ev.mean.size(); ++t) w.row(t, ev.mean[t], ev.variance[t]);
    return w.str();
}

inline FrozenLakeMap frozen_lake_map(const ExperimentConfig& c) {
    if (c.map_path.empty()) return FrozenLakeMap::classic();
    try {
        return FrozenLakeMap::load(c.map_path);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("frozenlake.map", c.map_path + ": " + e.what());
    }
}

inline FrozenLakeResult run_frozen_lake(const ExperimentConfig& c, const FrozenLakeMap& map) {
    RandomSource rng(c.seed);
    return train_frozen_lake(map, c.qlearning, rng);
}

inline std::string qtable_csv(const ExperimentConfig& c, const FrozenLakeResult& r) {
    CsvWriter w;
    w.comment(config_comment(c));
    w.header({"cell", "up", "down", "left", "right"});
    for (std::size_t s = 0; s < r.table.n_states; ++s) {
        const auto row = r.table.row(s);
        w.row(s, row[0], row[1], row[2], row[3]);
    }
    return w.str();
}

inline std::string path_csv(const ExperimentConfig& c, const FrozenLakeResult& r) {
    CsvWriter w;
    w.comment(config_comment(c));
    w.header({"step", "cell"});
    for (std::size_t k = 0; k < r.path.size(); ++k) w.row(k, r.path[k]);
    return w.str();
}

} // namespace qrl
