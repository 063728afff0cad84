// qrl: train, evaluate and check the quantum reinforcement-learning toolkit.
//
//   qrl train --config configs/eigen.json [--resume out/checkpoint.json]
//   qrl eval --checkpoint out/checkpoint.json [--states 200] [--steps 50]
//   qrl frozenlake [--config configs/frozenlake.json] [--map maps/classic4x4.txt]
//   qrl gradcheck [--qubits 3] [--layers 3] [--trials 100]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include "qrl/experiment.hpp"
#include "qrl/gradcheck.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::string config;
};

// Distinguishes a user-supplied path that does not exist (usage error) from
// I/O failures later on.
void require_file(const std::string& path, const char* what) {
    if (!fs::is_regular_file(path)) throw qrl::ConfigError("", std::string(what) + " file not found: " + path);
}

qrl::ExperimentConfig resolve_config(const Globals& g, bool required) {
    qrl::ExperimentConfig c;
    if (!g.config.empty()) {
        require_file(g.config, "config");
        c = qrl::load_config(g.config);
    } else if (required) {
        throw qrl::ConfigError("", "--config is required");
    }
    if (g.seed) c.seed = *g.seed;
    if (g.out_dir) c.out_dir = *g.out_dir;
    return c;
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_train(const Globals& g, const std::string& resume_path, std::optional<std::size_t> stop_after) {
    const auto t0 = std::chrono::steady_clock::now();
    auto c = resolve_config(g, true);
    if (c.task == qrl::Task::frozenlake)
        throw qrl::ConfigError("task", "frozenlake is trained with the frozenlake command");
    std::optional<qrl::Checkpoint> resume;
    if (!resume_path.empty()) {
        require_file(resume_path, "checkpoint");
        resume = qrl::load_checkpoint(resume_path);
        if (resume->trainer.rng.seed() != c.seed)
            std::cerr << "note: resuming with the checkpoint's generator state (seed "
                      << resume->trainer.rng.seed() << ")\n";
        c.seed = resume->trainer.rng.seed();
    }
    const auto ck = qrl::run_training(c, std::move(resume), stop_after);
    const auto dir = prepare_out_dir(c.out_dir);
    qrl::save_checkpoint(ck, (dir / "checkpoint.json").string());
    qrl::write_text_file((dir / "history.csv").string(), qrl::history_csv(ck));
    const nlohmann::json record = {
        {"toolkit_version", qrl::toolkit_version},
        {"command", "train"},
        {"config", qrl::config_to_json(c)},
        {"seed", c.seed},
        {"episodes", ck.trainer.episodes_done},
        {"wall_seconds", seconds_since(t0)},
        {"artifacts", {"checkpoint.json", "history.csv"}},
    };
    qrl::write_text_file((dir / "run_record.json").string(), record.dump(1) + "\n");
    std::cout << "trained " << ck.trainer.episodes_done << " episodes";
    if (!ck.trainer.history.empty())
        std::cout << ", last final overlap " << qrl::format_double(ck.trainer.history.back().final_overlap);
    std::cout << "\nwrote " << (dir / "checkpoint.json").string() << " and " << (dir / "history.csv").string()
              << "\n";
    return exit_ok;
}

int cmd_eval(const Globals& g, const std::string& ck_path, std::optional<std::size_t> states,
             std::optional<std::size_t> steps) {
    const auto t0 = std::chrono::steady_clock::now();
    require_file(ck_path, "checkpoint");
    const auto ck = qrl::load_checkpoint(ck_path);
    auto c = ck.config;
    if (g.out_dir) c.out_dir = *g.out_dir;
    const std::uint64_t seed = g.seed.value_or(c.seed);
    const std::size_t n_states = states.value_or(c.evaluation.states);
    const std::size_t n_steps = steps.value_or(c.evaluation.steps);
    if (n_states == 0) throw qrl::ConfigError("states", "must be positive");

    const auto ev = qrl::run_evaluation(c, ck.trainer.agent.policy, n_states, n_steps, seed);
    const auto dir = prepare_out_dir(c.out_dir);
    qrl::write_text_file((dir / "eval.csv").string(), qrl::evaluation_csv(c, ev, seed));
    const nlohmann::json record = {
        {"toolkit_version", qrl::toolkit_version},
        {"command", "eval"},
        {"config", qrl::config_to_json(c)},
        {"seed", seed},
        {"checkpoint", ck_path},
        {"states", n_states},
        {"steps", n_steps},
        {"wall_seconds", seconds_since(t0)},
        {"artifacts", {"eval.csv"}},
    };
    qrl::write_text_file((dir / "eval_record.json").string(), record.dump(1) + "\n");
    std::cout << "mean_overlap[" << n_steps << "] = " << qrl::format_double(ev.mean.back()) << "\n"
              << "var_overlap[" << n_steps << "] = " << qrl::format_double(ev.variance.back()) << "\n"
              << "wrote " << (dir / "eval.csv").string() << "\n";
    return exit_ok;
}

int cmd_frozenlake(const Globals& g, const std::string& map_override) {
    const auto t0 = std::chrono::steady_clock::now();
    auto c = resolve_config(g, false);
    if (!map_override.empty()) c.map_path = map_override;
    if (!c.map_path.empty()) require_file(c.map_path, "map");
    const auto map = qrl::frozen_lake_map(c);
    const auto r = qrl::run_frozen_lake(c, map);
    const auto dir = prepare_out_dir(c.out_dir);
    qrl::write_text_file((dir / "qtable.csv").string(), qrl::qtable_csv(c, r));
    qrl::write_text_file((dir / "path.csv").string(), qrl::path_csv(c, r));
    const nlohmann::json record = {
        {"toolkit_version", qrl::toolkit_version},
        {"command", "frozenlake"},
        {"config", qrl::config_to_json(c)},
        {"seed", c.seed},
        {"map", map.to_string()},
        {"path", r.path},
        {"reached_goal", r.reached_goal},
        {"wall_seconds", seconds_since(t0)},
        {"artifacts", {"qtable.csv", "path.csv"}},
    };
    qrl::write_text_file((dir / "run_record.json").string(), record.dump(1) + "\n");

    std::cout << "path:";
    for (auto cell : r.path) std::cout << ' ' << cell;
    std::cout << "\nsteps: " << (r.path.empty() ? 0 : r.path.size() - 1) << "\n";
    if (!r.reached_goal) {
        std::cerr << "error: greedy policy does not reach the goal\n";
        return exit_runtime;
    }
    return exit_ok;
}

int cmd_gradcheck(const Globals& g, qrl::GradcheckOptions opt) {
    if (g.seed) opt.seed = *g.seed;
    const auto rep = qrl::run_gradcheck(opt);
    std::cout << "trials: " << rep.trials << "\n"
              << "parameters checked: " << rep.parameters_checked << "\n"
              << "max relative error: " << qrl::format_double(rep.max_relative_error) << "\n";
    if (rep.vacuous) {
        std::cout << "PASS (vacuous: no trials run)\n";
        return exit_ok;
    }
    std::cout << (rep.passed ? "PASS" : "FAIL") << " (threshold " << qrl::format_double(opt.threshold) << ")\n";
    return rep.passed ? exit_ok : exit_runtime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum reinforcement learning toolkit"};
    app.set_version_flag("--version", std::string(qrl::toolkit_version));
    app.require_subcommand(1);

    Globals g;
    std::uint64_t seed = 0;
    std::string out_dir;
    auto* seed_opt = app.add_option("--seed", seed, "Override the random seed")->check(CLI::NonNegativeNumber);
    auto* out_opt = app.add_option("--out-dir", out_dir, "Directory for output artifacts");
    app.add_option("--config", g.config, "Experiment config (JSON, comments allowed)");

    auto* train = app.add_subcommand("train", "Train a DDPG agent on an eigen or stategen task");
    std::string resume;
    train->add_option("--resume", resume, "Continue from a checkpoint");
    std::size_t stop_after = 0;
    auto* stop_opt = train->add_option("--stop-after", stop_after, "Stop once this many episodes are done in total");

    auto* eval = app.add_subcommand("eval", "Evaluate a trained policy on Haar-random initial states");
    std::string ck_path;
    std::size_t states = 0, steps = 0;
    eval->add_option("--checkpoint", ck_path, "Checkpoint written by train")->required();
    auto* states_opt = eval->add_option("--states", states, "Number of initial states");
    auto* steps_opt = eval->add_option("--steps", steps, "Steps per trajectory");

    auto* lake = app.add_subcommand("frozenlake", "Train tabular Q-learning on a Frozen Lake map");
    std::string map_path;
    lake->add_option("--map", map_path, "Map file of S/F/H/G rows");

    auto* grad = app.add_subcommand("gradcheck", "Compare parameter-shift gradients with finite differences");
    qrl::GradcheckOptions gopt;
    grad->add_option("--qubits", gopt.max_qubits, "Maximum qubit count")->check(CLI::Range(1, 4));
    grad->add_option("--layers", gopt.max_layers, "Maximum layer count")->check(CLI::Range(1, 4));
    grad->add_option("--trials", gopt.trials, "Random instances");
    grad->add_option("--threshold", gopt.threshold, "Failure threshold on the relative error");

    for (auto* sub : {train, eval, lake, grad}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }
    if (*seed_opt) g.seed = seed;
    if (*out_opt) g.out_dir = out_dir;

    try {
        if (*train) return cmd_train(g, resume, *stop_opt ? std::optional(stop_after) : std::nullopt);
        if (*eval)
            return cmd_eval(g, ck_path, *states_opt ? std::optional(states) : std::nullopt,
                            *steps_opt ? std::optional(steps) : std::nullopt);
        if (*lake) return cmd_frozenlake(g, map_path);
        if (*grad) return cmd_gradcheck(g, gopt);
    } catch (const qrl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}
