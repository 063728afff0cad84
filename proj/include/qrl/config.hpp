// config.hpp
// Experiment configuration: a JSON document (comments allowed) parsed
// strictly. Unknown keys are errors; absent keys take defaults.

#pragma once

#include "qrl/ddpg.hpp"
#include "qrl/environments.hpp"
#include "qrl/io.hpp"
#include "qrl/qlearning.hpp"

#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrl {

// Raised for malformed or inconsistent configuration; `key` names the
// offending dotted path when there is one.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : "config key '" + key + "': " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class Task { eigen, stategen, frozenlake };

inline std::string to_string(Task t) {
    switch (t) {
    case Task::eigen: return "eigen";
    case Task::stategen: return "stategen";
    case Task::frozenlake: return "frozenlake";
    }
    return "eigen";
}

struct HamiltonianSpec {
    double sx = 0.13;
    double sy = 0.28;
    double sz = 0.95;
    double lambda_bar = 0.0;
    double delta = 0.1;
};

struct OverlapSpec {
    bool shots_mode = false;
    std::size_t shots = 10000;
    std::size_t phase_qubits = 6;
};

struct EvaluationSpec {
    std::size_t states = 200;
    std::size_t steps = 50;
};

struct ExperimentConfig {
    Task task = Task::eigen;
    std::uint64_t seed = 2;
    std::string out_dir = "out";
    HamiltonianSpec hamiltonian;
    std::vector<complex> target_state{1.0, 0.0};
    OverlapSpec overlap;
    DdpgHyperparams ddpg;
    EvaluationSpec evaluation;
    std::string map_path; // empty: built-in classic map
    QLearningConfig qlearning;
};

namespace detail {

class Reader {
public:
    Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (const char* k : keys) ok = ok || it.key() == k;
            if (!ok) throw ConfigError(key(it.key()), "unknown key");
        }
    }

    bool has(const char* k) const { return j_.contains(k); }
    Reader child(const char* k) const { return Reader(j_.at(k), key(k)); }
    const nlohmann::json& raw(const char* k) const { return j_.at(k); }
    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    void number(const char* k, double& out) const {
        if (!has(k)) return;
        if (!j_.at(k).is_number()) throw ConfigError(key(k), "expected a number");
        out = j_.at(k).get<double>();
    }
    template <typename Int>
    void integer(const char* k, Int& out) const {
        if (!has(k)) return;
        const auto& v = j_.at(k);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError(key(k), "expected a non-negative integer");
        out = v.get<Int>();
    }
    void string(const char* k, std::string& out) const {
        if (!has(k)) return;
        if (!j_.at(k).is_string()) throw ConfigError(key(k), "expected a string");
        out = j_.at(k).get<std::string>();
    }

private:
    const nlohmann::json& j_;
    std::string path_;
};

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& doc) {
    ExperimentConfig c;
    detail::Reader r(doc, "");
    r.allow({"task", "seed", "out_dir", "hamiltonian", "target_state", "overlap", "ddpg", "evaluation", "frozenlake"});

    std::string task = to_string(c.task);
    r.string("task", task);
    if (task == "eigen") c.task = Task::eigen;
    else if (task == "stategen") c.task = Task::stategen;
    else if (task == "frozenlake") c.task = Task::frozenlake;
    else throw ConfigError("task", "expected one of eigen, stategen, frozenlake; got '" + task + "'");
    r.integer("seed", c.seed);
    r.string("out_dir", c.out_dir);

    if (r.has("hamiltonian")) {
        auto h = r.child("hamiltonian");
        h.allow({"sx", "sy", "sz", "lambda_bar", "delta"});
        h.number("sx", c.hamiltonian.sx);
        h.number("sy", c.hamiltonian.sy);
        h.number("sz", c.hamiltonian.sz);
        h.number("lambda_bar", c.hamiltonian.lambda_bar);
        h.number("delta", c.hamiltonian.delta);
    }
    if (r.has("target_state")) {
        auto t = r.child("target_state");
        t.allow({"re", "im"});
        try {
            const auto s = state_from_json(r.raw("target_state"), true);
            c.target_state.assign(s.amplitudes().begin(), s.amplitudes().end());
        } catch (const std::exception& e) {
            throw ConfigError("target_state", e.what());
        }
    }
    if (r.has("overlap")) {
        auto o = r.child("overlap");
        o.allow({"mode", "shots", "phase_qubits"});
        std::string mode = c.overlap.shots_mode ? "shots" : "exact";
        o.string("mode", mode);
        if (mode != "exact" && mode != "shots") throw ConfigError("overlap.mode", "expected 'exact' or 'shots'");
        c.overlap.shots_mode = mode == "shots";
        o.integer("shots", c.overlap.shots);
        o.integer("phase_qubits", c.overlap.phase_qubits);
        if (c.overlap.shots == 0) throw ConfigError("overlap.shots", "must be positive");
    }
    if (r.has("ddpg")) {
        auto d = r.child("ddpg");
        d.allow({"gamma", "tau", "batch_size", "buffer_capacity", "learning_rate", "noise_scale", "episodes",
                 "steps_per_episode", "layers_policy", "layers_q", "action_scale"});
        auto& hp = c.ddpg;
        d.number("gamma", hp.gamma);
        d.number("tau", hp.tau);
        d.integer("batch_size", hp.batch_size);
        d.integer("buffer_capacity", hp.buffer_capacity);
        d.number("learning_rate", hp.learning_rate);
        d.number("noise_scale", hp.noise_scale);
        d.integer("episodes", hp.episodes);
        d.integer("steps_per_episode", hp.steps_per_episode);
        d.integer("layers_policy", hp.layers_policy);
        d.integer("layers_q", hp.layers_q);
        d.number("action_scale", hp.action_scale);
    }
    try {
        c.ddpg.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(':');
        throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
    }
    if (r.has("evaluation")) {
        auto e = r.child("evaluation");
        e.allow({"states", "steps"});
        e.integer("states", c.evaluation.states);
        e.integer("steps", c.evaluation.steps);
    }
    if (r.has("frozenlake")) {
        auto f = r.child("frozenlake");
        f.allow({"map", "learning_rate", "discount", "epsilon_start", "epsilon_end", "episodes", "max_steps"});
        f.string("map", c.map_path);
        f.number("learning_rate", c.qlearning.learning_rate);
        f.number("discount", c.qlearning.discount);
        f.number("epsilon_start", c.qlearning.epsilon_start);
        f.number("epsilon_end", c.qlearning.epsilon_end);
        f.integer("episodes", c.qlearning.episodes);
        f.integer("max_steps", c.qlearning.max_steps);
        for (auto [k, v] : {std::pair{"epsilon_start", c.qlearning.epsilon_start},
                            std::pair{"epsilon_end", c.qlearning.epsilon_end}})
            if (v < 0.0 || v > 1.0) throw ConfigError(std::string("frozenlake.") + k, "must lie in [0, 1]");
    }
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("malformed config: ") + e.what());
    }
    return parse_config(doc);
}

// A relative map path is taken relative to the config file's directory.
inline ExperimentConfig load_config(const std::string& path) {
    auto c = parse_config_text(read_text_file(path));
    if (!c.map_path.empty() && std::filesystem::path(c.map_path).is_relative())
        c.map_path = (std::filesystem::path(path).parent_path() / c.map_path).lexically_normal().string();
    return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    const auto& hp = c.ddpg;
    const auto target = StateVector::from_amplitudes(c.target_state, true);
    return {
        {"task", to_string(c.task)},
        {"seed", c.seed},
        {"out_dir", c.out_dir},
        {"hamiltonian",
         {{"sx", c.hamiltonian.sx},
          {"sy", c.hamiltonian.sy},
          {"sz", c.hamiltonian.sz},
          {"lambda_bar", c.hamiltonian.lambda_bar},
          {"delta", c.hamiltonian.delta}}},
        {"target_state", state_to_json(target)},
        {"overlap",
         {{"mode", c.overlap.shots_mode ? "shots" : "exact"},
          {"shots", c.overlap.shots},
          {"phase_qubits", c.overlap.phase_qubits}}},
        {"ddpg",
         {{"gamma", hp.gamma},
          {"tau", hp.tau},
          {"batch_size", hp.batch_size},
          {"buffer_capacity", hp.buffer_capacity},
          {"learning_rate", hp.learning_rate},
          {"noise_scale", hp.noise_scale},
          {"episodes", hp.episodes},
          {"steps_per_episode", hp.steps_per_episode},
          {"layers_policy", hp.layers_policy},
          {"layers_q", hp.layers_q},
          {"action_scale", hp.action_scale}}},
        {"evaluation", {{"states", c.evaluation.states}, {"steps", c.evaluation.steps}}},
        {"frozenlake",
         {{"map", c.map_path},
          {"learning_rate", c.qlearning.learning_rate},
          {"discount", c.qlearning.discount},
          {"epsilon_start", c.qlearning.epsilon_start},
          {"epsilon_end", c.qlearning.epsilon_end},
          {"episodes", c.qlearning.episodes},
          {"max_steps", c.qlearning.max_steps}}},
    };
}

inline EigenEnvConfig eigen_env_config(const ExperimentConfig& c) {
    EigenEnvConfig e;
    e.hamiltonian = Hamiltonian::from_bloch(c.hamiltonian.sx, c.hamiltonian.sy, c.hamiltonian.sz).matrix();
    e.lambda_bar = c.hamiltonian.lambda_bar;
    e.delta = c.hamiltonian.delta;
    e.phase_qubits = c.overlap.phase_qubits;
    if (c.overlap.shots_mode) e.overlap_mode = ShotOverlap{c.overlap.shots};
    e.max_steps = c.ddpg.steps_per_episode;
    return e;
}

inline StateGenConfig state_gen_config(const ExperimentConfig& c) {
    return {StateVector::from_amplitudes(c.target_state, true), c.ddpg.steps_per_episode};
}

} // namespace qrl
