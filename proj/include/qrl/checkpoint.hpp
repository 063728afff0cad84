// checkpoint.hpp
// Versioned JSON checkpoint of a DDPG training run. Besides the four
// networks it stores the optimizer moments, replay buffer and engine state,
// so a resumed run continues exactly where the saved one stopped.

#pragma once

#include "qrl/config.hpp"
#include "qrl/ddpg.hpp"
#include "qrl/io.hpp"

#include <string>

namespace qrl {

inline constexpr std::string_view checkpoint_format = "qrl-ddpg-checkpoint";
inline constexpr int checkpoint_version = 1;

struct Checkpoint {
    ExperimentConfig config;
    std::size_t n_qubits = 1;
    TrainerState trainer;
};

namespace detail {

inline nlohmann::json adam_to_json(const Adam& a) {
    return {{"t", a.t}, {"m", a.m}, {"v", a.v}};
}

inline Adam adam_from_json(const nlohmann::json& j, double lr) {
    Adam a;
    a.learning_rate = lr;
    a.t = j.at("t").get<std::uint64_t>();
    a.m = j.at("m").get<std::vector<double>>();
    a.v = j.at("v").get<std::vector<double>>();
    if (a.m.size() != a.v.size()) throw ConfigError("optimizer", "moment arrays differ in length");
    return a;
}

} // namespace detail

inline nlohmann::json checkpoint_to_json(const Checkpoint& c) {
    const auto& st = c.trainer;
    nlohmann::json buffer = nlohmann::json::array();
    for (const auto& t : st.buffer.records())
        buffer.push_back({{"state", state_to_json(t.state)},
                          {"action", t.action},
                          {"reward", t.reward},
                          {"next_state", state_to_json(t.next_state)},
                          {"terminal", t.terminal}});
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : st.history)
        history.push_back({{"episode", h.episode},
                           {"return", h.episode_return},
                           {"initial_overlap", h.initial_overlap},
                           {"final_overlap", h.final_overlap},
                           {"critic_loss", h.mean_critic_loss}});
    return {
        {"format", checkpoint_format},
        {"version", checkpoint_version},
        {"toolkit_version", toolkit_version},
        {"config", config_to_json(c.config)},
        {"seed", st.rng.seed()},
        {"n_qubits", c.n_qubits},
        {"episodes_done", st.episodes_done},
        {"train_steps", st.train_steps},
        {"networks",
         {{"policy", params_to_json(st.agent.policy)},
          {"q_net", params_to_json(st.agent.q_net)},
          {"target_policy", params_to_json(st.agent.target_policy)},
          {"target_q", params_to_json(st.agent.target_q)}}},
        {"optimizer",
         {{"critic", detail::adam_to_json(st.critic_optimizer)}, {"actor", detail::adam_to_json(st.actor_optimizer)}}},
        {"replay_buffer", buffer},
        {"rng_state", st.rng.save_state()},
        {"history", history},
    };
}

// Throws ConfigError for unsupported versions or networks whose shapes do
// not match the embedded configuration.
inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object() || j.value("format", std::string{}) != checkpoint_format)
            throw ConfigError("format", "not a qrl DDPG checkpoint");
        const int version = j.at("version").get<int>();
        if (version > checkpoint_version)
            throw ConfigError("version", "checkpoint version " + std::to_string(version) +
                                             " is newer than supported version " +
                                             std::to_string(checkpoint_version));
        if (version < 1) throw ConfigError("version", "invalid checkpoint version");

        Checkpoint c;
        c.config = parse_config(j.at("config"));
        c.n_qubits = j.at("n_qubits").get<std::size_t>();
        const auto& hp = c.config.ddpg;
        auto& st = c.trainer;
        st.hp = hp;

        const auto& nets = j.at("networks");
        auto load_net = [&](const char* name, std::size_t qubits, std::size_t layers) {
            CircuitParameters p;
            try {
                p = params_from_json(nets.at(name));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("networks.") + name, e.what());
            }
            if (p.n_qubits() != qubits || p.n_layers() != layers)
                throw ConfigError(std::string("networks.") + name,
                                  "shape " + std::to_string(p.n_qubits()) + " qubits x " +
                                      std::to_string(p.n_layers()) + " layers, expected " + std::to_string(qubits) +
                                      " x " + std::to_string(layers));
            return p;
        };
        const std::size_t qq = AgentParameters::q_register_qubits(c.n_qubits);
        st.agent.policy = load_net("policy", c.n_qubits, hp.layers_policy);
        st.agent.q_net = load_net("q_net", qq, hp.layers_q);
        st.agent.target_policy = load_net("target_policy", c.n_qubits, hp.layers_policy);
        st.agent.target_q = load_net("target_q", qq, hp.layers_q);

        st.critic_optimizer = detail::adam_from_json(j.at("optimizer").at("critic"), hp.learning_rate);
        st.actor_optimizer = detail::adam_from_json(j.at("optimizer").at("actor"), hp.learning_rate);
        if ((!st.critic_optimizer.m.empty() && st.critic_optimizer.m.size() != st.agent.q_net.size()) ||
            (!st.actor_optimizer.m.empty() && st.actor_optimizer.m.size() != st.agent.policy.size()))
            throw ConfigError("optimizer", "moment arrays do not match network sizes");

        st.buffer = ReplayBuffer(hp.buffer_capacity);
        for (const auto& t : j.at("replay_buffer")) {
            Transition tr{state_from_json(t.at("state")), t.at("action").get<std::vector<double>>(),
                          t.at("reward").get<double>(), state_from_json(t.at("next_state")),
                          t.at("terminal").get<bool>()};
            if (tr.state.n_qubits() != c.n_qubits || tr.action.size() != angles_per_qubit * c.n_qubits)
                throw ConfigError("replay_buffer", "transition shape does not match the networks");
            st.buffer.push(std::move(tr));
        }
        st.rng.restore_state(j.at("seed").get<std::uint64_t>(), j.at("rng_state").get<std::string>());
        st.episodes_done = j.at("episodes_done").get<std::size_t>();
        st.train_steps = j.at("train_steps").get<std::uint64_t>();
        for (const auto& h : j.at("history"))
            st.history.push_back({h.at("episode").get<std::size_t>(), h.at("return").get<double>(),
                                  h.at("initial_overlap").get<double>(), h.at("final_overlap").get<double>(),
                                  h.at("critic_loss").get<double>()});
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("", std::string("malformed checkpoint: ") + e.what());
    }
}

inline void save_checkpoint(const Checkpoint& c, const std::string& path) {
    write_text_file(path, checkpoint_to_json(c).dump(1) + "\n");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("malformed checkpoint: ") + e.what());
    }
    return checkpoint_from_json(j);
}

} // namespace qrl
