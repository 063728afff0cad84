// ddpg.hpp
// Quantum DDPG: a policy network and a Q network built from variational
// circuits, their slowly tracking target copies, experience replay, and the
// training and evaluation loops.
//
// Policy:  theta_j = scale * <s| D(eta)^dagger B_j D(eta) |s>, B_j = (X_l, Y_l, Z_l)
// Q value: Q(s, theta) = <s, theta| D(omega)^dagger B_Q D(omega) |s, theta>
//          with |theta> = (x)_j R_y(theta_j)|0> and B_Q = Z on qubit 0.

#pragma once

#include "qrl/circuit.hpp"
#include "qrl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrl {

struct DdpgHyperparams {
    double gamma = 0.9;
    double tau = 0.01;
    std::size_t batch_size = 16;
    std::size_t buffer_capacity = 5000;
    double learning_rate = 0.01;
    double noise_scale = 0.1 * pi;
    std::size_t episodes = 300;
    std::size_t steps_per_episode = 20;
    std::size_t layers_policy = 3;
    std::size_t layers_q = 3;
    double action_scale = pi;

    void validate() const {
        auto fail = [](const std::string& key, const std::string& why) {
            throw std::invalid_argument("ddpg." + key + ": " + why);
        };
        if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", "must lie in [0, 1]");
        if (!(tau > 0.0 && tau < 1.0)) fail("tau", "must lie in (0, 1)");
        if (batch_size == 0) fail("batch_size", "must be positive");
        if (buffer_capacity < batch_size) fail("buffer_capacity", "must be at least batch_size");
        if (!(learning_rate >= 0.0)) fail("learning_rate", "must be non-negative");
        if (!(noise_scale >= 0.0)) fail("noise_scale", "must be non-negative");
        if (steps_per_episode == 0) fail("steps_per_episode", "must be positive");
        if (layers_policy == 0) fail("layers_policy", "must be positive");
        if (layers_q == 0) fail("layers_q", "must be positive");
        if (!(action_scale > 0.0)) fail("action_scale", "must be positive");
    }
};

struct AgentParameters {
    CircuitParameters policy;
    CircuitParameters q_net;
    CircuitParameters target_policy;
    CircuitParameters target_q;

    // Random main networks; targets start as exact copies.
    static AgentParameters initialize(std::size_t n_qubits, const DdpgHyperparams& hp, RandomSource& rng) {
        AgentParameters a;
        a.policy = CircuitParameters::random(n_qubits, hp.layers_policy, rng);
        a.q_net = CircuitParameters::random(q_register_qubits(n_qubits), hp.layers_q, rng);
        a.target_policy = a.policy;
        a.target_q = a.q_net;
        return a;
    }

    // State register plus one qubit per action angle.
    static std::size_t q_register_qubits(std::size_t n_qubits) { return n_qubits + angles_per_qubit * n_qubits; }

    friend bool operator==(const AgentParameters&, const AgentParameters&) = default;
};

struct Transition {
    StateVector state;
    std::vector<double> action;
    double reward = 0.0;
    StateVector next_state;
    bool terminal = false;

    friend bool operator==(const Transition&, const Transition&) = default;
};

// Bounded FIFO; the oldest record is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }

    void push(Transition t) {
        if (records_.size() == capacity_) records_.pop_front();
        records_.push_back(std::move(t));
    }

    std::size_t size() const { return records_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::deque<Transition>& records() const { return records_; }

    // Uniform sampling with replacement.
    std::vector<Transition> sample(std::size_t count, RandomSource& rng) const {
        if (records_.empty()) throw std::logic_error("ReplayBuffer: sampling from an empty buffer");
        std::vector<Transition> batch;
        batch.reserve(count);
        for (std::size_t k = 0; k < count; ++k) batch.push_back(records_[rng.index(records_.size())]);
        return batch;
    }

private:
    std::size_t capacity_;
    std::deque<Transition> records_;
};

// Adaptive-moment gradient descent on a flat parameter array.
struct Adam {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    // params -= lr * m_hat / (sqrt(v_hat) + eps)
    void step(std::span<double> params, std::span<const double> grad) {
        if (params.size() != grad.size()) throw std::invalid_argument("Adam: gradient size mismatch");
        if (m.empty()) {
            m.assign(params.size(), 0.0);
            v.assign(params.size(), 0.0);
        }
        if (m.size() != params.size()) throw std::invalid_argument("Adam: parameter count changed");
        ++t;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            params[i] -= learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + epsilon);
        }
    }

    friend bool operator==(const Adam&, const Adam&) = default;
};

inline Observable default_q_observable(std::size_t state_qubits) {
    return Observable::single(AgentParameters::q_register_qubits(state_qubits), 0, 'Z');
}

inline std::vector<double> policy_action(const StateVector& state, const CircuitParameters& policy,
                                         double noise_scale, RandomSource& rng, double action_scale = pi) {
    if (policy.n_qubits() != state.n_qubits())
        throw std::invalid_argument("policy_action: policy sized for " + std::to_string(policy.n_qubits()) +
                                    " qubits, state has " + std::to_string(state.n_qubits()));
    auto theta = evaluate_network(state, policy, ObservableSet::local_paulis(state.n_qubits()));
    for (auto& t : theta) {
        t *= action_scale;
        if (noise_scale > 0.0) t += rng.normal(0.0, noise_scale);
        t = std::clamp(t, -pi, pi);
    }
    return theta;
}

// (x)_j R_y(theta_j)|0>
inline StateVector encode_action(std::span<const double> theta) {
    if (theta.empty()) throw std::invalid_argument("encode_action: empty action");
    std::vector<complex> amps(std::size_t{1} << theta.size(), 0.0);
    amps[0] = 1.0;
    StateVector s = StateVector::from_amplitudes(std::move(amps));
    for (std::size_t j = 0; j < theta.size(); ++j) s.apply(gates::ry(theta[j]), j);
    return s;
}

inline double q_value(const StateVector& state, std::span<const double> theta, const CircuitParameters& q_net,
                      const Observable& b_q) {
    if (theta.size() != angles_per_qubit * state.n_qubits())
        throw std::invalid_argument("q_value: action length does not match state");
    const StateVector joint = tensor(state, encode_action(theta));
    if (q_net.n_layers() > 0 && q_net.n_qubits() != joint.n_qubits())
        throw std::invalid_argument("q_value: Q network sized for " + std::to_string(q_net.n_qubits()) +
                                    " qubits, joint register has " + std::to_string(joint.n_qubits()));
    return evaluate_expectation(joint, q_net, b_q);
}

inline double q_value(const StateVector& state, std::span<const double> theta, const CircuitParameters& q_net) {
    return q_value(state, theta, q_net, default_q_observable(state.n_qubits()));
}

// y_i = r_i + gamma Q'(s_{i+1}, pi'(s_{i+1})), bootstrap dropped for terminal records.
inline std::vector<double> compute_targets(std::span<const Transition> batch, double gamma,
                                           const CircuitParameters& target_policy, const CircuitParameters& target_q,
                                           double action_scale = pi) {
    if (batch.empty()) throw std::invalid_argument("compute_targets: empty batch");
    std::vector<double> y;
    y.reserve(batch.size());
    RandomSource unused(0);
    for (const auto& t : batch) {
        double target = t.reward;
        if (!t.terminal && gamma != 0.0) {
            const auto a = policy_action(t.next_state, target_policy, 0.0, unused, action_scale);
            target += gamma * q_value(t.next_state, a, target_q);
        }
        y.push_back(target);
    }
    return y;
}

struct CriticGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};

// L = (1/G) sum_i (y_i - Q(s_i, theta_i))^2 and dL/domega with y held fixed.
inline CriticGradient critic_loss_gradient(std::span<const Transition> batch, std::span<const double> targets,
                                           const CircuitParameters& q_net) {
    if (batch.empty()) throw std::invalid_argument("critic: empty batch");
    if (targets.size() != batch.size()) throw std::invalid_argument("critic: target count mismatch");
    CriticGradient out;
    out.gradient.assign(q_net.size(), 0.0);
    const double g = static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& t = batch[i];
        const StateVector joint = tensor(t.state, encode_action(t.action));
        const Observable b_q = default_q_observable(t.state.n_qubits());
        const double residual = targets[i] - evaluate_expectation(joint, q_net, b_q);
        out.loss += residual * residual / g;
        const auto dq = full_gradient(joint, q_net, b_q);
        for (std::size_t p = 0; p < dq.size(); ++p) out.gradient[p] += -2.0 / g * residual * dq[p];
    }
    return out;
}

// One optimizer step on omega; returns the loss before the step.
inline double critic_update(std::span<const Transition> batch, AgentParameters& agent, const DdpgHyperparams& hp,
                            Adam& optimizer) {
    const auto y = compute_targets(batch, hp.gamma, agent.target_policy, agent.target_q, hp.action_scale);
    const auto cg = critic_loss_gradient(batch, y, agent.q_net);
    optimizer.learning_rate = hp.learning_rate;
    optimizer.step(agent.q_net.flat(), cg.gradient);
    return cg.loss;
}

// J(eta) = (1/G) sum_i Q(s_i, pi_eta(s_i)), noise-free policy.
inline double actor_objective(std::span<const Transition> batch, const CircuitParameters& policy,
                              const CircuitParameters& q_net, double action_scale = pi) {
    if (batch.empty()) throw std::invalid_argument("actor: empty batch");
    RandomSource unused(0);
    double j = 0.0;
    for (const auto& t : batch)
        j += q_value(t.state, policy_action(t.state, policy, 0.0, unused, action_scale), q_net);
    return j / static_cast<double>(batch.size());
}

// grad_eta J = (1/G) sum_i grad_theta Q |_{theta = pi(s_i)} . d theta / d eta.
// Both factors use the parameter-shift rule: on the R_y action encoding for
// grad_theta Q, and on the policy circuit for the Jacobian.
inline std::vector<double> actor_gradient(std::span<const Transition> batch, const CircuitParameters& policy,
                                          const CircuitParameters& q_net, double action_scale = pi) {
    if (batch.empty()) throw std::invalid_argument("actor: empty batch");
    const std::size_t np = policy.size();
    std::vector<double> grad(np, 0.0);
    for (const auto& t : batch) {
        const std::size_t n = t.state.n_qubits();
        const auto outputs = ObservableSet::local_paulis(n);
        const auto expectations = evaluate_network(t.state, policy, outputs);
        std::vector<double> theta(expectations.size());
        for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = action_scale * expectations[j];

        const auto jac = network_jacobian(t.state, policy, outputs);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            if (theta[j] < -pi || theta[j] > pi) continue; // clipped: flat in eta
            auto shifted = theta;
            shifted[j] = theta[j] + pi / 2;
            const double plus = q_value(t.state, shifted, q_net);
            shifted[j] = theta[j] - pi / 2;
            const double minus = q_value(t.state, shifted, q_net);
            const double dq_dtheta = (plus - minus) / 2;
            for (std::size_t p = 0; p < np; ++p) grad[p] += dq_dtheta * action_scale * jac[j * np + p];
        }
    }
    for (auto& g : grad) g /= static_cast<double>(batch.size());
    return grad;
}

// Gradient ascent on J.
inline void actor_update(std::span<const Transition> batch, AgentParameters& agent, const DdpgHyperparams& hp,
                         Adam& optimizer) {
    auto grad = actor_gradient(batch, agent.policy, agent.q_net, hp.action_scale);
    for (auto& g : grad) g = -g;
    optimizer.learning_rate = hp.learning_rate;
    optimizer.step(agent.policy.flat(), grad);
}

// target <- tau main + (1 - tau) target
inline CircuitParameters soft_update(const CircuitParameters& main, CircuitParameters target, double tau) {
    if (!main.same_shape(target)) throw std::invalid_argument("soft_update: shape mismatch");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau outside [0, 1]");
    auto dst = target.flat();
    const auto src = main.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = tau * src[i] + (1.0 - tau) * dst[i];
    return target;
}

struct EpisodeRecord {
    std::size_t episode = 0;
    double episode_return = 0.0;
    double initial_overlap = 0.0;
    double final_overlap = 0.0;
    double mean_critic_loss = 0.0;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

// Everything needed to continue training bit-for-bit.
struct TrainerState {
    DdpgHyperparams hp;
    AgentParameters agent;
    Adam critic_optimizer;
    Adam actor_optimizer;
    ReplayBuffer buffer{1};
    RandomSource rng{0};
    std::size_t episodes_done = 0;
    std::uint64_t train_steps = 0;
    std::vector<EpisodeRecord> history;

    static TrainerState create(std::size_t n_qubits, const DdpgHyperparams& hp, std::uint64_t seed) {
        hp.validate();
        TrainerState s;
        s.hp = hp;
        s.rng = RandomSource(seed);
        s.agent = AgentParameters::initialize(n_qubits, hp, s.rng);
        s.critic_optimizer.learning_rate = hp.learning_rate;
        s.actor_optimizer.learning_rate = hp.learning_rate;
        s.buffer = ReplayBuffer(hp.buffer_capacity);
        return s;
    }
};

// Exploration noise decays linearly to zero over the configured episodes.
inline double exploration_noise(const DdpgHyperparams& hp, std::size_t episode) {
    if (hp.episodes == 0) return 0.0;
    const double frac = static_cast<double>(episode) / static_cast<double>(hp.episodes);
    return hp.noise_scale * std::max(0.0, 1.0 - frac);
}

template <typename Env>
concept OverlapEnv = requires(Env env, const Env cenv, std::span<const double> theta, RandomSource& rng,
                              const StateVector& s) {
    { cenv.n_qubits() } -> std::convertible_to<std::size_t>;
    { env.reset(rng) } -> std::convertible_to<const StateVector&>;
    { env.step(theta, rng) } -> std::same_as<StepResult>;
    { cenv.current_overlap() } -> std::convertible_to<double>;
    { cenv.overlap(s, rng) } -> std::convertible_to<double>;
};

// One episode of the training loop. Episodes last steps_per_episode steps or
// until the environment reports a terminal state.
template <OverlapEnv Env>
EpisodeRecord run_training_episode(Env& env, TrainerState& st) {
    const auto& hp = st.hp;
    EpisodeRecord rec;
    rec.episode = st.episodes_done;
    env.reset(st.rng);
    rec.initial_overlap = env.current_overlap();
    const double noise = exploration_noise(hp, st.episodes_done);
    double loss_sum = 0.0;
    std::size_t updates = 0;
    for (std::size_t t = 0; t < hp.steps_per_episode; ++t) {
        const StateVector state = env.state();
        auto theta = policy_action(state, st.agent.policy, noise, st.rng, hp.action_scale);
        StepResult r = env.step(theta, st.rng);
        const bool terminal = r.terminal || t + 1 == hp.steps_per_episode;
        rec.episode_return += r.reward;
        rec.final_overlap = r.overlap;
        st.buffer.push(Transition{state, std::move(theta), r.reward, r.next_state, terminal});

        if (st.buffer.size() >= hp.batch_size) {
            const auto batch = st.buffer.sample(hp.batch_size, st.rng);
            loss_sum += critic_update(batch, st.agent, hp, st.critic_optimizer);
            actor_update(batch, st.agent, hp, st.actor_optimizer);
            st.agent.target_q = soft_update(st.agent.q_net, std::move(st.agent.target_q), hp.tau);
            st.agent.target_policy = soft_update(st.agent.policy, std::move(st.agent.target_policy), hp.tau);
            ++updates;
        }
        ++st.train_steps;
        if (terminal) break;
    }
    rec.mean_critic_loss = updates ? loss_sum / static_cast<double>(updates) : 0.0;
    ++st.episodes_done;
    st.history.push_back(rec);
    return rec;
}

// Runs episodes until hp.episodes have been completed in total.
template <OverlapEnv Env>
void train_ddpg(Env& env, TrainerState& st) {
    while (st.episodes_done < st.hp.episodes) run_training_episode(env, st);
}

template <OverlapEnv Env>
TrainerState train_ddpg(Env& env, const DdpgHyperparams& hp, std::uint64_t seed) {
    auto st = TrainerState::create(env.n_qubits(), hp, seed);
    train_ddpg(env, st);
    return st;
}

struct EvaluationResult {
    std::vector<double> mean;                    // p_bar_t, t = 0..steps
    std::vector<double> variance;                // population variance of p_t
    std::vector<std::vector<double>> trajectories; // [state][t]
};

// Drives each initial state with the deterministic policy for `steps`
// actions, recording the overlap after every step. Initial states are
// Haar-random unless supplied.
template <OverlapEnv Env>
EvaluationResult evaluate_policy(const Env& env, const CircuitParameters& policy, std::size_t n_initial_states,
                                 std::size_t steps, RandomSource& rng, double action_scale = pi,
                                 std::span<const StateVector> initial_states = {}) {
    EvaluationResult out;
    const std::size_t n_runs = initial_states.empty() ? n_initial_states : initial_states.size();
    out.trajectories.reserve(n_runs);
    for (std::size_t k = 0; k < n_runs; ++k) {
        StateVector s = initial_states.empty() ? haar_random_state(env.n_qubits(), rng) : initial_states[k];
        std::vector<double> traj;
        traj.reserve(steps + 1);
        traj.push_back(env.overlap(s, rng));
        for (std::size_t t = 0; t < steps; ++t) {
            const auto theta = policy_action(s, policy, 0.0, rng, action_scale);
            apply_layer_inplace(s, theta);
            traj.push_back(env.overlap(s, rng));
        }
        out.trajectories.push_back(std::move(traj));
    }
    out.mean.assign(steps + 1, 0.0);
    out.variance.assign(steps + 1, 0.0);
    if (n_runs == 0) return out;
    for (std::size_t t = 0; t <= steps; ++t) {
        double sum = 0.0;
        for (const auto& tr : out.trajectories) sum += tr[t];
        const double mean = sum / static_cast<double>(n_runs);
        double sq = 0.0;
        for (const auto& tr : out.trajectories) sq += (tr[t] - mean) * (tr[t] - mean);
        out.mean[t] = mean;
        out.variance[t] = sq / static_cast<double>(n_runs);
    }
    return out;
}

} // namespace qrl
