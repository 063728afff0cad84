// environments.hpp
// Continuous-action environments. An action is a vector of 3n angles that
// applies one variational layer U_ENT V(theta) to the environment register.
// The reward is the increase in overlap with the target state.

#pragma once

#include "qrl/circuit.hpp"
#include "qrl/phase_estimation.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace qrl {

struct ExactOverlap {};
struct ShotOverlap {
    std::size_t shots = 10000;
};
using OverlapMode = std::variant<ExactOverlap, ShotOverlap>;

struct StepResult {
    StateVector next_state;
    double reward = 0.0;
    double overlap = 0.0;
    bool terminal = false;
};

struct EigenEnvConfig {
    DenseMatrix hamiltonian;
    double lambda_bar = 0.0;
    double delta = 0.1;
    std::size_t phase_qubits = 6;
    OverlapMode overlap_mode = ExactOverlap{};
    std::size_t max_steps = 20;
};

// Validated eigenvalue problem: the Hamiltonian, the unique target
// eigenvalue in [lambda_bar - delta, lambda_bar + delta] and its eigenvector.
class EigenProblem {
public:
    explicit EigenProblem(const EigenEnvConfig& config)
        : hamiltonian_(config.hamiltonian), config_(config), target_state_(1) {
        if (config.delta <= 0.0) throw std::invalid_argument("EigenEnvConfig: delta must be positive");
        if (config.phase_qubits == 0 || config.phase_qubits > 16)
            throw std::invalid_argument("EigenEnvConfig: phase_qubits must be in [1, 16]");
        if (config.max_steps == 0) throw std::invalid_argument("EigenEnvConfig: max_steps must be positive");
        if (auto* s = std::get_if<ShotOverlap>(&config.overlap_mode); s && s->shots == 0)
            throw std::invalid_argument("EigenEnvConfig: shot count must be positive");

        std::vector<std::size_t> hits;
        for (std::size_t k = 0; k < hamiltonian_.dim(); ++k) {
            const double l = hamiltonian_.eigenvalue(k);
            if (l >= config.lambda_bar - config.delta && l <= config.lambda_bar + config.delta) hits.push_back(k);
        }
        if (hits.size() != 1) {
            std::ostringstream os;
            os << "EigenEnvConfig: expected exactly one eigenvalue in [" << config.lambda_bar - config.delta << ", "
               << config.lambda_bar + config.delta << "], found " << hits.size();
            throw std::invalid_argument(os.str());
        }
        target_index_ = hits.front();
        target_bin_ = phase_bin(target_eigenvalue(), config.phase_qubits);
        for (std::size_t k = 0; k < hamiltonian_.dim(); ++k) {
            if (k == target_index_) continue;
            if (phase_bin(hamiltonian_.eigenvalue(k), config.phase_qubits) == target_bin_) {
                std::ostringstream os;
                os << "EigenEnvConfig: eigenvalues " << target_eigenvalue() << " and " << hamiltonian_.eigenvalue(k)
                   << " share phase bin " << target_bin_ << " at q = " << config.phase_qubits;
                throw std::invalid_argument(os.str());
            }
        }
        target_state_ = hamiltonian_.eigenvector(target_index_);
    }

    const Hamiltonian& hamiltonian() const { return hamiltonian_; }
    const EigenEnvConfig& config() const { return config_; }
    std::size_t n_qubits() const { return hamiltonian_.n_qubits(); }
    std::size_t target_index() const { return target_index_; }
    double target_eigenvalue() const { return hamiltonian_.eigenvalue(target_index_); }
    std::size_t target_bin() const { return target_bin_; }
    const StateVector& target_state() const { return target_state_; }

private:
    Hamiltonian hamiltonian_;
    EigenEnvConfig config_;
    std::size_t target_index_ = 0;
    std::size_t target_bin_ = 0;
    StateVector target_state_;
};

// |<state|u_0>|^2 exactly, or as the frequency of the target phase bin over
// K phase-estimation measurements.
inline double estimate_overlap(const StateVector& state, const EigenProblem& problem, RandomSource& rng) {
    if (const auto* shots = std::get_if<ShotOverlap>(&problem.config().overlap_mode)) {
        const auto outcomes = phase_estimation(state, problem.hamiltonian(), problem.config().phase_qubits);
        std::vector<double> probs;
        probs.reserve(outcomes.size());
        for (const auto& o : outcomes) probs.push_back(o.probability);
        const auto counts = sample_counts(std::span<const double>(probs), shots->shots, rng);
        return static_cast<double>(counts[problem.target_bin()]) / static_cast<double>(shots->shots);
    }
    return overlap_probability(state, problem.target_state());
}

inline std::pair<StateVector, double> eigen_env_reset(const EigenProblem& problem,
                                                      const std::optional<StateVector>& initial,
                                                      RandomSource& rng) {
    StateVector s = initial ? *initial : haar_random_state(problem.n_qubits(), rng);
    if (s.n_qubits() != problem.n_qubits())
        throw std::invalid_argument("eigen_env_reset: initial state has wrong qubit count");
    const double p0 = estimate_overlap(s, problem, rng);
    return {std::move(s), p0};
}

// One environment transition. `step_index` is the zero-based index of this
// step within the episode.
inline StepResult eigen_env_step(const StateVector& current, double p_current, std::span<const double> theta,
                                 const EigenProblem& problem, std::size_t step_index, RandomSource& rng) {
    StateVector next = apply_layer(current, theta);
    const double p = estimate_overlap(next, problem, rng);
    return {std::move(next), p - p_current, p, step_index + 1 >= problem.config().max_steps};
}

struct StateGenConfig {
    StateVector target{1};
    std::size_t max_steps = 20;
};

// Target-state generation: overlap is <s|M_d|s> with M_d = |s_d><s_d|.
class StateGenProblem {
public:
    explicit StateGenProblem(StateGenConfig config)
        : config_(std::move(config)), projector_(Observable::projector(config_.target)) {
        if (std::abs(config_.target.norm_squared() - 1.0) > 1e-9)
            throw std::invalid_argument("StateGenConfig: target not normalized");
        if (config_.max_steps == 0) throw std::invalid_argument("StateGenConfig: max_steps must be positive");
    }

    const StateGenConfig& config() const { return config_; }
    std::size_t n_qubits() const { return config_.target.n_qubits(); }
    const StateVector& target_state() const { return config_.target; }
    double overlap(const StateVector& s) const { return projector_.expectation(s); }

private:
    StateGenConfig config_;
    Observable projector_;
};

inline StepResult state_gen_env_step(const StateVector& current, double p_current, std::span<const double> theta,
                                     const StateGenProblem& problem, std::size_t step_index) {
    StateVector next = apply_layer(current, theta);
    const double p = problem.overlap(next);
    return {std::move(next), p - p_current, p, step_index + 1 >= problem.config().max_steps};
}

// Stateful episode wrapper around a problem. One instance per thread.
template <typename Problem>
class OverlapEnvironment {
public:
    explicit OverlapEnvironment(Problem problem) : problem_(std::move(problem)), state_(problem_.n_qubits()) {}

    const Problem& problem() const { return problem_; }
    std::size_t n_qubits() const { return problem_.n_qubits(); }
    std::size_t max_steps() const { return problem_.config().max_steps; }
    std::size_t action_size() const { return angles_per_qubit * n_qubits(); }
    const StateVector& state() const { return state_; }
    double current_overlap() const { return overlap_; }
    std::size_t step_count() const { return steps_; }
    bool done() const { return done_; }

    double overlap(const StateVector& s, RandomSource& rng) const {
        if constexpr (std::is_same_v<Problem, EigenProblem>)
            return estimate_overlap(s, problem_, rng);
        else {
            (void)rng;
            return problem_.overlap(s);
        }
    }

    const StateVector& reset(RandomSource& rng, const std::optional<StateVector>& initial = std::nullopt) {
        state_ = initial ? *initial : haar_random_state(n_qubits(), rng);
        if (state_.n_qubits() != n_qubits()) throw std::invalid_argument("reset: initial state has wrong qubit count");
        overlap_ = overlap(state_, rng);
        steps_ = 0;
        done_ = false;
        return state_;
    }

    StepResult step(std::span<const double> theta, RandomSource& rng) {
        if (done_) throw std::logic_error("step: episode already terminated; call reset");
        StepResult r = [&] {
            if constexpr (std::is_same_v<Problem, EigenProblem>)
                return eigen_env_step(state_, overlap_, theta, problem_, steps_, rng);
            else {
                (void)rng;
                return state_gen_env_step(state_, overlap_, theta, problem_, steps_);
            }
        }();
        state_ = r.next_state;
        overlap_ = r.overlap;
        ++steps_;
        done_ = r.terminal;
        return r;
    }

private:
    Problem problem_;
    StateVector state_;
    double overlap_ = 0.0;
    std::size_t steps_ = 0;
    bool done_ = false;
};

using EigenEnvironment = OverlapEnvironment<EigenProblem>;
using StateGenEnvironment = OverlapEnvironment<StateGenProblem>;

} // namespace qrl
