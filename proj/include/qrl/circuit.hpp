// circuit.hpp
// Layered variational circuit D = D^(L) ... D^(1), each layer being
// U_ENT * V^(k)(theta), with
//   V^(k) = (x)_l R_x(theta_{3l}) R_z(theta_{3l+1}) R_x(theta_{3l+2})   (zero-based)
//   U_ENT = CNOT chain (0,1), (1,2), ..., (n-2, n-1), applied in that order.
// Expectations of observables after the circuit are the network outputs, and
// their gradients come from the parameter-shift rule.

#pragma once

#include "qrl/statevector.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrl {

inline constexpr std::size_t angles_per_qubit = 3;

// Angles of all layers stored contiguously, layer-major.
class CircuitParameters {
public:
    CircuitParameters() = default;
    CircuitParameters(std::size_t n_qubits, std::size_t n_layers)
        : n_qubits_(n_qubits), n_layers_(n_layers), angles_(n_layers * angles_per_qubit * n_qubits, 0.0) {
        if (n_qubits == 0) throw std::invalid_argument("CircuitParameters: need at least one qubit");
    }
    CircuitParameters(std::size_t n_qubits, std::size_t n_layers, std::vector<double> angles)
        : CircuitParameters(n_qubits, n_layers) {
        if (angles.size() != angles_.size())
            throw std::invalid_argument("CircuitParameters: expected " + std::to_string(angles_.size()) +
                                        " angles, got " + std::to_string(angles.size()));
        angles_ = std::move(angles);
    }

    static CircuitParameters random(std::size_t n_qubits, std::size_t n_layers, RandomSource& rng,
                                    double half_width = pi) {
        CircuitParameters p(n_qubits, n_layers);
        for (auto& a : p.angles_) a = rng.uniform(-half_width, half_width);
        return p;
    }

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t n_layers() const { return n_layers_; }
    std::size_t layer_size() const { return angles_per_qubit * n_qubits_; }
    std::size_t size() const { return angles_.size(); }

    std::span<const double> layer(std::size_t k) const {
        check_layer(k);
        return std::span<const double>(angles_).subspan(k * layer_size(), layer_size());
    }
    std::span<double> layer(std::size_t k) {
        check_layer(k);
        return std::span<double>(angles_).subspan(k * layer_size(), layer_size());
    }

    std::size_t flat_index(std::size_t layer, std::size_t position) const {
        check_layer(layer);
        if (position >= layer_size()) throw std::out_of_range("CircuitParameters: position out of range");
        return layer * layer_size() + position;
    }

    double& at(std::size_t layer, std::size_t position) { return angles_[flat_index(layer, position)]; }
    double at(std::size_t layer, std::size_t position) const { return angles_[flat_index(layer, position)]; }

    std::span<const double> flat() const { return angles_; }
    std::span<double> flat() { return angles_; }

    bool same_shape(const CircuitParameters& o) const {
        return n_qubits_ == o.n_qubits_ && n_layers_ == o.n_layers_;
    }

    friend bool operator==(const CircuitParameters&, const CircuitParameters&) = default;

private:
    void check_layer(std::size_t k) const {
        if (k >= n_layers_) throw std::out_of_range("CircuitParameters: layer out of range");
    }

    std::size_t n_qubits_ = 0;
    std::size_t n_layers_ = 0;
    std::vector<double> angles_;
};

// Ordered observables B_1..B_m, pairwise trace-orthogonal.
class ObservableSet {
public:
    explicit ObservableSet(std::vector<Observable> observables, double tol = 1e-10)
        : obs_(std::move(observables)) {
        if (obs_.empty()) throw std::invalid_argument("ObservableSet: empty");
        for (const auto& o : obs_)
            if (o.n_qubits() != obs_.front().n_qubits())
                throw std::invalid_argument("ObservableSet: observables differ in size");
        for (std::size_t i = 0; i < obs_.size(); ++i)
            for (std::size_t j = i + 1; j < obs_.size(); ++j)
                if (std::abs(trace_product(obs_[i], obs_[j])) > tol)
                    throw std::invalid_argument("ObservableSet: observables " + std::to_string(i) + " and " +
                                                std::to_string(j) + " are not trace-orthogonal");
    }

    // (X_l, Y_l, Z_l) for each qubit l: 3n outputs. Distinct Pauli strings are
    // trace-orthogonal, so no dense check is needed.
    static ObservableSet local_paulis(std::size_t n_qubits) {
        std::vector<Observable> obs;
        obs.reserve(angles_per_qubit * n_qubits);
        for (std::size_t l = 0; l < n_qubits; ++l)
            for (char c : {'X', 'Y', 'Z'}) obs.push_back(Observable::single(n_qubits, l, c));
        ObservableSet set;
        set.obs_ = std::move(obs);
        return set;
    }

    std::size_t size() const { return obs_.size(); }
    std::size_t n_qubits() const { return obs_.front().n_qubits(); }
    const Observable& operator[](std::size_t i) const { return obs_[i]; }
    auto begin() const { return obs_.begin(); }
    auto end() const { return obs_.end(); }

private:
    ObservableSet() = default;

    std::vector<Observable> obs_;
};

inline void apply_layer_inplace(StateVector& state, std::span<const double> angles) {
    const std::size_t n = state.n_qubits();
    if (angles.size() != angles_per_qubit * n)
        throw std::invalid_argument("apply_layer: expected " + std::to_string(angles_per_qubit * n) +
                                    " angles, got " + std::to_string(angles.size()));
    for (std::size_t l = 0; l < n; ++l) {
        const auto g = gates::rx(angles[3 * l]) * gates::rz(angles[3 * l + 1]) * gates::rx(angles[3 * l + 2]);
        state.apply(g, l);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) state.apply_cnot(k, k + 1);
}

inline StateVector apply_layer(StateVector state, std::span<const double> angles) {
    apply_layer_inplace(state, angles);
    return state;
}

inline StateVector apply_circuit(StateVector state, const CircuitParameters& params) {
    if (params.n_layers() > 0 && params.n_qubits() != state.n_qubits())
        throw std::invalid_argument("apply_circuit: parameters sized for " + std::to_string(params.n_qubits()) +
                                    " qubits, state has " + std::to_string(state.n_qubits()));
    for (std::size_t k = 0; k < params.n_layers(); ++k) apply_layer_inplace(state, params.layer(k));
    return state;
}

inline double evaluate_expectation(const StateVector& input, const CircuitParameters& params,
                                   const Observable& obs) {
    return obs.expectation(apply_circuit(input, params));
}

// C_j = <input| D^dagger B_j D |input>
inline std::vector<double> evaluate_network(const StateVector& input, const CircuitParameters& params,
                                            const ObservableSet& obs) {
    const StateVector out = apply_circuit(input, params);
    std::vector<double> c;
    c.reserve(obs.size());
    for (const auto& b : obs) c.push_back(b.expectation(out));
    return c;
}

namespace detail {

template <typename F>
auto shifted(CircuitParameters params, std::size_t flat, double shift, F&& f) {
    params.flat()[flat] += shift;
    return f(params);
}

} // namespace detail

inline double parameter_shift_gradient(const StateVector& input, const CircuitParameters& params,
                                       const Observable& obs, std::size_t layer, std::size_t position) {
    const std::size_t idx = params.flat_index(layer, position);
    auto eval = [&](const CircuitParameters& p) { return evaluate_expectation(input, p, obs); };
    const double plus = detail::shifted(params, idx, pi / 2, eval);
    const double minus = detail::shifted(params, idx, -pi / 2, eval);
    return (plus - minus) / 2;
}

// Gradient over all 3nL angles, flat layer-major order.
inline std::vector<double> full_gradient(const StateVector& input, const CircuitParameters& params,
                                         const Observable& obs) {
    std::vector<double> g(params.size());
    auto eval = [&](const CircuitParameters& p) { return evaluate_expectation(input, p, obs); };
    for (std::size_t i = 0; i < params.size(); ++i)
        g[i] = (detail::shifted(params, i, pi / 2, eval) - detail::shifted(params, i, -pi / 2, eval)) / 2;
    return g;
}

// Jacobian dC_j / dtheta_p for every output of the set; row j, column p,
// stored row-major. Each shifted circuit is simulated once for all outputs.
inline std::vector<double> network_jacobian(const StateVector& input, const CircuitParameters& params,
                                            const ObservableSet& obs) {
    const std::size_t m = obs.size(), np = params.size();
    std::vector<double> jac(m * np);
    auto eval = [&](const CircuitParameters& p) { return evaluate_network(input, p, obs); };
    for (std::size_t i = 0; i < np; ++i) {
        const auto plus = detail::shifted(params, i, pi / 2, eval);
        const auto minus = detail::shifted(params, i, -pi / 2, eval);
        for (std::size_t j = 0; j < m; ++j) jac[j * np + i] = (plus[j] - minus[j]) / 2;
    }
    return jac;
}

} // namespace qrl
