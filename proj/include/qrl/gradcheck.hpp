// gradcheck.hpp
// Compares parameter-shift gradients with central finite differences on
// random circuits, inputs and Pauli-string observables.

#pragma once

#include "qrl/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qrl {

struct GradcheckOptions {
    std::size_t max_qubits = 3;
    std::size_t max_layers = 3;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double step = 1e-4;
    double threshold = 1e-5;
    // Denominator floor of the relative error, so gradients that vanish
    // analytically are compared on an absolute scale.
    double scale_floor = 1e-4;
};

struct GradcheckReport {
    std::size_t trials = 0;
    std::size_t parameters_checked = 0;
    double max_relative_error = 0.0;
    bool passed = true;
    bool vacuous = false;
};

inline double central_difference(const StateVector& input, CircuitParameters params, const Observable& obs,
                                 std::size_t flat_index, double h) {
    const double x = params.flat()[flat_index];
    params.flat()[flat_index] = x + h;
    const double plus = evaluate_expectation(input, params, obs);
    params.flat()[flat_index] = x - h;
    const double minus = evaluate_expectation(input, params, obs);
    return (plus - minus) / (2.0 * h);
}

inline double relative_error(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline Observable random_pauli_string(std::size_t n_qubits, RandomSource& rng) {
    std::string ops(n_qubits, 'I');
    while (ops.find_first_not_of('I') == std::string::npos)
        for (auto& c : ops) c = "IXYZ"[rng.index(4)];
    return Observable::pauli(ops);
}

inline GradcheckReport run_gradcheck(const GradcheckOptions& opt) {
    if (opt.max_qubits == 0 || opt.max_layers == 0)
        throw std::invalid_argument("gradcheck: qubit and layer bounds must be positive");
    GradcheckReport rep;
    rep.trials = opt.trials;
    rep.vacuous = opt.trials == 0;
    RandomSource rng(opt.seed);
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
        const std::size_t n = 1 + rng.index(opt.max_qubits);
        const std::size_t layers = 1 + rng.index(opt.max_layers);
        const auto params = CircuitParameters::random(n, layers, rng);
        const auto input = haar_random_state(n, rng);
        const auto obs = random_pauli_string(n, rng);
        const auto grad = full_gradient(input, params, obs);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            const double fd = central_difference(input, params, obs, i, opt.step);
            rep.max_relative_error = std::max(rep.max_relative_error, relative_error(grad[i], fd, opt.scale_floor));
            ++rep.parameters_checked;
        }
    }
    rep.passed = rep.max_relative_error <= opt.threshold;
    return rep;
}

} // namespace qrl
