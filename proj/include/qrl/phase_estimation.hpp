// phase_estimation.hpp
// Hamiltonians with spectrum in [0, 1) and the phase-estimation circuit
// built on U = exp(2 pi i H): Hadamards on a q-qubit phase register,
// controlled powers U^(2^k), then an inverse QFT.

#pragma once

#include "qrl/statevector.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrl {

class Hamiltonian {
public:
    explicit Hamiltonian(DenseMatrix matrix, double tol = 1e-12) : matrix_(std::move(matrix)) {
        const auto rows = static_cast<std::size_t>(matrix_.rows());
        if (matrix_.rows() != matrix_.cols() || !is_power_of_two(rows) || rows < 2)
            throw std::invalid_argument("Hamiltonian: matrix must be square with power-of-two size");
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw std::invalid_argument("Hamiltonian: matrix is not Hermitian");
        Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(matrix_);
        if (solver.info() != Eigen::Success) throw std::runtime_error("Hamiltonian: eigensolver failed");
        eigenvalues_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();
        for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
            if (eigenvalues_(k) < 0.0 || eigenvalues_(k) >= 1.0)
                throw std::invalid_argument("Hamiltonian: eigenvalue " + std::to_string(eigenvalues_(k)) +
                                            " outside [0, 1)");
        }
        n_qubits_ = static_cast<std::size_t>(std::countr_zero(rows));
    }

    // H = (s_x X + s_y Y + s_z Z + I) / 4, spectrum (1 +- |s|) / 4.
    static Hamiltonian from_bloch(double sx, double sy, double sz) {
        DenseMatrix h(2, 2);
        h << 1.0 + sz, complex{sx, -sy}, complex{sx, sy}, 1.0 - sz;
        return Hamiltonian(h / 4.0);
    }

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const DenseMatrix& matrix() const { return matrix_; }

    // Ascending.
    double eigenvalue(std::size_t k) const { return eigenvalues_(static_cast<Eigen::Index>(k)); }
    StateVector eigenvector(std::size_t k) const {
        return from_eigen(eigenvectors_.col(static_cast<Eigen::Index>(k)));
    }

    // exp(2 pi i H power)
    DenseMatrix evolution(double power) const {
        Eigen::VectorXcd phases(eigenvalues_.size());
        for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
            phases(k) = std::polar(1.0, 2.0 * pi * eigenvalues_(k) * power);
        return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
    }

private:
    DenseMatrix matrix_;
    Eigen::VectorXd eigenvalues_;
    DenseMatrix eigenvectors_;
    std::size_t n_qubits_ = 0;
};

// Inverse QFT on qubits [first, first + q) of the state, most significant
// register bit on `first`.
inline void apply_inverse_qft(StateVector& state, std::size_t first, std::size_t q) {
    for (std::size_t k = 0; k < q / 2; ++k) state.apply_swap(first + k, first + q - 1 - k);
    for (std::size_t kk = q; kk-- > 0;) {
        for (std::size_t m = q; m-- > kk + 1;) {
            const double angle = -2.0 * pi / static_cast<double>(std::size_t{1} << (m - kk + 1));
            state.apply_controlled(gates::phase(angle), first + m, first + kk);
        }
        state.apply(gates::hadamard(), first + kk);
    }
}

struct PhaseOutcome {
    std::size_t register_value = 0;
    double probability = 0.0;
    std::optional<StateVector> collapsed; // empty when probability is zero
};

// Full phase-estimation circuit on |0>^q (x) input, returning every
// register outcome with its probability and the post-measurement system state.
inline std::vector<PhaseOutcome> phase_estimation(const StateVector& input, const Hamiltonian& h,
                                                  std::size_t q) {
    if (input.n_qubits() != h.n_qubits())
        throw std::invalid_argument("phase_estimation: input and Hamiltonian sizes differ");
    if (q == 0) throw std::invalid_argument("phase_estimation: phase register needs at least one qubit");
    StateVector joint = tensor(StateVector(q), input);
    for (std::size_t k = 0; k < q; ++k) joint.apply(gates::hadamard(), k);
    for (std::size_t k = 0; k < q; ++k) {
        const double power = std::ldexp(1.0, static_cast<int>(q - 1 - k));
        joint.apply_block(h.evolution(power), q, k);
    }
    apply_inverse_qft(joint, 0, q);

    const std::size_t sys_dim = input.dim();
    std::vector<PhaseOutcome> out(std::size_t{1} << q);
    const auto amps = joint.amplitudes();
    for (std::size_t j = 0; j < out.size(); ++j) {
        std::vector<complex> block(amps.begin() + static_cast<std::ptrdiff_t>(j * sys_dim),
                                   amps.begin() + static_cast<std::ptrdiff_t>((j + 1) * sys_dim));
        double p = 0.0;
        for (const auto& a : block) p += std::norm(a);
        out[j].register_value = j;
        out[j].probability = p;
        if (p > 1e-300) out[j].collapsed = StateVector::from_amplitudes(std::move(block), true);
    }
    return out;
}

// Nearest register value for a phase in [0, 1), wrapping 2^q to 0.
inline std::size_t phase_bin(double phase, std::size_t q) {
    const auto size = std::size_t{1} << q;
    return static_cast<std::size_t>(std::llround(phase * static_cast<double>(size))) % size;
}

} // namespace qrl
