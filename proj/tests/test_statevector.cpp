#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace qrl;

namespace {

std::vector<OneQubitGate> sample_gates(RandomSource& rng) {
    return {gates::pauli_x(), gates::pauli_y(), gates::pauli_z(), gates::hadamard(),
            gates::phase(rng.uniform(-pi, pi)), gates::rx(rng.uniform(-pi, pi)),
            gates::ry(rng.uniform(-pi, pi)), gates::rz(rng.uniform(-pi, pi))};
}

} // namespace

TEST(StateVector, ZeroStateAndBasis) {
    StateVector s(3);
    EXPECT_EQ(s.dim(), 8u);
    EXPECT_EQ(s[0], complex(1.0));
    const auto b = StateVector::basis(3, 5);
    EXPECT_EQ(b[5], complex(1.0));
    EXPECT_DOUBLE_EQ(b.norm_squared(), 1.0);
    EXPECT_THROW(StateVector::basis(2, 4), std::out_of_range);
}

TEST(StateVector, RejectsBadAmplitudes) {
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 1.0}), std::invalid_argument);
    EXPECT_NO_THROW(StateVector::from_amplitudes({1.0, 1.0}, true));
    EXPECT_THROW(StateVector::from_amplitudes({0.0, 0.0}, true), std::invalid_argument);
}

TEST(StateVector, QubitZeroIsMostSignificant) {
    StateVector s(3);
    s.apply(gates::pauli_x(), 0);
    EXPECT_EQ(s[4], complex(1.0));
    s.apply(gates::pauli_x(), 2);
    EXPECT_EQ(s[5], complex(1.0));
}

TEST(StateVector, XOnZeroGivesOne) {
    const auto s = apply_one_qubit(StateVector(1), gates::pauli_x(), 0);
    EXPECT_EQ(s[0], complex(0.0));
    EXPECT_EQ(s[1], complex(1.0));
}

TEST(StateVector, HadamardOnZero) {
    const auto s = apply_one_qubit(StateVector(1), gates::hadamard(), 0);
    EXPECT_NEAR(s[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(StateVector, CnotTruthTable) {
    // |10> -> |11>, |11> -> |10>, |0x> unchanged.
    EXPECT_EQ(apply_cnot(StateVector::basis(2, 0b10), 0, 1), StateVector::basis(2, 0b11));
    EXPECT_EQ(apply_cnot(StateVector::basis(2, 0b11), 0, 1), StateVector::basis(2, 0b10));
    EXPECT_EQ(apply_cnot(StateVector::basis(2, 0b01), 0, 1), StateVector::basis(2, 0b01));
    EXPECT_EQ(apply_cnot(StateVector::basis(2, 0b00), 0, 1), StateVector::basis(2, 0b00));
    EXPECT_THROW(apply_cnot(StateVector(2), 1, 1), std::invalid_argument);
}

TEST(StateVector, BellState) {
    auto s = apply_one_qubit(StateVector(2), gates::hadamard(), 0);
    s = apply_cnot(s, 0, 1);
    EXPECT_NEAR(std::norm(s[0]), 0.5, 1e-15);
    EXPECT_NEAR(std::norm(s[3]), 0.5, 1e-15);
    EXPECT_NEAR(std::norm(s[1]) + std::norm(s[2]), 0.0, 1e-30);
}

TEST(StateVector, OneQubitGatesMatchKroneckerOracle) {
    RandomSource rng(11);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto psi = haar_random_state(n, rng);
            for (const auto& g : sample_gates(rng)) {
                for (std::size_t t = 0; t < n; ++t) {
                    const auto got = apply_one_qubit(psi, g, t);
                    const Eigen::VectorXcd want = oracle::embed(g, t, n) * to_eigen(psi);
                    EXPECT_LT(oracle::max_abs_diff(got, want), 1e-12) << "n=" << n << " t=" << t;
                }
            }
        }
    }
}

TEST(StateVector, ControlledGatesMatchKroneckerOracle) {
    RandomSource rng(12);
    for (std::size_t n = 2; n <= 4; ++n) {
        const auto psi = haar_random_state(n, rng);
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t t = 0; t < n; ++t) {
                if (c == t) continue;
                const auto got = apply_cnot(psi, c, t);
                EXPECT_LT(oracle::max_abs_diff(got, oracle::cnot(c, t, n) * to_eigen(psi)), 1e-12);
                const auto g = gates::ry(rng.uniform(-pi, pi));
                auto s = psi;
                s.apply_controlled(g, c, t);
                EXPECT_LT(oracle::max_abs_diff(s, oracle::controlled(g, c, t, n) * to_eigen(psi)), 1e-12);
            }
        }
    }
}

TEST(StateVector, SwapExchangesQubits) {
    RandomSource rng(13);
    const auto psi = haar_random_state(3, rng);
    auto s = psi;
    s.apply_swap(0, 2);
    // SWAP = CNOT(a,b) CNOT(b,a) CNOT(a,b)
    const Eigen::VectorXcd want = oracle::cnot(0, 2, 3) * oracle::cnot(2, 0, 3) * oracle::cnot(0, 2, 3) * to_eigen(psi);
    EXPECT_LT(oracle::max_abs_diff(s, want), 1e-12);
}

TEST(StateVector, ApplyBlockMatchesKronecker) {
    RandomSource rng(14);
    const auto psi = haar_random_state(3, rng);
    // A random 2-qubit unitary from a QR decomposition.
    DenseMatrix a = DenseMatrix::Random(4, 4);
    const DenseMatrix u = Eigen::HouseholderQR<DenseMatrix>(a).householderQ();
    auto s = psi;
    s.apply_block(u, 1);
    EXPECT_LT(oracle::max_abs_diff(s, oracle::kron(DenseMatrix::Identity(2, 2), u) * to_eigen(psi)), 1e-12);

    auto c = psi;
    c.apply_block(DenseMatrix(u), 1, 0);
    const DenseMatrix p0 = (DenseMatrix(2, 2) << 1, 0, 0, 0).finished();
    const DenseMatrix p1 = (DenseMatrix(2, 2) << 0, 0, 0, 1).finished();
    const DenseMatrix cu = oracle::kron(p0, DenseMatrix::Identity(4, 4)) + oracle::kron(p1, u);
    EXPECT_LT(oracle::max_abs_diff(c, cu * to_eigen(psi)), 1e-12);
    EXPECT_THROW(c.apply_block(u, 0, 1), std::invalid_argument);
}

TEST(StateVector, GateInverseRestoresState) {
    RandomSource rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const auto psi = haar_random_state(3, rng);
        for (const auto& g : sample_gates(rng)) {
            const std::size_t t = rng.index(3);
            const auto back = apply_one_qubit(apply_one_qubit(psi, g, t), g.adjoint(), t);
            EXPECT_LT(oracle::max_abs_diff(back, psi), 1e-12);
        }
    }
}

TEST(StateVector, NormPreservedUnderRandomGates) {
    RandomSource rng(16);
    auto s = haar_random_state(4, rng);
    for (int k = 0; k < 2000; ++k) {
        if (rng.index(3) == 0) {
            const std::size_t c = rng.index(4), t = (c + 1 + rng.index(3)) % 4;
            s.apply_cnot(c, t);
        } else {
            s.apply(gates::rx(rng.uniform(-pi, pi)) * gates::rz(rng.uniform(-pi, pi)), rng.index(4));
        }
    }
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-9);
}

TEST(StateVector, GatesAreLinear) {
    RandomSource rng(17);
    const auto a = haar_random_state(3, rng), b = haar_random_state(3, rng);
    const complex alpha{0.3, -0.7}, beta{-0.2, 0.4};
    std::vector<complex> mix(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) mix[i] = alpha * a[i] + beta * b[i];
    const auto sum = StateVector::from_amplitudes(mix, true);
    const double scale = std::sqrt(std::accumulate(mix.begin(), mix.end(), 0.0,
                                                    [](double acc, complex z) { return acc + std::norm(z); }));
    const auto g = gates::ry(0.8) * gates::phase(0.3);
    const auto ga = apply_one_qubit(a, g, 1), gb = apply_one_qubit(b, g, 1), gs = apply_one_qubit(sum, g, 1);
    for (std::size_t i = 0; i < a.dim(); ++i)
        EXPECT_LT(std::abs(gs[i] * scale - (alpha * ga[i] + beta * gb[i])), 1e-12);
}

TEST(StateVector, RotationConvention) {
    // R_a(theta) = exp(-i theta sigma_a / 2)
    const double th = 0.9;
    const auto ry = gates::ry(th);
    EXPECT_NEAR(ry.m[0].real(), std::cos(th / 2), 1e-15);
    EXPECT_NEAR(ry.m[1].real(), -std::sin(th / 2), 1e-15);
    const auto rz = gates::rz(th);
    EXPECT_NEAR(std::arg(rz.m[0]), -th / 2, 1e-15);
    EXPECT_NEAR(std::arg(rz.m[3]), th / 2, 1e-15);
    const auto rx = gates::rx(th);
    EXPECT_NEAR(rx.m[1].imag(), -std::sin(th / 2), 1e-15);
    for (const auto& g : {rx, ry, rz}) EXPECT_TRUE(g.is_unitary());
    EXPECT_TRUE(gates::hadamard().is_unitary());
}

TEST(Observable, PauliExpectationsMatchDense) {
    RandomSource rng(18);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.index(4);
        std::string ops(n, 'I');
        for (auto& c : ops) c = "IXYZ"[rng.index(4)];
        const auto obs = Observable::pauli(ops, 0.7);
        const auto psi = haar_random_state(n, rng);
        const Eigen::VectorXcd v = to_eigen(psi);
        const double dense = v.dot(obs.to_dense() * v).real();
        EXPECT_NEAR(obs.expectation(psi), dense, 1e-12) << ops;
    }
}

TEST(Observable, KnownValues) {
    EXPECT_DOUBLE_EQ(Observable::pauli("Z").expectation(StateVector(1)), 1.0);
    EXPECT_DOUBLE_EQ(Observable::pauli("Z").expectation(StateVector::basis(1, 1)), -1.0);
    const auto plus = apply_one_qubit(StateVector(1), gates::hadamard(), 0);
    EXPECT_NEAR(Observable::pauli("X").expectation(plus), 1.0, 1e-15);
    auto plus_i = apply_one_qubit(plus, gates::phase(pi / 2), 0);
    EXPECT_NEAR(Observable::pauli("Y").expectation(plus_i), 1.0, 1e-15);
    EXPECT_NEAR(Observable::pauli("ZI").expectation(StateVector::basis(2, 0b10)), -1.0, 1e-15);
    EXPECT_NEAR(Observable::pauli("IZ").expectation(StateVector::basis(2, 0b10)), 1.0, 1e-15);
}

TEST(Observable, ValidatesInput) {
    EXPECT_THROW(Observable::pauli("XQ"), std::invalid_argument);
    EXPECT_THROW(Observable::pauli_sum({{1.0, "X"}, {1.0, "XX"}}), std::invalid_argument);
    DenseMatrix m(2, 2);
    m << 0, 1, 0, 0;
    EXPECT_THROW(Observable::dense(m), std::invalid_argument);
    EXPECT_THROW(Observable::pauli("ZZ").expectation(StateVector(1)), std::invalid_argument);
}

TEST(Observable, ProjectorGivesOverlap) {
    RandomSource rng(19);
    const auto a = haar_random_state(2, rng), b = haar_random_state(2, rng);
    EXPECT_NEAR(Observable::projector(a).expectation(b), overlap_probability(a, b), 1e-12);
}

TEST(Observable, LocalPaulisAreTraceOrthogonal) {
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            const auto a = Observable::single(2, i / 3, "XYZ"[i % 3]);
            const auto b = Observable::single(2, j / 3, "XYZ"[j % 3]);
            EXPECT_LT(std::abs(trace_product(a, b)), 1e-12);
        }
}

TEST(StateVector, TensorPutsFirstOperandFirst) {
    const auto s = tensor(StateVector::basis(1, 1), StateVector::basis(2, 0b01));
    EXPECT_EQ(s, StateVector::basis(3, 0b101));
}

TEST(Sampling, CountsSumToShots) {
    RandomSource rng(20);
    const auto psi = haar_random_state(2, rng);
    const auto counts = sample_counts(psi, 1000, rng);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), 1000u);
    EXPECT_THROW(sample_counts(psi, 0, rng), std::invalid_argument);
}

TEST(Sampling, ChiSquareAgainstBornRule) {
    // df = 3; the 99th percentile of chi-square(3) is 11.345.
    RandomSource rng(21);
    const auto psi = haar_random_state(2, rng);
    const auto p = probabilities(psi);
    const std::size_t shots = 100000;
    const auto counts = sample_counts(psi, shots, rng);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double e = p[i] * static_cast<double>(shots);
        chi2 += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
    }
    EXPECT_LT(chi2, 11.345);
}

TEST(Sampling, HaarAverageOverlap) {
    // E|<0|psi>|^2 = 1/2^n; the sample mean of 20000 draws has std below 0.003.
    RandomSource rng(22);
    for (std::size_t n : {1u, 2u, 3u}) {
        double sum = 0.0;
        const int draws = 20000;
        for (int k = 0; k < draws; ++k) sum += std::norm(haar_random_state(n, rng)[0]);
        EXPECT_NEAR(sum / draws, 1.0 / static_cast<double>(std::size_t{1} << n), 0.01) << n;
    }
}

TEST(RandomSource, StateRoundTrip) {
    RandomSource a(42);
    for (int k = 0; k < 10; ++k) a.normal();
    const auto saved = a.save_state();
    RandomSource b(0);
    b.restore_state(42, saved);
    for (int k = 0; k < 10; ++k) EXPECT_EQ(a.normal(), b.normal());
}
