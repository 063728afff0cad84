// statevector.hpp
// Dense statevector simulation: one- and two-qubit gate kernels, register
// unitaries, Pauli and dense observables, sampling and Haar-random states.
//
// Qubit 0 is the most significant bit of a basis index, so on three qubits
// the basis state |011> has index 3.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qrl {

using complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;

// Seeded pseudo-random source. Identical seeds give identical sequences on a
// given platform; the engine state can be saved and restored exactly.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }
    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("RandomSource::index: empty range");
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    std::string save_state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }
    void restore_state(std::uint64_t seed, const std::string& state) {
        std::istringstream is(state);
        std::mt19937_64 engine;
        is >> engine;
        if (is.fail()) throw std::invalid_argument("RandomSource: malformed engine state");
        seed_ = seed;
        engine_ = engine;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// 2x2 complex matrix, row-major: {m00, m01, m10, m11}.
struct OneQubitGate {
    std::array<complex, 4> m{};

    OneQubitGate adjoint() const {
        return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
    }

    bool is_unitary(double tol = 1e-12) const {
        const auto a = adjoint();
        // a * m
        const complex p00 = a.m[0] * m[0] + a.m[1] * m[2];
        const complex p01 = a.m[0] * m[1] + a.m[1] * m[3];
        const complex p10 = a.m[2] * m[0] + a.m[3] * m[2];
        const complex p11 = a.m[2] * m[1] + a.m[3] * m[3];
        return std::abs(p00 - 1.0) <= tol && std::abs(p01) <= tol && std::abs(p10) <= tol &&
               std::abs(p11 - 1.0) <= tol;
    }
};

inline OneQubitGate operator*(const OneQubitGate& a, const OneQubitGate& b) {
    return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
             a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
}

namespace gates {

inline OneQubitGate identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
inline OneQubitGate pauli_x() { return {{0.0, 1.0, 1.0, 0.0}}; }
inline OneQubitGate pauli_y() { return {{0.0, complex{0, -1}, complex{0, 1}, 0.0}}; }
inline OneQubitGate pauli_z() { return {{1.0, 0.0, 0.0, -1.0}}; }
inline OneQubitGate hadamard() {
    const double s = 1.0 / std::numbers::sqrt2;
    return {{s, s, s, -s}};
}
// diag(1, e^{i phi})
inline OneQubitGate phase(double phi) { return {{1.0, 0.0, 0.0, std::polar(1.0, phi)}}; }

// R_a(theta) = exp(-i sigma_a theta / 2)
inline OneQubitGate rx(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {{c, complex{0, -s}, complex{0, -s}, c}};
}
inline OneQubitGate ry(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {{c, -s, s, c}};
}
inline OneQubitGate rz(double theta) {
    return {{std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2)}};
}

} // namespace gates

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

class StateVector {
public:
    // |0...0> on n qubits.
    explicit StateVector(std::size_t n_qubits) : n_qubits_(n_qubits), amps_(dim_for(n_qubits)) {
        amps_[0] = 1.0;
    }

    static StateVector basis(std::size_t n_qubits, std::size_t index) {
        StateVector s(n_qubits);
        if (index >= s.dim()) throw std::out_of_range("StateVector::basis: index out of range");
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    // Amplitude count must be a power of two. Unless `normalize` is set the
    // input must already have unit norm within 1e-9.
    static StateVector from_amplitudes(std::vector<complex> amps, bool normalize = false) {
        if (!is_power_of_two(amps.size()) || amps.size() < 2)
            throw std::invalid_argument("StateVector: amplitude count must be a power of two >= 2");
        StateVector s(static_cast<std::size_t>(std::countr_zero(amps.size())));
        s.amps_ = std::move(amps);
        const double nrm = s.norm_squared();
        if (normalize) {
            if (!(nrm > 0.0)) throw std::invalid_argument("StateVector: zero vector");
            const double inv = 1.0 / std::sqrt(nrm);
            for (auto& a : s.amps_) a *= inv;
        } else if (std::abs(nrm - 1.0) > 1e-9) {
            throw std::invalid_argument("StateVector: amplitudes are not normalized");
        }
        return s;
    }

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const complex> amplitudes() const { return amps_; }
    const complex& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const {
        double acc = 0.0;
        for (const auto& a : amps_) acc += std::norm(a);
        return acc;
    }

    // Bit mask of qubit q inside a basis index.
    std::size_t mask(std::size_t qubit) const { return std::size_t{1} << (n_qubits_ - 1 - qubit); }

    void apply(const OneQubitGate& g, std::size_t target) {
        check_qubit(target);
        const std::size_t stride = mask(target);
        for (std::size_t base = 0; base < dim(); base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const complex a0 = amps_[i], a1 = amps_[i + stride];
                amps_[i] = g.m[0] * a0 + g.m[1] * a1;
                amps_[i + stride] = g.m[2] * a0 + g.m[3] * a1;
            }
        }
    }

    void apply_controlled(const OneQubitGate& g, std::size_t control, std::size_t target) {
        check_qubit(control);
        check_qubit(target);
        if (control == target)
            throw std::invalid_argument("controlled gate: control and target coincide");
        const std::size_t cm = mask(control), tm = mask(target);
        for (std::size_t i = 0; i < dim(); ++i) {
            if ((i & cm) && !(i & tm)) {
                const complex a0 = amps_[i], a1 = amps_[i | tm];
                amps_[i] = g.m[0] * a0 + g.m[1] * a1;
                amps_[i | tm] = g.m[2] * a0 + g.m[3] * a1;
            }
        }
    }

    void apply_cnot(std::size_t control, std::size_t target) {
        check_qubit(control);
        check_qubit(target);
        if (control == target) throw std::invalid_argument("CNOT: control and target coincide");
        const std::size_t cm = mask(control), tm = mask(target);
        for (std::size_t i = 0; i < dim(); ++i)
            if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
    }

    void apply_swap(std::size_t a, std::size_t b) {
        check_qubit(a);
        check_qubit(b);
        if (a == b) return;
        const std::size_t am = mask(a), bm = mask(b);
        for (std::size_t i = 0; i < dim(); ++i)
            if ((i & am) && !(i & bm)) std::swap(amps_[i], amps_[(i & ~am) | bm]);
    }

    // Dense unitary on the contiguous qubit block [first, first + k), where
    // 2^k = u.rows(). When `control` is set the unitary acts only on the
    // subspace where that qubit is 1; the control must lie outside the block.
    void apply_block(const DenseMatrix& u, std::size_t first,
                     std::optional<std::size_t> control = std::nullopt) {
        const auto rows = static_cast<std::size_t>(u.rows());
        if (u.rows() != u.cols() || !is_power_of_two(rows))
            throw std::invalid_argument("apply_block: matrix must be square with power-of-two size");
        const auto k = static_cast<std::size_t>(std::countr_zero(rows));
        if (first + k > n_qubits_) throw std::out_of_range("apply_block: block exceeds register");
        std::size_t cm = 0;
        if (control) {
            check_qubit(*control);
            if (*control >= first && *control < first + k)
                throw std::invalid_argument("apply_block: control inside target block");
            cm = mask(*control);
        }
        const std::size_t low_bits = n_qubits_ - first - k;
        const std::size_t low = std::size_t{1} << low_bits;
        const std::size_t block_mask = (rows - 1) << low_bits;
        std::vector<complex> in(rows), out(rows);
        for (std::size_t i = 0; i < dim(); ++i) {
            if (i & block_mask) continue;
            if (control && !(i & cm)) continue;
            for (std::size_t r = 0; r < rows; ++r) in[r] = amps_[i + r * low];
            for (std::size_t r = 0; r < rows; ++r) {
                complex acc = 0.0;
                for (std::size_t c = 0; c < rows; ++c) acc += u(static_cast<Eigen::Index>(r),
                                                               static_cast<Eigen::Index>(c)) * in[c];
                out[r] = acc;
            }
            for (std::size_t r = 0; r < rows; ++r) amps_[i + r * low] = out[r];
        }
    }

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    static std::size_t dim_for(std::size_t n) {
        if (n == 0 || n > 30) throw std::invalid_argument("StateVector: qubit count must be in [1, 30]");
        return std::size_t{1} << n;
    }
    void check_qubit(std::size_t q) const {
        if (q >= n_qubits_) throw std::out_of_range("qubit index out of range");
    }

    std::size_t n_qubits_;
    std::vector<complex> amps_;
};

// Pure-function forms.

inline StateVector apply_one_qubit(StateVector state, const OneQubitGate& gate, std::size_t target) {
    state.apply(gate, target);
    return state;
}

inline StateVector apply_cnot(StateVector state, std::size_t control, std::size_t target) {
    state.apply_cnot(control, target);
    return state;
}

// <a|b>
inline complex inner_product(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
    complex acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

// |<a|b>|^2
inline double overlap_probability(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

// a (x) b with a's qubits first.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<complex> amps(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) amps[i * b.dim() + j] = a[i] * b[j];
    return StateVector::from_amplitudes(std::move(amps), true);
}

inline Eigen::VectorXcd to_eigen(const StateVector& s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

inline StateVector from_eigen(const Eigen::VectorXcd& v, bool normalize = true) {
    return StateVector::from_amplitudes(std::vector<complex>(v.data(), v.data() + v.size()), normalize);
}

// One term c * P_0 (x) P_1 (x) ... with P_q in {I, X, Y, Z}; ops[q] acts on qubit q.
struct PauliTerm {
    double coefficient = 1.0;
    std::string ops;
};

// Hermitian observable held either as a weighted Pauli sum or as a dense matrix.
class Observable {
public:
    static Observable pauli(std::string ops, double coefficient = 1.0) {
        return pauli_sum({PauliTerm{coefficient, std::move(ops)}});
    }

    static Observable pauli_sum(std::vector<PauliTerm> terms) {
        if (terms.empty()) throw std::invalid_argument("Observable: empty Pauli sum");
        const std::size_t n = terms.front().ops.size();
        if (n == 0) throw std::invalid_argument("Observable: empty Pauli string");
        for (const auto& t : terms) {
            if (t.ops.size() != n) throw std::invalid_argument("Observable: Pauli strings differ in length");
            for (char c : t.ops)
                if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
                    throw std::invalid_argument(std::string("Observable: bad Pauli character '") + c + "'");
        }
        Observable o;
        o.n_qubits_ = n;
        o.terms_ = std::move(terms);
        return o;
    }

    // Single Pauli `op` on `qubit`, identity elsewhere.
    static Observable single(std::size_t n_qubits, std::size_t qubit, char op) {
        if (qubit >= n_qubits) throw std::out_of_range("Observable::single: qubit out of range");
        std::string ops(n_qubits, 'I');
        ops[qubit] = op;
        return pauli(std::move(ops));
    }

    static Observable dense(DenseMatrix m, double tol = 1e-12) {
        const auto rows = static_cast<std::size_t>(m.rows());
        if (m.rows() != m.cols() || !is_power_of_two(rows) || rows < 2)
            throw std::invalid_argument("Observable: matrix must be square with power-of-two size");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw std::invalid_argument("Observable: matrix is not Hermitian");
        Observable o;
        o.n_qubits_ = static_cast<std::size_t>(std::countr_zero(rows));
        o.dense_ = std::move(m);
        return o;
    }

    // |s><s|
    static Observable projector(const StateVector& s) {
        const Eigen::VectorXcd v = to_eigen(s);
        return dense(v * v.adjoint());
    }

    std::size_t n_qubits() const { return n_qubits_; }
    bool is_pauli() const { return !dense_.has_value(); }
    const std::vector<PauliTerm>& terms() const { return terms_; }

    DenseMatrix to_dense() const {
        if (dense_) return *dense_;
        const auto dim = Eigen::Index{1} << n_qubits_;
        DenseMatrix out = DenseMatrix::Zero(dim, dim);
        for (const auto& t : terms_) {
            DenseMatrix term = DenseMatrix::Ones(1, 1);
            for (char c : t.ops) {
                const DenseMatrix p = pauli_matrix(c);
                DenseMatrix next(term.rows() * 2, term.cols() * 2);
                for (Eigen::Index i = 0; i < term.rows(); ++i)
                    for (Eigen::Index j = 0; j < term.cols(); ++j)
                        next.block(2 * i, 2 * j, 2, 2) = term(i, j) * p;
                term = std::move(next);
            }
            out += t.coefficient * term;
        }
        return out;
    }

    // <psi|M|psi>, real part.
    double expectation(const StateVector& s) const {
        if (s.n_qubits() != n_qubits_) throw std::invalid_argument("expectation: dimension mismatch");
        if (dense_) {
            const Eigen::VectorXcd v = to_eigen(s);
            return v.dot(*dense_ * v).real();
        }
        double acc = 0.0;
        for (const auto& t : terms_) acc += t.coefficient * pauli_expectation(s, t.ops);
        return acc;
    }

private:
    static DenseMatrix pauli_matrix(char c) {
        DenseMatrix p(2, 2);
        switch (c) {
        case 'X': p << 0, 1, 1, 0; break;
        case 'Y': p << 0, complex{0, -1}, complex{0, 1}, 0; break;
        case 'Z': p << 1, 0, 0, -1; break;
        default: p << 1, 0, 0, 1; break;
        }
        return p;
    }

    // P|i> = phase(i) |i ^ flip|, so <psi|P|psi> = sum_i conj(psi[i^flip]) phase(i) psi[i].
    static double pauli_expectation(const StateVector& s, const std::string& ops) {
        std::size_t flip = 0, zmask = 0, ymask = 0;
        for (std::size_t q = 0; q < ops.size(); ++q) {
            const std::size_t m = s.mask(q);
            if (ops[q] == 'X' || ops[q] == 'Y') flip |= m;
            if (ops[q] == 'Z') zmask |= m;
            if (ops[q] == 'Y') ymask |= m;
        }
        // Y|0> = i|1>, Y|1> = -i|0>
        const int n_y = std::popcount(ymask);
        const complex y_base = std::pow(complex{0, 1}, n_y);
        complex acc = 0.0;
        for (std::size_t i = 0; i < s.dim(); ++i) {
            int sign_bits = std::popcount(i & zmask) + std::popcount(i & ymask);
            const double sign = (sign_bits & 1) ? -1.0 : 1.0;
            acc += std::conj(s[i ^ flip]) * (y_base * sign) * s[i];
        }
        return acc.real();
    }

    std::size_t n_qubits_ = 0;
    std::vector<PauliTerm> terms_;
    std::optional<DenseMatrix> dense_;
};

inline double expectation(const StateVector& s, const Observable& obs) { return obs.expectation(s); }

// Tr(A B) for two observables of equal size.
inline complex trace_product(const Observable& a, const Observable& b) {
    if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("trace_product: dimension mismatch");
    return (a.to_dense() * b.to_dense()).trace();
}

inline std::vector<double> probabilities(const StateVector& s) {
    std::vector<double> p(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) p[i] = std::norm(s[i]);
    return p;
}

// Multinomial sample of `shots` computational-basis measurements.
inline std::vector<std::uint64_t> sample_counts(std::span<const double> probs, std::size_t shots,
                                                RandomSource& rng) {
    if (shots == 0) throw std::invalid_argument("sample_counts: shots must be positive");
    std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
    std::vector<std::uint64_t> counts(probs.size(), 0);
    for (std::size_t k = 0; k < shots; ++k) ++counts[dist(rng.engine())];
    return counts;
}

inline std::vector<std::uint64_t> sample_counts(const StateVector& s, std::size_t shots,
                                                RandomSource& rng) {
    const auto p = probabilities(s);
    return sample_counts(std::span<const double>(p), shots, rng);
}

// Normalized complex Gaussian vector: Haar-distributed pure state.
inline StateVector haar_random_state(std::size_t n_qubits, RandomSource& rng) {
    if (n_qubits == 0) throw std::invalid_argument("haar_random_state: need at least one qubit");
    std::vector<complex> amps(std::size_t{1} << n_qubits);
    for (auto& a : amps) {
        const double re = rng.normal();
        const double im = rng.normal();
        a = {re, im};
    }
    return StateVector::from_amplitudes(std::move(amps), true);
}

} // namespace qrl
