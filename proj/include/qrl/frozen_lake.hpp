// frozen_lake.hpp
// Frozen Lake on a square grid encoded in the computational basis of
// n = log2(cells) qubits. A move is the product of R_y(0 or pi) rotations
// that flips exactly the bits separating the current cell from its
// neighbour; the reward is read from a two-qubit reward register driven by
// the controlled unitary U_r.

#pragma once

#include "qrl/statevector.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrl {

enum class Cell { start, frozen, hole, goal };

// Discrete actions, in the order up, down, left, right.
enum class Move : int { up = 0, down = 1, left = 2, right = 3 };
inline constexpr std::size_t move_count = 4;

inline Move move_from_index(std::size_t k) {
    if (k >= move_count) throw std::invalid_argument("action index " + std::to_string(k) + " out of range");
    return static_cast<Move>(k);
}

class FrozenLakeMap {
public:
    FrozenLakeMap(std::size_t side, std::vector<Cell> cells) : side_(side), cells_(std::move(cells)) {
        if (side_ == 0 || cells_.size() != side_ * side_)
            throw std::invalid_argument("FrozenLakeMap: cell count must equal side^2");
        if (!is_power_of_two(cells_.size()) || cells_.size() < 2)
            throw std::invalid_argument("FrozenLakeMap: cell count must be a power of two");
        std::size_t starts = 0, goals = 0;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (cells_[i] == Cell::start) { ++starts; start_ = i; }
            if (cells_[i] == Cell::goal) ++goals;
        }
        if (starts != 1) throw std::invalid_argument("FrozenLakeMap: map needs exactly one S cell");
        if (goals != 1) throw std::invalid_argument("FrozenLakeMap: map needs exactly one G cell");
    }

    // Rows of S/F/H/G characters; blank lines and '#' comment lines ignored.
    static FrozenLakeMap parse(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        std::vector<Cell> cells;
        std::size_t side = 0, row = 0, line_no = 0;
        while (std::getline(is, line)) {
            ++line_no;
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            if (side == 0) side = line.size();
            if (line.size() != side)
                throw std::invalid_argument("map row " + std::to_string(row + 1) + " (line " + std::to_string(line_no) +
                                            ") has length " + std::to_string(line.size()) + ", expected " +
                                            std::to_string(side));
            for (std::size_t c = 0; c < line.size(); ++c) {
                switch (line[c]) {
                case 'S': cells.push_back(Cell::start); break;
                case 'F': cells.push_back(Cell::frozen); break;
                case 'H': cells.push_back(Cell::hole); break;
                case 'G': cells.push_back(Cell::goal); break;
                default:
                    throw std::invalid_argument("map row " + std::to_string(row + 1) + " column " +
                                                std::to_string(c + 1) + ": invalid character '" + line[c] + "'");
                }
            }
            ++row;
        }
        if (row != side)
            throw std::invalid_argument("map has " + std::to_string(row) + " rows, expected " + std::to_string(side));
        return FrozenLakeMap(side, std::move(cells));
    }

    static FrozenLakeMap load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("map file not found: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    // The classic 4x4 layout.
    static FrozenLakeMap classic() {
        return parse("SFFF\n"
                     "FHFH\n"
                     "FFFH\n"
                     "HFFG\n");
    }

    std::size_t side() const { return side_; }
    std::size_t size() const { return cells_.size(); }
    std::size_t n_qubits() const { return static_cast<std::size_t>(std::countr_zero(cells_.size())); }
    Cell cell(std::size_t i) const { return cells_.at(i); }
    std::size_t start() const { return start_; }
    bool is_terminal(std::size_t i) const { return cell(i) == Cell::hole || cell(i) == Cell::goal; }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            out += "SFHG"[static_cast<int>(cells_[i])];
            if ((i + 1) % side_ == 0) out += '\n';
        }
        return out;
    }

private:
    std::size_t side_;
    std::vector<Cell> cells_;
    std::size_t start_ = 0;
};

// Grid neighbour of `position`, or `position` itself when the move would
// leave the grid.
inline std::size_t grid_neighbor(const FrozenLakeMap& map, std::size_t position, Move move) {
    const std::size_t side = map.side(), r = position / side, c = position % side;
    switch (move) {
    case Move::up: return r == 0 ? position : position - side;
    case Move::down: return r + 1 == side ? position : position + side;
    case Move::left: return c == 0 ? position : position - 1;
    case Move::right: return c + 1 == side ? position : position + 1;
    }
    return position;
}

// theta_{j,k} in {0, pi}^n: pi on every qubit whose bit differs between the
// cell and its neighbour. Qubit 0 carries the most significant bit.
inline std::vector<double> action_angles(const FrozenLakeMap& map, std::size_t position, Move move) {
    if (position >= map.size()) throw std::out_of_range("action_angles: position out of range");
    const std::size_t diff = position ^ grid_neighbor(map, position, move);
    const std::size_t n = map.n_qubits();
    std::vector<double> theta(n, 0.0);
    for (std::size_t q = 0; q < n; ++q)
        if (diff & (std::size_t{1} << (n - 1 - q))) theta[q] = pi;
    return theta;
}

// U(theta) = R_y(theta_0) (x) ... (x) R_y(theta_{n-1})
inline StateVector apply_action_unitary(StateVector state, std::span<const double> theta) {
    if (theta.size() != state.n_qubits()) throw std::invalid_argument("apply_action_unitary: wrong angle count");
    for (std::size_t q = 0; q < theta.size(); ++q) state.apply(gates::ry(theta[q]), q);
    return state;
}

// Applies U_r to |env> (x) |00>_reward: X on the second reward qubit for
// hole cells, X on the first reward qubit for the goal cell. Returns the
// expectation of M = sum_r r |r><r| on the reward register.
inline double reward_register_readout(const FrozenLakeMap& map, const StateVector& env) {
    if (env.n_qubits() != map.n_qubits()) throw std::invalid_argument("reward readout: register size mismatch");
    const std::size_t n = map.n_qubits();
    StateVector joint = tensor(env, StateVector(2));
    // U_r is block diagonal in the environment basis; apply it block by block.
    auto amps = std::vector<complex>(joint.amplitudes().begin(), joint.amplitudes().end());
    for (std::size_t j = 0; j < map.size(); ++j) {
        std::array<complex, 4> block{amps[4 * j], amps[4 * j + 1], amps[4 * j + 2], amps[4 * j + 3]};
        std::array<complex, 4> out = block;
        if (map.cell(j) == Cell::hole) out = {block[1], block[0], block[3], block[2]};      // I (x) X
        else if (map.cell(j) == Cell::goal) out = {block[2], block[3], block[0], block[1]}; // X (x) I
        for (std::size_t r = 0; r < 4; ++r) amps[4 * j + r] = out[r];
    }
    joint = StateVector::from_amplitudes(std::move(amps));
    std::vector<PauliTerm> m_terms;
    // M = diag(0, 1, 2, 3) on the reward register = 3/2 I - Z_a - Z_b / 2
    std::string id(n + 2, 'I');
    std::string za = id, zb = id;
    za[n] = 'Z';
    zb[n + 1] = 'Z';
    const Observable m = Observable::pauli_sum({{1.5, id}, {-1.0, za}, {-0.5, zb}});
    return m.expectation(joint);
}

// r = f(p): 0 -> -1, 1 -> -10, 2 -> +10.
inline double reward_from_readout(int p) {
    switch (p) {
    case 0: return -1.0;
    case 1: return -10.0;
    case 2: return 10.0;
    default: throw std::logic_error("reward readout " + std::to_string(p) + " is not a valid outcome");
    }
}

struct FrozenLakeStep {
    std::size_t next_position = 0;
    double reward = 0.0;
    bool terminal = false;
};

inline FrozenLakeStep frozen_lake_step(std::size_t position, Move move, const FrozenLakeMap& map) {
    if (position >= map.size()) throw std::out_of_range("frozen_lake_step: position out of range");
    if (static_cast<int>(move) < 0 || static_cast<std::size_t>(move) >= move_count)
        throw std::invalid_argument("frozen_lake_step: action out of range");
    const auto theta = action_angles(map, position, move);
    const StateVector next = apply_action_unitary(StateVector::basis(map.n_qubits(), position), theta);

    std::size_t next_position = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < next.dim(); ++i) {
        if (std::norm(next[i]) > best) {
            best = std::norm(next[i]);
            next_position = i;
        }
    }
    if (std::abs(best - 1.0) > 1e-12) throw std::logic_error("frozen_lake_step: action did not yield a basis state");

    const int p = static_cast<int>(std::lround(reward_register_readout(map, next)));
    const double reward = reward_from_readout(p);
    return {next_position, reward, p != 0};
}

inline FrozenLakeStep frozen_lake_step(std::size_t position, std::size_t action, const FrozenLakeMap& map) {
    return frozen_lake_step(position, move_from_index(action), map);
}

} // namespace qrl
