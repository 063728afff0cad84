// qlearning.hpp
// Tabular Q-learning with epsilon-greedy exploration for Frozen Lake.

#pragma once

#include "qrl/frozen_lake.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qrl {

struct QTable {
    std::size_t n_states = 0;
    std::vector<double> values; // n_states x move_count, row-major
    double learning_rate = 0.1;
    double discount = 0.9;
    double epsilon = 0.1;

    QTable() = default;
    QTable(std::size_t states, double alpha, double gamma, double eps)
        : n_states(states), values(states * move_count, 0.0), learning_rate(alpha), discount(gamma), epsilon(eps) {}

    double& operator()(std::size_t s, std::size_t a) { return values.at(index(s, a)); }
    double operator()(std::size_t s, std::size_t a) const { return values.at(index(s, a)); }
    std::span<const double> row(std::size_t s) const {
        return std::span<const double>(values).subspan(index(s, 0), move_count);
    }

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t index(std::size_t s, std::size_t a) const {
        if (s >= n_states || a >= move_count) throw std::out_of_range("QTable: index out of range");
        return s * move_count + a;
    }
};

// Q(s,a) += alpha [r + gamma max_a' Q(s',a') - Q(s,a)]; the max term is
// dropped when s' is terminal.
inline void q_learning_update(QTable& table, std::size_t s, std::size_t a, double reward, std::size_t s_next,
                              bool terminal) {
    const auto next_row = table.row(s_next);
    const double bootstrap = terminal ? 0.0 : *std::max_element(next_row.begin(), next_row.end());
    double& q = table(s, a);
    q += table.learning_rate * (reward + table.discount * bootstrap - q);
}

// Lowest index wins ties.
inline std::size_t greedy_action(std::span<const double> row) {
    return static_cast<std::size_t>(std::distance(row.begin(), std::max_element(row.begin(), row.end())));
}

inline std::size_t epsilon_greedy(std::span<const double> row, double epsilon, RandomSource& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon_greedy: epsilon outside [0, 1]");
    if (row.empty()) throw std::invalid_argument("epsilon_greedy: empty row");
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.index(row.size());
    return greedy_action(row);
}

struct QLearningConfig {
    double learning_rate = 0.1;
    double discount = 0.9;
    double epsilon_start = 1.0;
    double epsilon_end = 0.01;
    std::size_t episodes = 2000;
    std::size_t max_steps = 100;
};

struct FrozenLakeResult {
    QTable table;
    std::vector<std::size_t> path; // greedy rollout from S, including S
    bool reached_goal = false;
    std::vector<double> episode_returns;
};

// Greedy rollout; stops at a terminal cell, on revisiting a cell, or after
// map.size() moves.
inline std::vector<std::size_t> greedy_path(const QTable& table, const FrozenLakeMap& map) {
    std::vector<std::size_t> path{map.start()};
    std::vector<bool> seen(map.size(), false);
    seen[map.start()] = true;
    std::size_t pos = map.start();
    for (std::size_t k = 0; k < map.size(); ++k) {
        const auto step = frozen_lake_step(pos, greedy_action(table.row(pos)), map);
        if (step.next_position == pos) break;
        pos = step.next_position;
        path.push_back(pos);
        if (step.terminal || seen[pos]) break;
        seen[pos] = true;
    }
    return path;
}

// Epsilon decays linearly from epsilon_start to epsilon_end over the episodes.
inline FrozenLakeResult train_frozen_lake(const FrozenLakeMap& map, const QLearningConfig& cfg, RandomSource& rng) {
    FrozenLakeResult out;
    out.table = QTable(map.size(), cfg.learning_rate, cfg.discount, cfg.epsilon_start);
    out.episode_returns.reserve(cfg.episodes);
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        const double frac = cfg.episodes > 1 ? static_cast<double>(ep) / static_cast<double>(cfg.episodes - 1) : 1.0;
        out.table.epsilon = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
        std::size_t pos = map.start();
        double ret = 0.0;
        for (std::size_t t = 0; t < cfg.max_steps; ++t) {
            const std::size_t a = epsilon_greedy(out.table.row(pos), out.table.epsilon, rng);
            const auto step = frozen_lake_step(pos, a, map);
            q_learning_update(out.table, pos, a, step.reward, step.next_position, step.terminal);
            ret += step.reward;
            pos = step.next_position;
            if (step.terminal) break;
        }
        out.episode_returns.push_back(ret);
    }
    out.path = greedy_path(out.table, map);
    out.reached_goal = map.cell(out.path.back()) == Cell::goal;
    return out;
}

} // namespace qrl
