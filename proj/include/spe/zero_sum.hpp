// Two-player zero-sum arenas with transition priorities, attractors, and
// solvers for parity and generalized parity objectives.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spe/game.hpp"

namespace spe {

enum class Side : unsigned char { Even = 0, Odd = 1 };

inline Side opponent(Side s) { return s == Side::Even ? Side::Odd : Side::Even; }

/**
 * A two-player arena whose transitions carry one priority per dimension.
 * Even wins a play iff in every dimension the minimum priority among the
 * infinitely-traversed transitions is even; Odd wins otherwise.
 */
struct ZeroSumArena {
    std::vector<std::string> state_names;             // optional labels
    std::vector<Side> owner;                          // per state
    std::vector<std::pair<int, int>> transitions;     // (from, to)
    std::vector<std::vector<int>> priorities;         // [dimension][transition]

    // Derived by finalize().
    std::vector<std::vector<int>> out;  // state -> transition indices
    std::vector<std::vector<int>> in;

    int num_states() const { return static_cast<int>(owner.size()); }
    int num_transitions() const { return static_cast<int>(transitions.size()); }
    int num_dims() const { return static_cast<int>(priorities.size()); }
    std::string state_label(int s) const;

    /** Validates shape and totality, builds adjacency. Throws
     *  std::invalid_argument on violation. */
    void finalize();
};

struct SolveResult {
    std::vector<Side> winner;        // per state
    std::vector<int> strategy_even;  // winning move as a transition index, -1 when none recorded
    std::vector<int> strategy_odd;
};

/**
 * States from which `side` forces the play into `target` (targets
 * included). When `moves` is non-null it receives, for every attracted
 * non-target state owned by `side`, one transition that makes progress.
 */
std::vector<char> attractor(const ZeroSumArena& a, const std::vector<char>& target, Side side,
                            std::vector<int>* moves = nullptr);

/**
 * Solves a one-dimensional parity arena. Returns the full winning
 * partition together with uniformly winning memoryless strategies for
 * both sides on their regions.
 */
SolveResult solve_parity(const ZeroSumArena& a);

/**
 * Solves a multi-dimensional arena (Even needs every dimension's minimal
 * infinitely-traversed priority to be even). Returns the partition and a
 * memoryless strategy for Odd on Odd's region; Even may need memory, so
 * no Even strategy is produced for more than one dimension.
 */
SolveResult solve_generalized(const ZeroSumArena& a);

std::string arena_to_dot(const ZeroSumArena& a);

}  // namespace spe
