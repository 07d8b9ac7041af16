// The negotiation function, its least fixed point, the concrete
// Prover-Challenger arena, the edge-pruning fixpoint construction, and
// deviation graphs for reduced strategies.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spe/game.hpp"
#include "spe/requirement.hpp"
#include "spe/zero_sum.hpp"

namespace spe {

/**
 * The two-player arena on which one negotiation value is decided. Prover
 * (Even) proposes requirement-consistent play steps, Challenger (Odd)
 * accepts them or deviates at the main player's vertices. Even wins iff
 * every dimension (one per game player, plus a main dimension indexed
 * num_players) has an even minimal recurring transition priority; then
 * the main player cannot negotiate a better payoff from the start.
 */
struct ConcreteGame {
    ZeroSumArena arena;
    PlayerId main_player = -1;
    int initial_state = -1;                          // entry for the requested start
    std::vector<std::pair<VertexId, int>> entries;   // every built (start vertex, entry state)
};

/**
 * Builds the concrete negotiation arena for deciding nego(req)(start),
 * where the main player is `player`. Throws std::invalid_argument when
 * the requirement uses Inf or does not match the game.
 */
ConcreteGame build_concrete_game(const Game& g, const Requirement& req, PlayerId player,
                                 VertexId start);

/**
 * The negotiation function: for every vertex v, the best payoff the owner
 * of v can defend from v against requirement-rational behavior of the
 * others, as a 0/1 requirement. Throws std::invalid_argument when req is
 * unsatisfiable. `jobs` bounds the number of concurrent per-player
 * solves.
 */
Requirement nego(const Game& g, const Requirement& req, int jobs = 1);

struct LfpResult {
    Requirement least;                   // the least fixed point
    std::vector<Requirement> iterates;   // from the all-zero requirement up to the fixpoint
};

/** Iterates the negotiation function from the all-zero requirement until
 *  it stabilizes; at most n+1 rounds. */
LfpResult lfp(const Game& g, int jobs = 1);

struct UmmelsResult {
    Requirement req;
    std::vector<std::pair<VertexId, VertexId>> retained_edges;
};

/**
 * The classic edge-pruning fixpoint: repeatedly, every player who can
 * enforce a win from one of her vertices on the current edge set commits
 * to one memoryless winning move there and drops her other edges;
 * finishes when the edge set stabilizes. The resulting requirement
 * bounds the negotiation fixpoint from above.
 */
UmmelsResult ummels_fixpoint(const Game& g);

/** One proposed lasso per game vertex, each starting at its key vertex. */
using ReducedStrategy = std::map<VertexId, LassoPlay>;

ReducedStrategy reduced_strategy_from_json_text(const Game& g, const std::string& text);
ReducedStrategy reduced_strategy_from_json_file(const Game& g, const std::string& path);
std::string reduced_strategy_to_json_text(const Game& g, const ReducedStrategy& strat);

/**
 * The finite multigraph describing where the main player can steer the
 * negotiation between proposals: nodes are the strategy's distinct
 * lassos; an edge captures a deviation at one of the main player's
 * positions, colored with the smallest main-player color seen up to the
 * deviation point.
 */
struct DeviationGraph {
    struct Edge {
        int from;
        int to;
        int color;
    };
    std::vector<LassoPlay> nodes;
    std::vector<int> node_of_vertex;  // vertex -> node index of its proposal
    std::vector<Edge> edges;
};

/**
 * Builds the deviation graph of a reduced strategy for the given main
 * player. Throws std::invalid_argument when a proposal is missing, does
 * not start at its key, or is not req-consistent.
 */
DeviationGraph build_deviation_graph(const Game& g, const Requirement& req, PlayerId player,
                                     const ReducedStrategy& strat);

/**
 * True iff the strategy wins the negotiation for Prover from `start`:
 * no reachable proposal is won by the main player, and no infinite
 * deviation path has an even minimal recurring color. A winning reduced
 * strategy certifies nego(req)(start) = 0.
 */
bool check_reduced_strategy(const Game& g, const Requirement& req, PlayerId player,
                            VertexId start, const ReducedStrategy& strat);

std::string deviation_graph_to_dot(const Game& g, const DeviationGraph& dg);

}  // namespace spe
