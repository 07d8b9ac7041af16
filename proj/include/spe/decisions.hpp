// Decision procedures on top of the negotiation machinery: fixed-point
// checks, constrained existence of equilibrium outcomes, and verification
// of LTL properties against SPE outcomes.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spe/game.hpp"
#include "spe/ltl.hpp"
#include "spe/requirement.hpp"

namespace spe {

/** Per-player payoff bounds; a play qualifies when lower ≤ payoff ≤ upper. */
struct Threshold {
    std::vector<int> lower;  // per player, 0 or 1
    std::vector<int> upper;
};

/**
 * Parses threshold text like "Circle=1,Box=0". Omitted players default to
 * 0 in the lower bound and 1 in the upper bound. Throws
 * std::invalid_argument on unknown players, bad values, duplicate entries,
 * or a lower bound above the upper bound.
 */
Threshold parse_threshold(const Game& g, const std::string& lower_text,
                          const std::string& upper_text);

/** Which equilibrium notion constrains the witness play. */
enum class EqKind { Ne, Spe };

/**
 * True iff req is satisfiable and the negotiation function leaves it
 * unchanged. On false, `why` (when non-null) receives a diagnostic.
 */
bool is_fixed_point(const Game& g, const Requirement& req, std::string* why = nullptr,
                    int jobs = 1);

/** True iff req is the least fixed point of the negotiation function. */
bool is_lfp(const Game& g, const Requirement& req, std::string* why = nullptr, int jobs = 1);

/**
 * Searches for an equilibrium outcome (NE or SPE play) from `start` whose
 * payoff lies within the threshold. Returns a lasso witness, or nothing
 * when no such play exists.
 */
std::optional<LassoPlay> constrained_existence(const Game& g, VertexId start,
                                               const Threshold& t, EqKind kind, int jobs = 1);

/**
 * The same search against a caller-provided base requirement (the plays
 * considered are exactly the base-consistent ones).
 */
std::optional<LassoPlay> constrained_existence_with_base(const Game& g, const Requirement& base,
                                                         VertexId start, const Threshold& t,
                                                         int jobs = 1);

/**
 * Returns an SPE outcome from `start` satisfying the formula, or nothing
 * when every SPE outcome violates it. Formula atoms must be vertex names;
 * an atom holds exactly at its vertex.
 */
std::optional<LassoPlay> spe_verify(const Game& g, VertexId start, const LtlFormula& formula);

}  // namespace spe
