// Input-format reductions: CNF formulas and Kripke structures turned
// into parity games for the solver pipeline.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spe/game.hpp"
#include "spe/ltl.hpp"
#include "spe/requirement.hpp"

namespace spe {

/**
 * A CNF formula. Literals are signed 1-based variable indices: +i is
 * x<i>, -i is ~x<i>. A well-formed instance has at least one clause,
 * no empty clause, and every literal within [1, num_vars].
 */
struct Cnf {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;

    /** Throws std::invalid_argument when the instance is malformed. */
    void validate() const;
};

/**
 * Parses DIMACS CNF text: optional 'c' comment lines, one 'p cnf
 * <vars> <clauses>' header, then whitespace-separated literals with
 * each clause terminated by 0. Throws std::invalid_argument on
 * malformed input.
 */
Cnf parse_dimacs(const std::string& text);
Cnf parse_dimacs_file(const std::string& path);

/**
 * Parses the inline clause syntax "x1 | ~x2; x2": clauses separated by
 * ';', literals by '|', each literal 'x<i>' or '~x<i>'. The variable
 * count is the highest index mentioned. Throws std::invalid_argument
 * on malformed input.
 */
Cnf parse_inline_cnf(const std::string& text);

/** Satisfiability by exhaustive assignment enumeration (reference oracle). */
bool cnf_brute_sat(const Cnf& cnf);

/** The satisfying assignment encoded by a witness play of gen_sat_game,
 *  read off the literal vertices visited infinitely often. Variables not
 *  mentioned in the cycle default to false. */
std::vector<char> assignment_from_play(const Cnf& cnf, const Game& g, const LassoPlay& play);

/**
 * The clause-tour game of a CNF formula. One round-robin tour visits
 * every clause: the scheduler vertex "C<j>" (owned by player "Solver")
 * picks a literal of clause j, moving to "C<j>:<lit>" (owned by player
 * "<lit>"), which either continues to the next clause or retires to the
 * self-looping vertex "bot". Colors make the tour winning for Solver
 * exactly when the literals it selects can all be true at once, so
 * Solver has a winning continuation iff the formula is satisfiable.
 */
Game gen_sat_game(const Cnf& cnf);

/**
 * Two independent clause-tour games ("g1:", "g2:" prefixes on their
 * vertices and players) joined through fresh vertices "v1" and "v2"
 * owned by a shared player "Opponent": each copy's tour passes through
 * its v<k> once per lap. The returned requirement is a fixed point of
 * the negotiation step, and it is the least fixed point iff the first
 * formula is satisfiable and the second is not.
 */
std::pair<Game, Requirement> gen_bh2_game(const Cnf& sat_side, const Cnf& unsat_side);

/**
 * A finite Kripke structure: named states over named atoms, a
 * transition relation, and a per-state atom valuation.
 */
struct Kripke {
    std::vector<std::string> atoms;
    std::vector<std::string> states;
    std::vector<std::pair<int, int>> edges;  // state index pairs
    std::vector<std::vector<char>> val;      // val[state][atom]

    int state_id(const std::string& name) const;  // -1 when absent
    int atom_id(const std::string& name) const;   // -1 when absent

    /**
     * Parses {"atoms": [...], "states": [...], "edges": [["s","t"], ...],
     * "val": {"s": ["a", ...], ...}}. States missing from "val" carry no
     * atoms. Throws std::invalid_argument on malformed input.
     */
    static Kripke from_json_text(const std::string& text);
    static Kripke from_json_file(const std::string& path);
};

/**
 * The one-player game whose plays are exactly the runs of the Kripke
 * structure (every color 2, initial state = first listed), paired with
 * the query formula rewritten from atom propositions to state
 * propositions: each atom becomes the disjunction of the states that
 * valuate it (an atom no state valuates becomes !true). Throws
 * std::invalid_argument when the transition relation is not total or
 * the formula mentions an undeclared atom.
 */
std::pair<Game, LtlFormula> kripke_to_game(const Kripke& k, const LtlFormula& formula);

}  // namespace spe
