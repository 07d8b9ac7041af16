// LTL formulas over vertex atoms: parsing, lasso evaluation, and a
// generalized Büchi tableau construction.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spe/game.hpp"

namespace spe {

/**
 * An LTL formula over a core of {true, atom, !, |, X, U}. The derived
 * connectives F, G, &, ->, and false accepted by the parser are expanded
 * into the core during parsing. Nodes are stored child-before-parent.
 */
struct LtlFormula {
    enum class Kind : unsigned char { True, Atom, Not, Or, Next, Until };
    struct Node {
        Kind kind;
        int a = -1;  // left child (or single child)
        int b = -1;  // right child
        std::string atom;
    };
    std::vector<Node> nodes;
    int root = -1;

    int size() const { return static_cast<int>(nodes.size()); }
};

/**
 * Parses "F e", "G (a -> X b)", "a U (b | !c)", etc. Atoms are
 * identifiers [A-Za-z_][A-Za-z0-9_:~]*; the names X, F, G, U, true, and
 * false are reserved. Throws std::invalid_argument on syntax errors.
 */
LtlFormula parse_ltl(const std::string& text);

std::string ltl_to_text(const LtlFormula& f);

/**
 * Truth of the formula on the lasso's infinite play, with each vertex
 * name serving as the atom that holds exactly at that vertex.
 */
bool eval_lasso(const LtlFormula& f, const Game& g, const LassoPlay& play);

/**
 * Generalized Büchi automaton from the closure tableau of the formula:
 * states are locally consistent subformula assignments, transitions
 * constrain next-step bits, and every until-node contributes one
 * acceptance set. Letters are atom valuations, supplied to the transition
 * test by the caller.
 */
struct Gba {
    struct AtomBit {
        int node;          // node index in the source formula
        std::string name;
    };
    std::vector<uint64_t> states;  // subformula assignment bitmasks
    std::vector<AtomBit> atoms;
    std::vector<int> until_nodes;  // node indices; acceptance set per entry
    std::vector<int> until_lhs;    // node index of each until's left operand
    std::vector<int> until_rhs;    // node index of each until's right operand
    std::vector<int> next_args;    // node index of each next's operand
    std::vector<int> next_nodes;
    int root = -1;

    int num_states() const { return static_cast<int>(states.size()); }
    int num_acc_sets() const { return static_cast<int>(until_nodes.size()); }

    /** The state asserts the whole formula. */
    bool is_initial(int state) const { return (states[state] >> root) & 1; }

    /** The state belongs to acceptance set `acc`. */
    bool in_acc_set(int acc, int state) const;

    /** The state's atom bits equal the given valuation (indexed like `atoms`). */
    bool letter_matches(int state, const std::vector<char>& atom_values) const;

    /** Next-step consistency of the X- and U-bits between two states. */
    bool step_allowed(int from, int to) const;
};

/** Throws std::invalid_argument when the formula has more than 64 nodes. */
Gba ltl_to_gba(const LtlFormula& f);

}  // namespace spe
