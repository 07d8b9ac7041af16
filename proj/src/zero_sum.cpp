#include "spe/zero_sum.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spe {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument(msg);
}

}  // namespace

std::string ZeroSumArena::state_label(int s) const {
    if (!state_names.empty()) return state_names[s];
    return "s" + std::to_string(s);
}

void ZeroSumArena::finalize() {
    int n = num_states();
    if (n == 0) fail("arena has no states");
    if (!state_names.empty() && state_names.size() != static_cast<size_t>(n)) {
        fail("arena state_names size mismatch");
    }
    if (priorities.empty()) fail("arena needs at least one priority dimension");
    for (const auto& dim : priorities) {
        if (dim.size() != transitions.size()) fail("arena priority row size mismatch");
        for (int p : dim)
            if (p < 0) fail("negative transition priority");
    }
    out.assign(n, {});
    in.assign(n, {});
    for (int t = 0; t < num_transitions(); ++t) {
        auto [from, to] = transitions[t];
        if (from < 0 || from >= n || to < 0 || to >= n) fail("arena transition out of range");
        out[from].push_back(t);
        in[to].push_back(t);
    }
    for (int s = 0; s < n; ++s) {
        if (out[s].empty()) fail("arena state " + state_label(s) + " has no outgoing transition");
    }
}

std::vector<char> attractor(const ZeroSumArena& a, const std::vector<char>& target, Side side,
                            std::vector<int>* moves) {
    std::vector<char> alive(a.num_states(), 1);
    if (target.size() != static_cast<size_t>(a.num_states())) {
        fail("attractor: target mask size mismatch");
    }
    // Count of alive successors not yet attracted, per state.
    std::vector<int> escape(a.num_states(), 0);
    for (int s = 0; s < a.num_states(); ++s) escape[s] = static_cast<int>(a.out[s].size());

    std::vector<char> result = target;
    if (moves) moves->assign(a.num_states(), -1);
    std::deque<int> queue;
    for (int s = 0; s < a.num_states(); ++s) {
        if (result[s]) queue.push_back(s);
    }
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        for (int t : a.in[s]) {
            int u = a.transitions[t].first;
            if (result[u]) continue;
            if (a.owner[u] == side) {
                result[u] = 1;
                if (moves) (*moves)[u] = t;
                queue.push_back(u);
            } else {
                if (--escape[u] == 0) {
                    result[u] = 1;
                    queue.push_back(u);
                }
            }
        }
    }
    return result;
}

namespace {

// State-priority parity game obtained by splitting every transition with a
// midpoint state that carries the transition's priorities. Original states
// get per-dimension neutral priorities that are even and larger than any
// real one, so they never decide a cycle's minimum.
struct SplitGame {
    std::vector<Side> owner;
    std::vector<std::vector<int>> succ;
    std::vector<std::vector<int>> pred;
    std::vector<std::vector<int>> prio;  // [dimension][state]
    std::vector<int> mid_transition;     // transition index for midpoints, -1 for originals
    int originals = 0;

    int size() const { return static_cast<int>(owner.size()); }
};

SplitGame split_arena(const ZeroSumArena& a) {
    SplitGame sg;
    sg.originals = a.num_states();
    int total = a.num_states() + a.num_transitions();
    sg.owner.resize(total);
    sg.succ.assign(total, {});
    sg.pred.assign(total, {});
    sg.prio.assign(a.num_dims(), std::vector<int>(total, 0));
    sg.mid_transition.assign(total, -1);

    std::vector<int> neutral(a.num_dims(), 0);
    for (int d = 0; d < a.num_dims(); ++d) {
        int max_p = 0;
        for (int p : a.priorities[d]) max_p = std::max(max_p, p);
        neutral[d] = (max_p + 2) & ~1;
    }

    for (int s = 0; s < a.num_states(); ++s) {
        sg.owner[s] = a.owner[s];
        for (int d = 0; d < a.num_dims(); ++d) sg.prio[d][s] = neutral[d];
    }
    for (int t = 0; t < a.num_transitions(); ++t) {
        int m = a.num_states() + t;
        auto [from, to] = a.transitions[t];
        sg.owner[m] = a.owner[from];  // single successor, owner is irrelevant
        sg.mid_transition[m] = t;
        for (int d = 0; d < a.num_dims(); ++d) sg.prio[d][m] = a.priorities[d][t];
        sg.succ[from].push_back(m);
        sg.pred[m].push_back(from);
        sg.succ[m].push_back(to);
        sg.pred[to].push_back(m);
    }
    return sg;
}

// Attractor inside the subgame induced by `alive`. Records one forcing
// successor per newly attracted state owned by `side`.
std::vector<char> split_attractor(const SplitGame& sg, const std::vector<char>& alive,
                                  const std::vector<char>& target, Side side,
                                  std::vector<int>* moves = nullptr) {
    std::vector<int> escape(sg.size(), 0);
    for (int s = 0; s < sg.size(); ++s) {
        if (!alive[s]) continue;
        for (int w : sg.succ[s])
            if (alive[w]) ++escape[s];
    }
    std::vector<char> result(sg.size(), 0);
    std::deque<int> queue;
    for (int s = 0; s < sg.size(); ++s) {
        if (alive[s] && target[s]) {
            result[s] = 1;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        for (int u : sg.pred[s]) {
            if (!alive[u] || result[u]) continue;
            if (sg.owner[u] == side) {
                result[u] = 1;
                if (moves) (*moves)[u] = s;
                queue.push_back(u);
            } else if (--escape[u] == 0) {
                result[u] = 1;
                queue.push_back(u);
            }
        }
    }
    return result;
}

int first_alive_successor(const SplitGame& sg, const std::vector<char>& alive, int s) {
    for (int w : sg.succ[s])
        if (alive[w]) return w;
    return -1;
}

// Classic recursive algorithm on the single-dimension split game. Writes
// memoryless strategies (as successor states) for both sides into strat;
// entries are overwritten as regions are finalized bottom-up.
struct ZielonkaSolver {
    const SplitGame& sg;
    int dim;
    std::vector<int>& strat_even;
    std::vector<int>& strat_odd;

    std::pair<std::vector<char>, std::vector<char>> solve(const std::vector<char>& alive) {
        int min_p = -1;
        for (int s = 0; s < sg.size(); ++s) {
            if (alive[s] && (min_p < 0 || sg.prio[dim][s] < min_p)) min_p = sg.prio[dim][s];
        }
        std::vector<char> none(sg.size(), 0);
        if (min_p < 0) return {none, none};

        Side side = (min_p % 2 == 0) ? Side::Even : Side::Odd;
        std::vector<int>& strat_side = (side == Side::Even) ? strat_even : strat_odd;
        std::vector<int>& strat_opp = (side == Side::Even) ? strat_odd : strat_even;

        std::vector<char> target(sg.size(), 0);
        for (int s = 0; s < sg.size(); ++s) {
            if (alive[s] && sg.prio[dim][s] == min_p) target[s] = 1;
        }
        std::vector<int> attr_moves(sg.size(), -1);
        std::vector<char> head = split_attractor(sg, alive, target, side, &attr_moves);

        std::vector<char> rest = alive;
        for (int s = 0; s < sg.size(); ++s)
            if (head[s]) rest[s] = 0;
        auto [sub_even, sub_odd] = solve(rest);
        std::vector<char>& sub_opp = (side == Side::Even) ? sub_odd : sub_even;

        bool opp_empty = std::none_of(sub_opp.begin(), sub_opp.end(), [](char b) { return b; });
        if (opp_empty) {
            // side wins everywhere: recursion strategies stand on the rest,
            // attractor moves cover the head, and target states pick any
            // alive successor.
            for (int s = 0; s < sg.size(); ++s) {
                if (!alive[s] || sg.owner[s] != side) continue;
                if (head[s]) {
                    strat_side[s] = target[s] ? first_alive_successor(sg, alive, s)
                                              : attr_moves[s];
                }
            }
            std::vector<char> win = alive;
            return side == Side::Even ? std::make_pair(win, none) : std::make_pair(none, win);
        }

        Side opp = opponent(side);
        std::vector<int> opp_moves(sg.size(), -1);
        std::vector<char> opp_attr = split_attractor(sg, alive, sub_opp, opp, &opp_moves);
        for (int s = 0; s < sg.size(); ++s) {
            if (opp_attr[s] && !sub_opp[s] && sg.owner[s] == opp) strat_opp[s] = opp_moves[s];
        }
        std::vector<char> remaining = alive;
        for (int s = 0; s < sg.size(); ++s)
            if (opp_attr[s]) remaining[s] = 0;
        auto [fin_even, fin_odd] = solve(remaining);
        std::vector<char>& fin_opp = (side == Side::Even) ? fin_odd : fin_even;
        std::vector<char>& fin_side = (side == Side::Even) ? fin_even : fin_odd;
        for (int s = 0; s < sg.size(); ++s)
            if (opp_attr[s]) fin_opp[s] = 1;
        return side == Side::Even ? std::make_pair(fin_side, fin_opp)
                                  : std::make_pair(fin_opp, fin_side);
    }
};

SolveResult map_back(const ZeroSumArena& a, const SplitGame& sg, const std::vector<char>& win_even,
                     const std::vector<int>& strat_even, const std::vector<int>& strat_odd) {
    SolveResult result;
    result.winner.assign(a.num_states(), Side::Odd);
    result.strategy_even.assign(a.num_states(), -1);
    result.strategy_odd.assign(a.num_states(), -1);
    for (int s = 0; s < a.num_states(); ++s) {
        result.winner[s] = win_even[s] ? Side::Even : Side::Odd;
        const std::vector<int>& strat =
            win_even[s] ? strat_even : strat_odd;
        if (a.owner[s] == result.winner[s] && strat[s] >= 0) {
            int m = strat[s];
            if (sg.mid_transition[m] >= 0) {
                (win_even[s] ? result.strategy_even : result.strategy_odd)[s] =
                    sg.mid_transition[m];
            }
        }
    }
    return result;
}

}  // namespace

SolveResult solve_parity(const ZeroSumArena& a) {
    if (a.out.empty()) fail("solve_parity: arena not finalized");
    if (a.num_dims() != 1) fail("solve_parity: arena must have exactly one dimension");
    SplitGame sg = split_arena(a);
    std::vector<int> strat_even(sg.size(), -1), strat_odd(sg.size(), -1);
    ZielonkaSolver solver{sg, 0, strat_even, strat_odd};
    std::vector<char> all(sg.size(), 1);
    auto [win_even, win_odd] = solver.solve(all);
    return map_back(a, sg, win_even, strat_even, strat_odd);
}

namespace {

// Generalized solver on the split game: Even needs every dimension's
// minimal infinitely-visited priority even; Odd needs one odd dimension.
// Works by peeling Odd dominions anchored at an odd priority that Even
// cannot push the play below.
struct GeneralizedSolver {
    const SplitGame& sg;
    std::vector<int>& strat_odd;

    // Returns the Even-won submask of `alive`; everything else in `alive`
    // is Odd-won with strat_odd filled in on Odd's states.
    std::vector<char> solve(std::vector<char> alive) {
        while (true) {
            bool any_alive = std::any_of(alive.begin(), alive.end(), [](char b) { return b; });
            if (!any_alive) return alive;

            std::vector<char> dominion = find_dominion(alive);
            bool found = std::any_of(dominion.begin(), dominion.end(), [](char b) { return b; });
            if (!found) return alive;  // Even wins everything left

            std::vector<int> moves(sg.size(), -1);
            std::vector<char> peeled = split_attractor(sg, alive, dominion, Side::Odd, &moves);
            for (int s = 0; s < sg.size(); ++s) {
                if (peeled[s] && !dominion[s] && sg.owner[s] == Side::Odd) strat_odd[s] = moves[s];
            }
            for (int s = 0; s < sg.size(); ++s)
                if (peeled[s]) alive[s] = 0;
        }
    }

private:
    // Searches for an Odd dominion inside `alive`: a trap for Even from
    // which Odd forces some dimension's minimal recurring priority to stay
    // on an odd value c. Fills strat_odd inside the dominion when found.
    std::vector<char> find_dominion(const std::vector<char>& alive) {
        std::vector<char> none(sg.size(), 0);
        for (int d = 0; d < static_cast<int>(sg.prio.size()); ++d) {
            std::set<int> odd_values;
            for (int s = 0; s < sg.size(); ++s) {
                if (alive[s] && sg.prio[d][s] % 2 != 0) odd_values.insert(sg.prio[d][s]);
            }
            for (int c : odd_values) {
                std::vector<char> low(sg.size(), 0);
                for (int s = 0; s < sg.size(); ++s) {
                    if (alive[s] && sg.prio[d][s] < c) low[s] = 1;
                }
                std::vector<char> even_pull = split_attractor(sg, alive, low, Side::Even);
                std::vector<char> safe = alive;
                for (int s = 0; s < sg.size(); ++s)
                    if (even_pull[s]) safe[s] = 0;

                std::vector<char> result = anchored_search(safe, d, c);
                if (std::any_of(result.begin(), result.end(), [](char b) { return b; })) {
                    return result;
                }
            }
        }
        return none;
    }

    // Inside `safe` every state has dimension-d priority >= c. Looks for a
    // sub-trap where Odd forces the c-states to recur while Even wins
    // nothing, shrinking by Even-won regions until fixpoint or failure.
    std::vector<char> anchored_search(std::vector<char> region, int d, int c) {
        std::vector<char> none(sg.size(), 0);
        while (true) {
            std::vector<char> target(sg.size(), 0);
            bool has_target = false;
            for (int s = 0; s < sg.size(); ++s) {
                if (region[s] && sg.prio[d][s] == c) {
                    target[s] = 1;
                    has_target = true;
                }
            }
            if (!has_target) return none;

            std::vector<int> pull_moves(sg.size(), -1);
            std::vector<char> pulled = split_attractor(sg, region, target, Side::Odd, &pull_moves);
            std::vector<char> rest = region;
            for (int s = 0; s < sg.size(); ++s)
                if (pulled[s]) rest[s] = 0;

            GeneralizedSolver sub{sg, strat_odd};
            std::vector<char> sub_even = sub.solve(rest);
            bool even_wins_some =
                std::any_of(sub_even.begin(), sub_even.end(), [](char b) { return b; });
            if (!even_wins_some) {
                // The whole region is an Odd dominion: recursion already
                // filled strat_odd on rest; record the pull toward the
                // anchor states and a stay-inside move on the anchors.
                for (int s = 0; s < sg.size(); ++s) {
                    if (!region[s] || sg.owner[s] != Side::Odd) continue;
                    if (target[s]) {
                        strat_odd[s] = first_alive_successor(sg, region, s);
                    } else if (pulled[s]) {
                        strat_odd[s] = pull_moves[s];
                    }
                }
                return region;
            }

            std::vector<char> even_area = split_attractor(sg, region, sub_even, Side::Even);
            for (int s = 0; s < sg.size(); ++s)
                if (even_area[s]) region[s] = 0;
        }
    }
};

}  // namespace

SolveResult solve_generalized(const ZeroSumArena& a) {
    if (a.out.empty()) fail("solve_generalized: arena not finalized");
    SplitGame sg = split_arena(a);
    std::vector<int> strat_odd(sg.size(), -1);
    GeneralizedSolver solver{sg, strat_odd};
    std::vector<char> all(sg.size(), 1);
    std::vector<char> win_even = solver.solve(all);

    SolveResult result;
    result.winner.assign(a.num_states(), Side::Odd);
    result.strategy_even.assign(a.num_states(), -1);
    result.strategy_odd.assign(a.num_states(), -1);
    for (int s = 0; s < a.num_states(); ++s) {
        result.winner[s] = win_even[s] ? Side::Even : Side::Odd;
        if (!win_even[s] && a.owner[s] == Side::Odd && strat_odd[s] >= 0) {
            int m = strat_odd[s];
            if (sg.mid_transition[m] >= 0) result.strategy_odd[s] = sg.mid_transition[m];
        }
    }
    return result;
}

std::string arena_to_dot(const ZeroSumArena& a) {
    std::ostringstream dot;
    dot << "digraph arena {\n";
    for (int s = 0; s < a.num_states(); ++s) {
        dot << "  n" << s << " [label=\"" << a.state_label(s) << "\", shape="
            << (a.owner[s] == Side::Even ? "ellipse" : "box") << "];\n";
    }
    for (int t = 0; t < a.num_transitions(); ++t) {
        dot << "  n" << a.transitions[t].first << " -> n" << a.transitions[t].second
            << " [label=\"";
        for (int d = 0; d < a.num_dims(); ++d) {
            if (d > 0) dot << ",";
            dot << a.priorities[d][t];
        }
        dot << "\"];\n";
    }
    dot << "}\n";
    return dot.str();
}

}  // namespace spe
