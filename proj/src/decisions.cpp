#include "spe/decisions.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spe/negotiation.hpp"
#include "scc.hpp"

namespace spe {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string req_val_text(ReqVal v) {
    switch (v) {
        case ReqVal::Zero: return "0";
        case ReqVal::One: return "1";
        default: return "inf";
    }
}

// ---------------------------------------------------------------------------
// Shared witness search.
//
// Both existence queries reduce to the same scheme: a finite node graph
// whose nodes carry game vertices, a set of entry nodes, and optional
// acceptance classes a witness cycle must intersect. For every tuple c̄ of
// per-player colors (the intended minimal colors of the cycle), nodes whose
// vertex demands payoff 1 from a player with odd c̄ are banned outright;
// the cycle is additionally confined to nodes with colors ≥ c̄ and must
// realize every c̄ᵢ exactly, which pins the witness payoff to the parities
// of c̄.
// ---------------------------------------------------------------------------

struct SearchGraph {
    int n = 0;
    std::vector<std::vector<int>> succ;
    std::vector<VertexId> vertex_of;
    std::vector<int> entries;
    std::vector<std::vector<char>> acc;  // [class][node]: cycle must meet every class
};

// Shortest node path from `from` to `to` through `ok` nodes (both ends
// included); empty when unreachable. Assumes ok[from].
std::vector<int> node_path(const SearchGraph& sg, int from, int to,
                           const std::vector<char>& ok) {
    std::vector<int> parent(sg.n, -2);
    std::queue<int> q;
    parent[from] = -1;
    q.push(from);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (u == to) break;
        for (int w : sg.succ[u]) {
            if (!ok[w] || parent[w] != -2) continue;
            parent[w] = u;
            q.push(w);
        }
    }
    if (parent[to] == -2) return {};
    std::vector<int> path;
    for (int u = to; u != -1; u = parent[u]) path.push_back(u);
    std::reverse(path.begin(), path.end());
    return path;
}

// A cycle starting at `anchor` that visits every target, with every step an
// edge of the subgraph induced by `ok` (the anchor's component). The final
// element has an edge back to the anchor; a single-element result relies on
// a self-loop.
std::vector<int> cycle_through(const SearchGraph& sg, int anchor, std::vector<int> targets,
                               const std::vector<char>& ok) {
    std::vector<int> cyc{anchor};
    int cur = anchor;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (int t : targets) {
        if (t == cur || t == anchor) continue;
        std::vector<int> leg = node_path(sg, cur, t, ok);
        cyc.insert(cyc.end(), leg.begin() + 1, leg.end());
        cur = t;
    }
    if (cur == anchor) {
        bool self_loop = false;
        for (int w : sg.succ[anchor]) {
            if (w == anchor) {
                self_loop = true;
                break;
            }
        }
        if (self_loop) return cyc;
        // Strongly connected with more than one node: take any internal
        // edge and come back.
        for (int w : sg.succ[anchor]) {
            if (ok[w]) {
                cyc.push_back(w);
                cur = w;
                break;
            }
        }
    }
    std::vector<int> back = node_path(sg, cur, anchor, ok);
    cyc.insert(cyc.end(), back.begin() + 1, back.end() - 1);
    return cyc;
}

LassoPlay project(const SearchGraph& sg, const std::vector<int>& prefix,
                  const std::vector<int>& cycle) {
    LassoPlay play;
    for (size_t k = 0; k + 1 < prefix.size(); ++k) play.prefix.push_back(sg.vertex_of[prefix[k]]);
    for (int s : cycle) play.cycle.push_back(sg.vertex_of[s]);
    return play;
}

// Runs one tuple: returns a validated witness or nothing.
std::optional<LassoPlay> attempt_tuple(const Game& g, const Requirement& base,
                                       const SearchGraph& sg, const std::vector<int>& tuple,
                                       const std::function<bool(const LassoPlay&)>& validate) {
    const int np = g.num_players();
    std::vector<char> path_ok(sg.n, 0), cyc_ok(sg.n, 0);
    for (int s = 0; s < sg.n; ++s) {
        VertexId v = sg.vertex_of[s];
        if (base[v] == ReqVal::Inf) continue;
        if (base[v] == ReqVal::One && tuple[g.owner(v)] % 2 == 1) continue;
        path_ok[s] = 1;
        bool high = true;
        for (PlayerId p = 0; p < np && high; ++p) high = g.color(p, v) >= tuple[p];
        cyc_ok[s] = high;
    }

    // Reachability from the entries through permitted nodes.
    std::vector<int> parent(sg.n, -2);
    std::queue<int> q;
    for (int e : sg.entries) {
        if (path_ok[e] && parent[e] == -2) {
            parent[e] = -1;
            q.push(e);
        }
    }
    if (q.empty()) return std::nullopt;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : sg.succ[u]) {
            if (!path_ok[w] || parent[w] != -2) continue;
            parent[w] = u;
            q.push(w);
        }
    }

    auto comps = detail::sccs(sg.n, cyc_ok, [&](int s) -> const std::vector<int>& {
        return sg.succ[s];
    });
    std::vector<char> in_comp(sg.n, 0);
    for (const auto& comp : comps) {
        for (int s : comp) in_comp[s] = 1;

        int anchor = -1;
        for (int s : comp) {
            if (parent[s] != -2 && (anchor < 0 || s < anchor)) anchor = s;
        }
        bool good = anchor >= 0;

        // The cycle must be traversable at all.
        if (good && comp.size() == 1) {
            good = false;
            for (int w : sg.succ[comp[0]]) {
                if (w == comp[0]) {
                    good = true;
                    break;
                }
            }
        }

        // Every player's color must be realized exactly, every acceptance
        // class must be met; collect one representative each.
        std::vector<int> targets;
        for (PlayerId p = 0; p < np && good; ++p) {
            int hit = -1;
            for (int s : comp) {
                if (g.color(p, sg.vertex_of[s]) == tuple[p]) {
                    hit = s;
                    break;
                }
            }
            if (hit < 0) {
                good = false;
            } else {
                targets.push_back(hit);
            }
        }
        for (size_t a = 0; a < sg.acc.size() && good; ++a) {
            int hit = -1;
            for (int s : comp) {
                if (sg.acc[a][s]) {
                    hit = s;
                    break;
                }
            }
            if (hit < 0) {
                good = false;
            } else {
                targets.push_back(hit);
            }
        }

        if (good) {
            std::vector<int> prefix;
            for (int u = anchor; u != -1; u = parent[u]) prefix.push_back(u);
            std::reverse(prefix.begin(), prefix.end());
            std::vector<int> cycle = cycle_through(sg, anchor, targets, in_comp);
            LassoPlay play = project(sg, prefix, cycle);
            if (validate(play)) return play;
        }

        for (int s : comp) in_comp[s] = 0;
    }
    return std::nullopt;
}

// Lexicographic tuple search; with several jobs the witness of the
// lexicographically first successful tuple is returned.
std::optional<LassoPlay> tuple_search(const Game& g, const Requirement& base,
                                      const SearchGraph& sg,
                                      const std::vector<std::vector<int>>& choices, int jobs,
                                      const std::function<bool(const LassoPlay&)>& validate) {
    const int np = g.num_players();
    std::uint64_t total = 1;
    for (PlayerId p = 0; p < np; ++p) {
        if (choices[p].empty()) return std::nullopt;
        if (total > (std::uint64_t{1} << 40) / choices[p].size()) {
            throw std::logic_error("witness search: too many color tuples");
        }
        total *= choices[p].size();
    }

    auto decode = [&](std::uint64_t idx) {
        std::vector<int> tuple(np);
        for (PlayerId p = np - 1; p >= 0; --p) {
            tuple[p] = choices[p][idx % choices[p].size()];
            idx /= choices[p].size();
        }
        return tuple;
    };

    if (jobs <= 1) {
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            auto found = attempt_tuple(g, base, sg, decode(idx), validate);
            if (found) return found;
        }
        return std::nullopt;
    }

    const std::uint64_t chunk = 16;
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> best{total};
    std::optional<LassoPlay> best_play;
    std::mutex best_mu;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    int threads = std::min<std::uint64_t>(jobs, (total + chunk - 1) / chunk);
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            try {
                for (;;) {
                    std::uint64_t lo = next.fetch_add(chunk);
                    if (lo >= total || lo >= best.load()) return;
                    std::uint64_t hi = std::min(lo + chunk, total);
                    for (std::uint64_t idx = lo; idx < hi && idx < best.load(); ++idx) {
                        auto found = attempt_tuple(g, base, sg, decode(idx), validate);
                        if (found) {
                            std::lock_guard<std::mutex> lock(best_mu);
                            if (idx < best.load()) {
                                best.store(idx);
                                best_play = std::move(found);
                            }
                            return;
                        }
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(best_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return best_play;
}

VertexId play_start(const LassoPlay& play) {
    return play.prefix.empty() ? play.cycle.front() : play.prefix.front();
}

void validate_threshold(const Game& g, const Threshold& t) {
    const int np = g.num_players();
    if (static_cast<int>(t.lower.size()) != np || static_cast<int>(t.upper.size()) != np) {
        fail("threshold: bounds must name every player");
    }
    for (PlayerId p = 0; p < np; ++p) {
        if (t.lower[p] < 0 || t.lower[p] > 1 || t.upper[p] < 0 || t.upper[p] > 1) {
            fail("threshold: bounds must be 0 or 1");
        }
        if (t.lower[p] > t.upper[p]) {
            fail("threshold: lower bound above upper bound for player '" + g.player_name(p) +
                 "'");
        }
    }
}

}  // namespace

Threshold parse_threshold(const Game& g, const std::string& lower_text,
                          const std::string& upper_text) {
    Threshold t;
    t.lower.assign(g.num_players(), 0);
    t.upper.assign(g.num_players(), 1);

    auto trim = [](const std::string& s) {
        size_t b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return std::string();
        size_t e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    };
    auto parse_into = [&](const std::string& text, std::vector<int>& out, const char* which) {
        if (trim(text).empty()) return;
        std::set<PlayerId> seen;
        std::stringstream in(text);
        std::string piece;
        while (std::getline(in, piece, ',')) {
            piece = trim(piece);
            size_t eq = piece.find('=');
            if (piece.empty() || eq == std::string::npos) {
                fail(std::string("threshold: expected 'Player=0|1' in ") + which + " bound");
            }
            std::string name = trim(piece.substr(0, eq));
            std::string val = trim(piece.substr(eq + 1));
            auto p = g.player_id(name);
            if (!p) fail("threshold: unknown player '" + name + "'");
            if (val != "0" && val != "1") {
                fail("threshold: value for '" + name + "' must be 0 or 1");
            }
            if (!seen.insert(*p).second) {
                fail("threshold: duplicate entry for player '" + name + "'");
            }
            out[*p] = val == "1" ? 1 : 0;
        }
    };
    parse_into(lower_text, t.lower, "lower");
    parse_into(upper_text, t.upper, "upper");
    for (PlayerId p = 0; p < g.num_players(); ++p) {
        if (t.lower[p] > t.upper[p]) {
            fail("threshold: lower bound above upper bound for player '" + g.player_name(p) +
                 "'");
        }
    }
    return t;
}

bool is_fixed_point(const Game& g, const Requirement& req, std::string* why, int jobs) {
    if (req.size() != g.num_vertices()) fail("is_fixed_point: requirement size mismatch");
    if (!satisfiable(g, req)) {
        if (why) *why = "the requirement is not satisfiable";
        return false;
    }
    Requirement n = nego(g, req, jobs);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (n[v] != req[v]) {
            if (why) {
                *why = "nego moves vertex '" + g.vertex_name(v) + "' from " +
                       req_val_text(req[v]) + " to " + req_val_text(n[v]);
            }
            return false;
        }
    }
    return true;
}

bool is_lfp(const Game& g, const Requirement& req, std::string* why, int jobs) {
    if (req.size() != g.num_vertices()) fail("is_lfp: requirement size mismatch");
    Requirement star = lfp(g, jobs).least;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (star[v] != req[v]) {
            if (why) {
                *why = "the least fixed point has value " + req_val_text(star[v]) +
                       " at vertex '" + g.vertex_name(v) + "', not " + req_val_text(req[v]);
            }
            return false;
        }
    }
    return true;
}

std::optional<LassoPlay> constrained_existence(const Game& g, VertexId start, const Threshold& t,
                                               EqKind kind, int jobs) {
    Requirement base = kind == EqKind::Spe ? lfp(g, jobs).least
                                           : nego(g, Requirement::zero(g), jobs);
    return constrained_existence_with_base(g, base, start, t, jobs);
}

std::optional<LassoPlay> constrained_existence_with_base(const Game& g, const Requirement& base,
                                                         VertexId start, const Threshold& t,
                                                         int jobs) {
    if (base.size() != g.num_vertices()) fail("constrained existence: requirement size mismatch");
    if (start < 0 || start >= g.num_vertices()) fail("constrained existence: unknown start");
    validate_threshold(g, t);

    SearchGraph sg;
    sg.n = g.num_vertices();
    sg.succ.resize(sg.n);
    sg.vertex_of.resize(sg.n);
    for (VertexId v = 0; v < sg.n; ++v) {
        sg.succ[v] = g.successors(v);
        sg.vertex_of[v] = v;
    }
    sg.entries = {start};

    std::vector<std::vector<int>> choices(g.num_players());
    for (PlayerId p = 0; p < g.num_players(); ++p) {
        for (int c : g.distinct_colors(p)) {
            if (t.lower[p] == 1 && c % 2 != 0) continue;
            if (t.upper[p] == 0 && c % 2 != 1) continue;
            choices[p].push_back(c);
        }
    }

    auto validate = [&](const LassoPlay& play) {
        if (!valid_lasso(g, play) || play_start(play) != start) return false;
        if (!consistent(g, base, play)) return false;
        std::vector<int> pay = payoff(g, play);
        for (PlayerId p = 0; p < g.num_players(); ++p) {
            if (pay[p] < t.lower[p] || pay[p] > t.upper[p]) return false;
        }
        return true;
    };
    return tuple_search(g, base, sg, choices, jobs, validate);
}

std::optional<LassoPlay> spe_verify(const Game& g, VertexId start, const LtlFormula& formula) {
    if (start < 0 || start >= g.num_vertices()) fail("spe_verify: unknown start");
    for (const auto& node : formula.nodes) {
        if (node.kind == LtlFormula::Kind::Atom && !g.vertex_id(node.atom)) {
            fail("spe_verify: unbound atom '" + node.atom + "'");
        }
    }

    Requirement star = lfp(g).least;
    Gba gba = ltl_to_gba(formula);
    const int S = gba.num_states();

    // The letter read at a vertex: exactly the atoms naming that vertex.
    std::vector<std::vector<char>> letter(g.num_vertices());
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        letter[v].resize(gba.atoms.size());
        for (size_t k = 0; k < gba.atoms.size(); ++k) {
            letter[v][k] = gba.atoms[k].name == g.vertex_name(v) ? 1 : 0;
        }
    }

    // Product nodes: (vertex, automaton state) with matching letter.
    std::vector<std::vector<int>> node_id(g.num_vertices(), std::vector<int>(S, -1));
    SearchGraph sg;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        for (int b = 0; b < S; ++b) {
            if (!gba.letter_matches(b, letter[v])) continue;
            node_id[v][b] = sg.n++;
            sg.vertex_of.push_back(v);
        }
    }
    sg.succ.resize(sg.n);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        for (int b = 0; b < S; ++b) {
            int s = node_id[v][b];
            if (s < 0) continue;
            for (VertexId w : g.successors(v)) {
                for (int b2 = 0; b2 < S; ++b2) {
                    int t = node_id[w][b2];
                    if (t >= 0 && gba.step_allowed(b, b2)) sg.succ[s].push_back(t);
                }
            }
        }
    }
    for (int b = 0; b < S; ++b) {
        int s = node_id[start][b];
        if (s >= 0 && gba.is_initial(b)) sg.entries.push_back(s);
    }
    if (sg.entries.empty()) return std::nullopt;
    sg.acc.assign(gba.num_acc_sets(), std::vector<char>(sg.n, 0));
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        for (int b = 0; b < S; ++b) {
            int s = node_id[v][b];
            if (s < 0) continue;
            for (int a = 0; a < gba.num_acc_sets(); ++a) {
                sg.acc[a][s] = gba.in_acc_set(a, b) ? 1 : 0;
            }
        }
    }

    std::vector<std::vector<int>> choices(g.num_players());
    for (PlayerId p = 0; p < g.num_players(); ++p) choices[p] = g.distinct_colors(p);

    auto validate = [&](const LassoPlay& play) {
        return valid_lasso(g, play) && play_start(play) == start &&
               consistent(g, star, play) && eval_lasso(formula, g, play);
    };
    return tuple_search(g, star, sg, choices, 1, validate);
}

}  // namespace spe
