#include "spe/negotiation.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "scc.hpp"

namespace spe {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void validate_requirement(const Game& g, const Requirement& req, const char* who) {
    if (req.size() != g.num_vertices()) {
        fail(std::string(who) + ": requirement size does not match the game");
    }
}

std::uint64_t player_bit(PlayerId p) { return std::uint64_t{1} << p; }

// ---------------------------------------------------------------------------
// Concrete negotiation arena.
//
// States are interned on the fly: Prover states (u, P) own the choice of the
// next proposed vertex; Challenger states (u>v, P) either accept v or, when u
// belongs to the main player, deviate to another successor of u. The memory P
// collects the players whose pending demand (a visited vertex with value 1)
// the current proposal still has to honor; it is wiped by deviations because
// a deviation abandons the proposal that created the demand.
// ---------------------------------------------------------------------------

struct ConcKey {
    int u;              // current vertex
    int v;              // proposed successor; -1 for Prover states
    std::uint64_t mem;  // players with a pending demand

    bool operator<(const ConcKey& o) const {
        return std::tie(u, v, mem) < std::tie(o.u, o.v, o.mem);
    }
};

class ConcreteBuilder {
public:
    ConcreteBuilder(const Game& g, const Requirement& req, PlayerId main)
        : g_(g), req_(req), main_(main) {
        if (g.num_players() > 60) fail("build_concrete_game: too many players for set memory");
        m_ = (g.max_color() + 2) & ~1;  // smallest even value above every color
        dims_ = g.num_players() + 1;    // one per player, plus the main dimension
        arena_.priorities.resize(dims_);
        all_m_.assign(dims_, m_);
        prio_.assign(dims_, 0);
    }

    int add_entry(VertexId start) {
        std::uint64_t mem = req_[start] == ReqVal::One ? player_bit(main_) : 0;
        return intern({start, -1, mem});
    }

    void expand() {
        while (!todo_.empty()) {
            int id = todo_.front();
            todo_.pop();
            ConcKey k = keys_[id];  // by value: intern() grows keys_
            if (k.v < 0) {
                for (VertexId v : g_.successors(k.u)) {
                    add_transition(id, intern({k.u, v, k.mem}), all_m_);
                }
                continue;
            }
            // Acceptation: the play moves to the proposed vertex; a pending
            // demand is scored with the demanding player's color, everything
            // else stays neutral; the main dimension shifts parity so that an
            // even outcome means the main player loses.
            std::uint64_t q = k.mem;
            if (req_[k.v] == ReqVal::One) q |= player_bit(g_.owner(k.v));
            for (PlayerId d = 0; d < g_.num_players(); ++d) {
                prio_[d] = (k.mem >> d & 1) ? g_.color(d, k.v) : m_;
            }
            prio_[g_.num_players()] = g_.color(main_, k.v) + 1;
            add_transition(id, intern({k.v, -1, q}), prio_);

            // Deviations: only the main player may deviate, at her vertices.
            if (g_.owner(k.u) == main_) {
                for (VertexId w : g_.successors(k.u)) {
                    if (w == k.v) continue;
                    std::uint64_t qq =
                        req_[w] == ReqVal::One ? player_bit(g_.owner(w)) : 0;
                    std::fill(prio_.begin(), prio_.end() - 1, 0);
                    prio_[g_.num_players()] = g_.color(main_, w) + 1;
                    add_transition(id, intern({w, -1, qq}), prio_);
                }
            }
        }
        arena_.finalize();
    }

    ZeroSumArena take_arena() { return std::move(arena_); }

private:
    int intern(const ConcKey& k) {
        auto it = index_.find(k);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(keys_.size());
        index_.emplace(k, id);
        keys_.push_back(k);
        arena_.owner.push_back(k.v < 0 ? Side::Even : Side::Odd);
        arena_.state_names.push_back(state_name(k));
        todo_.push(id);
        return id;
    }

    void add_transition(int from, int to, const std::vector<int>& prio) {
        arena_.transitions.emplace_back(from, to);
        for (int d = 0; d < dims_; ++d) arena_.priorities[d].push_back(prio[d]);
    }

    std::string state_name(const ConcKey& k) const {
        std::string mem = "{";
        bool first = true;
        for (PlayerId p = 0; p < g_.num_players(); ++p) {
            if (k.mem >> p & 1) {
                if (!first) mem += ',';
                mem += g_.player_name(p);
                first = false;
            }
        }
        mem += '}';
        if (k.v < 0) return "(" + g_.vertex_name(k.u) + "," + mem + ")";
        return "(" + g_.vertex_name(k.u) + ">" + g_.vertex_name(k.v) + "," + mem + ")";
    }

    const Game& g_;
    const Requirement& req_;
    PlayerId main_;
    int m_ = 0;
    int dims_ = 0;
    std::map<ConcKey, int> index_;
    std::vector<ConcKey> keys_;
    std::queue<int> todo_;
    std::vector<int> all_m_;
    std::vector<int> prio_;
    ZeroSumArena arena_;
};

ConcreteGame build_multi(const Game& g, const Requirement& req, PlayerId main,
                         const std::vector<VertexId>& starts) {
    ConcreteBuilder b(g, req, main);
    ConcreteGame cg;
    cg.main_player = main;
    for (VertexId v : starts) cg.entries.emplace_back(v, b.add_entry(v));
    b.expand();
    cg.arena = b.take_arena();
    cg.initial_state = cg.entries.empty() ? -1 : cg.entries.front().second;
    return cg;
}

// Recomputes the negotiation value at the selected vertices (grouped by
// owner, one arena and one solve per owner) and keeps req elsewhere.
Requirement nego_at(const Game& g, const Requirement& req, const std::vector<char>& at,
                    int jobs) {
    Requirement out = req;
    std::vector<std::vector<VertexId>> mine(g.num_players());
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (at[v]) mine[g.owner(v)].push_back(v);
    }
    std::vector<PlayerId> tasks;
    for (PlayerId p = 0; p < g.num_players(); ++p) {
        if (!mine[p].empty()) tasks.push_back(p);
    }

    std::vector<std::vector<ReqVal>> vals(tasks.size());
    auto run_task = [&](size_t ti) {
        PlayerId p = tasks[ti];
        ConcreteGame cg = build_multi(g, req, p, mine[p]);
        SolveResult res = solve_generalized(cg.arena);
        vals[ti].reserve(cg.entries.size());
        for (const auto& [v, s] : cg.entries) {
            (void)v;
            vals[ti].push_back(res.winner[s] == Side::Even ? ReqVal::Zero : ReqVal::One);
        }
    };

    int threads = std::min<int>(std::max(jobs, 1), static_cast<int>(tasks.size()));
    if (threads <= 1) {
        for (size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
    } else {
        std::atomic<size_t> next{0};
        std::exception_ptr err;
        std::mutex err_mu;
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (size_t ti; (ti = next.fetch_add(1)) < tasks.size();) {
                    try {
                        run_task(ti);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mu);
                        if (!err) err = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }

    for (size_t ti = 0; ti < tasks.size(); ++ti) {
        const auto& group = mine[tasks[ti]];
        for (size_t j = 0; j < group.size(); ++j) out[group[j]] = vals[ti][j];
    }
    return out;
}

}  // namespace

ConcreteGame build_concrete_game(const Game& g, const Requirement& req, PlayerId player,
                                 VertexId start) {
    validate_requirement(g, req, "build_concrete_game");
    if (player < 0 || player >= g.num_players()) fail("build_concrete_game: unknown player");
    if (start < 0 || start >= g.num_vertices()) fail("build_concrete_game: unknown start");
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (req[v] == ReqVal::Inf) fail("build_concrete_game: requirement must be 0/1-valued");
    }
    if (!satisfiable(g, req)) fail("build_concrete_game: requirement is unsatisfiable");
    return build_multi(g, req, player, {start});
}

Requirement nego(const Game& g, const Requirement& req, int jobs) {
    validate_requirement(g, req, "nego");
    if (!satisfiable(g, req)) fail("nego: requirement is unsatisfiable");
    std::vector<char> all(g.num_vertices(), 1);
    return nego_at(g, req, all, jobs);
}

LfpResult lfp(const Game& g, int jobs) {
    LfpResult r;
    Requirement cur = Requirement::zero(g);
    r.iterates.push_back(cur);
    for (;;) {
        if (!satisfiable(g, cur)) {
            throw std::logic_error("lfp: a negotiation iterate became unsatisfiable");
        }
        // Values never decrease along the iteration, so only vertices still
        // at 0 have to be re-negotiated.
        std::vector<char> at(g.num_vertices(), 0);
        for (VertexId v = 0; v < g.num_vertices(); ++v) at[v] = cur[v] == ReqVal::Zero;
        Requirement next = nego_at(g, cur, at, jobs);
        if (next == cur) break;
        cur = std::move(next);
        r.iterates.push_back(cur);
        if (static_cast<int>(r.iterates.size()) > g.num_vertices() + 1) {
            throw std::logic_error("lfp: negotiation did not stabilize within n+1 rounds");
        }
    }
    r.least = cur;
    return r;
}

UmmelsResult ummels_fixpoint(const Game& g) {
    const auto& edges = g.edges();
    const int ne = static_cast<int>(edges.size());
    std::vector<std::vector<int>> out_idx(g.num_vertices());
    for (int e = 0; e < ne; ++e) out_idx[edges[e].first].push_back(e);

    std::vector<char> alive(ne, 1);
    Requirement lam = Requirement::zero(g);
    for (int round = 0;; ++round) {
        if (round > ne + 1) throw std::logic_error("ummels_fixpoint: edges did not stabilize");

        // Every player is solved on the same edge set; the commits touch
        // only that player's own vertices, so they never conflict.
        std::vector<std::pair<VertexId, int>> commits;  // (vertex, kept edge)
        for (PlayerId p = 0; p < g.num_players(); ++p) {
            ZeroSumArena a;
            a.owner.resize(g.num_vertices());
            a.state_names.resize(g.num_vertices());
            for (VertexId v = 0; v < g.num_vertices(); ++v) {
                a.owner[v] = g.owner(v) == p ? Side::Even : Side::Odd;
                a.state_names[v] = g.vertex_name(v);
            }
            a.priorities.resize(1);
            std::vector<int> trans_edge;
            for (int e = 0; e < ne; ++e) {
                if (!alive[e]) continue;
                a.transitions.push_back(edges[e]);
                a.priorities[0].push_back(g.color(p, edges[e].first));
                trans_edge.push_back(e);
            }
            a.finalize();
            SolveResult res = solve_parity(a);
            for (VertexId v : g.owned_by(p)) {
                if (res.winner[v] != Side::Even) continue;
                lam[v] = ReqVal::One;
                int t = res.strategy_even[v];
                if (t < 0) throw std::logic_error("ummels_fixpoint: missing winning move");
                commits.emplace_back(v, trans_edge[t]);
            }
        }

        bool changed = false;
        for (const auto& [v, keep] : commits) {
            for (int e : out_idx[v]) {
                if (e != keep && alive[e]) {
                    alive[e] = 0;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }

    UmmelsResult r;
    r.req = std::move(lam);
    for (int e = 0; e < ne; ++e) {
        if (alive[e]) r.retained_edges.push_back(edges[e]);
    }
    return r;
}

ReducedStrategy reduced_strategy_from_json_text(const Game& g, const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        fail(std::string("reduced strategy: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("reduced strategy: expected a JSON object");
    ReducedStrategy strat;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto v = g.vertex_id(it.key());
        if (!v) fail("reduced strategy: unknown vertex '" + it.key() + "'");
        if (!it.value().is_string()) {
            fail("reduced strategy: proposal for '" + it.key() + "' must be a lasso string");
        }
        LassoPlay play = lasso_from_text(g, it.value().get<std::string>());
        if (!valid_lasso(g, play)) {
            fail("reduced strategy: proposal for '" + it.key() + "' is not a play of the game");
        }
        VertexId first = play.prefix.empty() ? play.cycle.front() : play.prefix.front();
        if (first != *v) {
            fail("reduced strategy: proposal for '" + it.key() + "' does not start there");
        }
        strat[*v] = std::move(play);
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (!strat.count(v)) {
            fail("reduced strategy: no proposal for vertex '" + g.vertex_name(v) + "'");
        }
    }
    return strat;
}

ReducedStrategy reduced_strategy_from_json_file(const Game& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("reduced strategy: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return reduced_strategy_from_json_text(g, buf.str());
}

std::string reduced_strategy_to_json_text(const Game& g, const ReducedStrategy& strat) {
    ordered_json j = ordered_json::object();
    for (const auto& [v, play] : strat) j[g.vertex_name(v)] = lasso_to_text(g, play);
    return j.dump(2) + "\n";
}

DeviationGraph build_deviation_graph(const Game& g, const Requirement& req, PlayerId player,
                                     const ReducedStrategy& strat) {
    validate_requirement(g, req, "deviation graph");
    if (player < 0 || player >= g.num_players()) fail("deviation graph: unknown player");
    for (const auto& [v, play] : strat) {
        (void)play;
        if (v < 0 || v >= g.num_vertices()) fail("deviation graph: unknown vertex in strategy");
    }

    DeviationGraph dg;
    dg.node_of_vertex.assign(g.num_vertices(), -1);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        auto it = strat.find(v);
        if (it == strat.end()) {
            fail("deviation graph: no proposal for vertex '" + g.vertex_name(v) + "'");
        }
        const LassoPlay& play = it->second;
        if (!valid_lasso(g, play)) {
            fail("deviation graph: proposal at '" + g.vertex_name(v) +
                 "' is not a play of the game");
        }
        VertexId first = play.prefix.empty() ? play.cycle.front() : play.prefix.front();
        if (first != v) {
            fail("deviation graph: proposal at '" + g.vertex_name(v) +
                 "' does not start at its vertex");
        }
        if (!consistent(g, req, play)) {
            fail("deviation graph: proposal at '" + g.vertex_name(v) +
                 "' violates the requirement");
        }
        int node = -1;
        for (size_t k = 0; k < dg.nodes.size(); ++k) {
            if (dg.nodes[k] == play) {
                node = static_cast<int>(k);
                break;
            }
        }
        if (node < 0) {
            node = static_cast<int>(dg.nodes.size());
            dg.nodes.push_back(play);
        }
        dg.node_of_vertex[v] = node;
    }

    // Deviations are scanned over the prefix plus two unrollings of the
    // cycle: the first unrolling saturates the occurrence set, the second
    // presents every cycle position once more under the saturated set.
    std::set<std::tuple<int, int, int>> seen;
    for (int node = 0; node < static_cast<int>(dg.nodes.size()); ++node) {
        const LassoPlay& play = dg.nodes[node];
        std::vector<VertexId> walk = play.prefix;
        walk.insert(walk.end(), play.cycle.begin(), play.cycle.end());
        walk.insert(walk.end(), play.cycle.begin(), play.cycle.end());
        int run_min = INT_MAX;
        for (size_t k = 0; k < walk.size(); ++k) {
            VertexId u = walk[k];
            run_min = std::min(run_min, g.color(player, u));
            if (g.owner(u) != player) continue;
            VertexId next = k + 1 < walk.size() ? walk[k + 1] : play.cycle.front();
            for (VertexId w : g.successors(u)) {
                if (w == next) continue;
                std::tuple<int, int, int> key{node, dg.node_of_vertex[w], run_min};
                if (seen.insert(key).second) {
                    dg.edges.push_back({node, dg.node_of_vertex[w], run_min});
                }
            }
        }
    }
    return dg;
}

bool check_reduced_strategy(const Game& g, const Requirement& req, PlayerId player,
                            VertexId start, const ReducedStrategy& strat) {
    if (start < 0 || start >= g.num_vertices()) fail("check_reduced_strategy: unknown start");
    DeviationGraph dg = build_deviation_graph(g, req, player, strat);
    const int n = static_cast<int>(dg.nodes.size());

    std::vector<std::vector<int>> adj(n);
    for (const auto& e : dg.edges) adj[e.from].push_back(e.to);
    std::vector<char> reach(n, 0);
    std::queue<int> q;
    q.push(dg.node_of_vertex[start]);
    reach[dg.node_of_vertex[start]] = 1;
    while (!q.empty()) {
        int s = q.front();
        q.pop();
        for (int t : adj[s]) {
            if (!reach[t]) {
                reach[t] = 1;
                q.push(t);
            }
        }
    }

    // A reachable proposal won by the deviating player refutes the strategy.
    for (int k = 0; k < n; ++k) {
        if (reach[k] && payoff(g, dg.nodes[k])[player] == 1) return false;
    }

    // So does an infinite deviation path whose minimal recurring color is
    // even: for each even color c, a reachable cycle of the (color ≥ c)
    // subgraph traversing a color-c edge.
    std::set<int> even_colors;
    for (const auto& e : dg.edges) {
        if (e.color % 2 == 0) even_colors.insert(e.color);
    }
    std::vector<char> all_alive(n, 1);
    for (int c : even_colors) {
        std::vector<std::vector<int>> sub(n);
        for (const auto& e : dg.edges) {
            if (e.color >= c) sub[e.from].push_back(e.to);
        }
        auto comps = detail::sccs(n, all_alive, [&](int s) -> const std::vector<int>& {
            return sub[s];
        });
        std::vector<int> comp_of(n, -1);
        for (size_t ci = 0; ci < comps.size(); ++ci) {
            for (int s : comps[ci]) comp_of[s] = static_cast<int>(ci);
        }
        for (const auto& e : dg.edges) {
            if (e.color == c && reach[e.from] && comp_of[e.from] == comp_of[e.to]) {
                return false;
            }
        }
    }
    return true;
}

std::string deviation_graph_to_dot(const Game& g, const DeviationGraph& dg) {
    std::ostringstream out;
    out << "digraph deviations {\n  rankdir=LR;\n  node [shape=box];\n";
    for (size_t k = 0; k < dg.nodes.size(); ++k) {
        out << "  n" << k << " [label=\"" << lasso_to_text(g, dg.nodes[k]) << "\"];\n";
    }
    for (const auto& e : dg.edges) {
        out << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.color << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace spe
