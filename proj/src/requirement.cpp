#include "spe/requirement.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "scc.hpp"

namespace spe {

namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument(msg);
}

}  // namespace

Requirement Requirement::from_json_text(const Game& g, const std::string& text) {
    OrderedJson doc;
    try {
        doc = OrderedJson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("requirement JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) fail("requirement JSON must be an object");
    Requirement req(g.num_vertices());
    std::vector<char> present(g.num_vertices(), 0);
    for (const auto& [name, value] : doc.items()) {
        auto v = g.vertex_id(name);
        if (!v) fail("requirement references unknown vertex '" + name + "'");
        if (value.is_string() && value.get<std::string>() == "inf") {
            req[*v] = ReqVal::Inf;
        } else if (value.is_number_integer() && value.get<int>() == 0) {
            req[*v] = ReqVal::Zero;
        } else if (value.is_number_integer() && value.get<int>() == 1) {
            req[*v] = ReqVal::One;
        } else {
            fail("requirement value at '" + name + "' must be 0, 1, or \"inf\"");
        }
        present[*v] = 1;
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (!present[v]) fail("requirement missing vertex '" + g.vertex_name(v) + "'");
    }
    return req;
}

Requirement Requirement::from_json_file(const Game& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open requirement file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(g, buf.str());
}

std::string Requirement::to_json_text(const Game& g) const {
    OrderedJson doc;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        switch ((*this)[v]) {
            case ReqVal::Zero: doc[g.vertex_name(v)] = 0; break;
            case ReqVal::One: doc[g.vertex_name(v)] = 1; break;
            case ReqVal::Inf: doc[g.vertex_name(v)] = "inf"; break;
        }
    }
    return doc.dump(2);
}

bool req_leq(const Requirement& a, const Requirement& b) {
    if (a.size() != b.size()) fail("req_leq: size mismatch");
    for (VertexId v = 0; v < a.size(); ++v) {
        if (static_cast<int>(a[v]) > static_cast<int>(b[v])) return false;
    }
    return true;
}

bool consistent(const Game& g, const Requirement& req, const LassoPlay& play) {
    if (req.size() != g.num_vertices()) fail("consistent: requirement size mismatch");
    if (!valid_lasso(g, play)) fail("consistent: invalid lasso");
    std::vector<int> pay = payoff(g, play);
    auto visit_ok = [&](VertexId v) {
        if (req[v] == ReqVal::Inf) return false;
        if (req[v] == ReqVal::One && pay[g.owner(v)] == 0) return false;
        return true;
    };
    for (VertexId v : play.prefix)
        if (!visit_ok(v)) return false;
    for (VertexId v : play.cycle)
        if (!visit_ok(v)) return false;
    return true;
}

namespace {

// A tourable target found by the satisfiability search: touring `scc`
// forever is consistent, and a consistent play may reach it through any
// vertices outside `avoid`.
struct TourTarget {
    std::vector<VertexId> scc;     // sorted
    std::vector<char> in_scc;      // mask
    std::vector<char> avoid;       // mask
};

class SatSearch {
public:
    SatSearch(const Game& g, const Requirement& req) : g_(g), req_(req) {
        ones_.assign(g.num_players(), {});
        for (VertexId v = 0; v < g.num_vertices(); ++v) {
            if (req[v] == ReqVal::One) ones_[g.owner(v)].push_back(v);
        }
    }

    const std::vector<TourTarget>& run() {
        std::vector<char> all(g_.num_vertices(), 1);
        explore(all);
        return targets_;
    }

private:
    void explore(const std::vector<char>& mask) {
        std::string key(mask.begin(), mask.end());
        if (!visited_.insert(key).second) return;

        auto comps = detail::sccs(
            g_.num_vertices(), mask,
            [this](int u) -> const std::vector<int>& { return g_.successors(u); });
        for (auto& comp : comps) {
            bool viable = comp.size() > 1 ||
                          (comp.size() == 1 && g_.has_edge(comp[0], comp[0]));
            if (!viable) continue;
            handle_component(comp);
        }
    }

    void handle_component(std::vector<VertexId>& comp) {
        std::sort(comp.begin(), comp.end());
        std::vector<char> in_comp(g_.num_vertices(), 0);
        for (VertexId v : comp) in_comp[v] = 1;

        std::vector<int> min_color(g_.num_players(), -1);
        for (VertexId v : comp) {
            for (PlayerId p = 0; p < g_.num_players(); ++p) {
                int c = g_.color(p, v);
                if (min_color[p] < 0 || c < min_color[p]) min_color[p] = c;
            }
        }

        std::vector<PlayerId> odd_players;
        std::vector<PlayerId> violated;
        for (PlayerId p = 0; p < g_.num_players(); ++p) {
            if (min_color[p] % 2 == 0) continue;
            odd_players.push_back(p);
            bool touched = std::any_of(ones_[p].begin(), ones_[p].end(),
                                       [&](VertexId v) { return in_comp[v]; });
            if (touched) violated.push_back(p);
        }

        if (violated.empty()) {
            TourTarget target;
            target.scc = comp;
            target.in_scc = in_comp;
            target.avoid.assign(g_.num_vertices(), 0);
            for (PlayerId p : odd_players) {
                for (VertexId v : ones_[p]) target.avoid[v] = 1;
            }
            targets_.push_back(std::move(target));
        }

        // Sub-structures may flip a player with an odd minimum to an even
        // one by staying above an even color threshold, and a player whose
        // 1-demanding vertices are inside the component may instead be
        // avoided entirely. Recurse into both kinds of restriction.
        for (PlayerId p : odd_players) {
            for (int c : g_.distinct_colors(p)) {
                if (c % 2 != 0 || c <= min_color[p]) continue;
                std::vector<char> child(g_.num_vertices(), 0);
                bool nonempty = false;
                for (VertexId v : comp) {
                    if (g_.color(p, v) >= c) {
                        child[v] = 1;
                        nonempty = true;
                    }
                }
                if (nonempty) explore(child);
            }
        }
        for (PlayerId p : violated) {
            std::vector<char> child(g_.num_vertices(), 0);
            for (VertexId v : comp) child[v] = 1;
            for (VertexId v : ones_[p]) child[v] = 0;
            bool nonempty = std::any_of(child.begin(), child.end(), [](char b) { return b != 0; });
            if (nonempty) explore(child);
        }
    }

    const Game& g_;
    const Requirement& req_;
    std::vector<std::vector<VertexId>> ones_;
    std::set<std::string> visited_;
    std::vector<TourTarget> targets_;
};

// Shortest path from `from` to any vertex of the target mask, avoiding
// `avoid`; returns the simple vertex sequence, or empty when unreachable.
std::vector<VertexId> path_to_target(const Game& g, VertexId from,
                                     const std::vector<char>& target,
                                     const std::vector<char>& avoid) {
    if (avoid[from]) return {};
    if (target[from]) return {from};
    std::vector<VertexId> parent(g.num_vertices(), -1);
    std::deque<VertexId> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
        VertexId u = queue.front();
        queue.pop_front();
        for (VertexId w : g.successors(u)) {
            if (avoid[w] || parent[w] >= 0) continue;
            parent[w] = u;
            if (target[w]) {
                std::vector<VertexId> path{w};
                for (VertexId x = w; x != from; x = parent[x]) path.push_back(parent[x]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(w);
        }
    }
    return {};
}

}  // namespace

bool satisfiable(const Game& g, const Requirement& req, SatCertificate* cert) {
    if (req.size() != g.num_vertices()) fail("satisfiable: requirement size mismatch");
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (req[v] == ReqVal::Inf) return false;
    }

    SatSearch search(g, req);
    const std::vector<TourTarget>& targets = search.run();

    std::vector<int> covered_by(g.num_vertices(), -1);
    for (size_t t = 0; t < targets.size(); ++t) {
        // Backward reachability of the component through non-avoided vertices.
        std::deque<VertexId> queue;
        std::vector<char> reach(g.num_vertices(), 0);
        for (VertexId v : targets[t].scc) {
            reach[v] = 1;
            queue.push_back(v);
        }
        while (!queue.empty()) {
            VertexId u = queue.front();
            queue.pop_front();
            for (VertexId w : g.predecessors(u)) {
                if (reach[w] || targets[t].avoid[w]) continue;
                reach[w] = 1;
                queue.push_back(w);
            }
        }
        for (VertexId v = 0; v < g.num_vertices(); ++v) {
            if (reach[v] && covered_by[v] < 0) covered_by[v] = static_cast<int>(t);
        }
    }

    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (covered_by[v] < 0) return false;
    }

    if (cert) {
        cert->h.assign(g.num_vertices(), {});
        cert->W.assign(g.num_vertices(), {});
        for (VertexId v = 0; v < g.num_vertices(); ++v) {
            const TourTarget& target = targets[covered_by[v]];
            cert->h[v] = path_to_target(g, v, target.in_scc, target.avoid);
            cert->W[v] = target.scc;
        }
    }
    return true;
}

bool check_certificate(const Game& g, const Requirement& req, const SatCertificate& cert) {
    if (req.size() != g.num_vertices()) fail("check_certificate: requirement size mismatch");
    if (cert.h.size() != static_cast<size_t>(g.num_vertices()) ||
        cert.W.size() != static_cast<size_t>(g.num_vertices())) {
        fail("certificate must provide h and W for every vertex");
    }

    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        const auto& h = cert.h[v];
        const auto& w = cert.W[v];
        if (h.empty()) fail("certificate history at '" + g.vertex_name(v) + "' is empty");
        if (h.front() != v) {
            fail("certificate history at '" + g.vertex_name(v) + "' does not start there");
        }
        std::set<VertexId> seen;
        for (VertexId u : h) {
            if (u < 0 || u >= g.num_vertices()) fail("certificate history vertex out of range");
            if (!seen.insert(u).second) {
                fail("certificate history at '" + g.vertex_name(v) + "' repeats a vertex");
            }
        }
        for (size_t k = 0; k + 1 < h.size(); ++k) {
            if (!g.has_edge(h[k], h[k + 1])) {
                fail("certificate history at '" + g.vertex_name(v) + "' uses a non-edge");
            }
        }
        if (w.empty()) fail("certificate W at '" + g.vertex_name(v) + "' is empty");
        std::set<VertexId> wset;
        for (VertexId u : w) {
            if (u < 0 || u >= g.num_vertices()) fail("certificate W vertex out of range");
            if (!wset.insert(u).second) {
                fail("certificate W at '" + g.vertex_name(v) + "' repeats a vertex");
            }
        }
        if (!wset.count(h.back())) {
            fail("certificate history at '" + g.vertex_name(v) + "' does not end in its W");
        }
    }

    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        const auto& h = cert.h[v];
        const auto& w = cert.W[v];
        std::set<VertexId> wset(w.begin(), w.end());

        // Cycle viability and strong connectivity of the induced subgraph.
        if (w.size() == 1) {
            if (!g.has_edge(w[0], w[0])) return false;
        } else {
            std::vector<char> mask(g.num_vertices(), 0);
            for (VertexId u : w) mask[u] = 1;
            auto comps = detail::sccs(
                g.num_vertices(), mask,
                [&g](int u) -> const std::vector<int>& { return g.successors(u); });
            if (comps.size() != 1) return false;
        }

        std::vector<int> min_color(g.num_players(), -1);
        for (VertexId u : w) {
            for (PlayerId p = 0; p < g.num_players(); ++p) {
                int c = g.color(p, u);
                if (min_color[p] < 0 || c < min_color[p]) min_color[p] = c;
            }
        }
        auto demanded_ok = [&](VertexId u) {
            if (req[u] == ReqVal::Inf) return false;
            if (req[u] == ReqVal::One && min_color[g.owner(u)] % 2 != 0) return false;
            return true;
        };
        for (VertexId u : h)
            if (!demanded_ok(u)) return false;
        for (VertexId u : w)
            if (!demanded_ok(u)) return false;
    }
    return true;
}

SatCertificate SatCertificate::from_json_text(const Game& g, const std::string& text) {
    OrderedJson doc;
    try {
        doc = OrderedJson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("certificate JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) fail("certificate JSON must be an object");
    SatCertificate cert;
    cert.h.assign(g.num_vertices(), {});
    cert.W.assign(g.num_vertices(), {});
    std::vector<char> present(g.num_vertices(), 0);
    for (const auto& [name, entry] : doc.items()) {
        auto v = g.vertex_id(name);
        if (!v) fail("certificate references unknown vertex '" + name + "'");
        if (!entry.is_object() || !entry.contains("h") || !entry.contains("W")) {
            fail("certificate entry at '" + name + "' needs 'h' and 'W'");
        }
        for (const auto& uj : entry["h"]) {
            auto u = g.vertex_id(uj.get<std::string>());
            if (!u) fail("certificate history names unknown vertex '" + uj.get<std::string>() + "'");
            cert.h[*v].push_back(*u);
        }
        for (const auto& uj : entry["W"]) {
            auto u = g.vertex_id(uj.get<std::string>());
            if (!u) fail("certificate W names unknown vertex '" + uj.get<std::string>() + "'");
            cert.W[*v].push_back(*u);
        }
        present[*v] = 1;
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (!present[v]) fail("certificate missing vertex '" + g.vertex_name(v) + "'");
    }
    return cert;
}

std::string SatCertificate::to_json_text(const Game& g) const {
    OrderedJson doc;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        OrderedJson entry;
        entry["h"] = OrderedJson::array();
        for (VertexId u : h[v]) entry["h"].push_back(g.vertex_name(u));
        entry["W"] = OrderedJson::array();
        for (VertexId u : W[v]) entry["W"].push_back(g.vertex_name(u));
        doc[g.vertex_name(v)] = std::move(entry);
    }
    return doc.dump(2);
}

}  // namespace spe
