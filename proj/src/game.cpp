#include "spe/game.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spe {

namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument(msg);
}

long long edge_key(VertexId from, VertexId to) {
    return static_cast<long long>(from) * 1000003LL + to;
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') return false;
    }
    return true;
}

}  // namespace

PlayerId Game::add_player(const std::string& name) {
    if (finalized_) fail("game is finalized");
    if (!valid_name(name)) fail("invalid player name: '" + name + "'");
    if (player_index_.count(name)) fail("duplicate player name: '" + name + "'");
    PlayerId p = static_cast<PlayerId>(player_names_.size());
    player_names_.push_back(name);
    player_index_.emplace(name, p);
    return p;
}

VertexId Game::add_vertex(const std::string& name, PlayerId owner) {
    if (finalized_) fail("game is finalized");
    if (!valid_name(name)) fail("invalid vertex name: '" + name + "'");
    if (vertex_index_.count(name)) fail("duplicate vertex id: '" + name + "'");
    if (owner < 0 || owner >= num_players()) fail("unknown owner for vertex '" + name + "'");
    VertexId v = static_cast<VertexId>(vertex_names_.size());
    vertex_names_.push_back(name);
    vertex_index_.emplace(name, v);
    owner_.push_back(owner);
    return v;
}

void Game::set_color(PlayerId p, VertexId v, int color) {
    if (finalized_) fail("game is finalized");
    if (p < 0 || p >= num_players()) fail("set_color: unknown player");
    if (v < 0 || v >= num_vertices()) fail("set_color: unknown vertex");
    if (color < 0) fail("negative color at vertex '" + vertex_names_[v] + "'");
    if (colors_.size() != static_cast<size_t>(num_players())) colors_.resize(num_players());
    if (colors_[p].size() != static_cast<size_t>(num_vertices())) {
        for (auto& row : colors_) row.resize(num_vertices(), -1);
    }
    colors_[p][v] = color;
}

void Game::add_edge(VertexId from, VertexId to) {
    if (finalized_) fail("game is finalized");
    if (from < 0 || from >= num_vertices() || to < 0 || to >= num_vertices()) {
        fail("edge endpoint out of range");
    }
    long long key = edge_key(from, to);
    if (edge_set_.count(key)) {
        fail("duplicate edge " + vertex_names_[from] + " -> " + vertex_names_[to]);
    }
    edge_set_.insert(key);
    edges_.emplace_back(from, to);
}

void Game::set_initial(VertexId v) {
    if (finalized_) fail("game is finalized");
    if (v < 0 || v >= num_vertices()) fail("initial vertex out of range");
    initial_ = v;
}

void Game::finalize() {
    if (finalized_) fail("game is already finalized");
    if (num_players() == 0) fail("game has no players");
    if (num_vertices() == 0) fail("game has no vertices");
    if (initial_ < 0) fail("game has no initial vertex");

    if (colors_.size() != static_cast<size_t>(num_players())) colors_.resize(num_players());
    for (auto& row : colors_) row.resize(num_vertices(), -1);
    for (PlayerId p = 0; p < num_players(); ++p) {
        for (VertexId v = 0; v < num_vertices(); ++v) {
            if (colors_[p][v] < 0) {
                fail("missing color for player '" + player_names_[p] + "' at vertex '" +
                     vertex_names_[v] + "'");
            }
        }
    }

    succ_.assign(num_vertices(), {});
    pred_.assign(num_vertices(), {});
    for (auto [from, to] : edges_) {
        succ_[from].push_back(to);
        pred_[to].push_back(from);
    }
    for (VertexId v = 0; v < num_vertices(); ++v) {
        if (succ_[v].empty()) fail("vertex '" + vertex_names_[v] + "' has no outgoing edge");
    }

    owned_.assign(num_players(), {});
    for (VertexId v = 0; v < num_vertices(); ++v) owned_[owner_[v]].push_back(v);

    distinct_colors_.assign(num_players(), {});
    max_color_ = 0;
    for (PlayerId p = 0; p < num_players(); ++p) {
        std::vector<int> cs = colors_[p];
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        distinct_colors_[p] = std::move(cs);
        max_color_ = std::max(max_color_, distinct_colors_[p].back());
    }

    finalized_ = true;
}

std::optional<PlayerId> Game::player_id(const std::string& name) const {
    auto it = player_index_.find(name);
    if (it == player_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<VertexId> Game::vertex_id(const std::string& name) const {
    auto it = vertex_index_.find(name);
    if (it == vertex_index_.end()) return std::nullopt;
    return it->second;
}

bool Game::has_edge(VertexId from, VertexId to) const {
    return edge_set_.count(edge_key(from, to)) > 0;
}

Game Game::from_json_text(const std::string& text) {
    OrderedJson doc;
    try {
        doc = OrderedJson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("game JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) fail("game JSON root must be an object");

    Game g;
    if (!doc.contains("players") || !doc["players"].is_array() || doc["players"].empty()) {
        fail("game JSON needs a non-empty 'players' array");
    }
    for (const auto& p : doc["players"]) {
        if (!p.is_string()) fail("player names must be strings");
        g.add_player(p.get<std::string>());
    }

    if (!doc.contains("vertices") || !doc["vertices"].is_array() || doc["vertices"].empty()) {
        fail("game JSON needs a non-empty 'vertices' array");
    }
    for (const auto& vj : doc["vertices"]) {
        if (!vj.is_object() || !vj.contains("id") || !vj.contains("owner")) {
            fail("each vertex needs 'id' and 'owner'");
        }
        std::string id = vj["id"].get<std::string>();
        std::string owner_name = vj["owner"].get<std::string>();
        auto owner = g.player_id(owner_name);
        if (!owner) fail("vertex '" + id + "' has unknown owner '" + owner_name + "'");
        g.add_vertex(id, *owner);
    }
    for (const auto& vj : doc["vertices"]) {
        VertexId v = *g.vertex_id(vj["id"].get<std::string>());
        if (!vj.contains("colors") || !vj["colors"].is_object()) {
            fail("vertex '" + g.vertex_name(v) + "' needs a 'colors' object");
        }
        for (const auto& [pname, cj] : vj["colors"].items()) {
            auto p = g.player_id(pname);
            if (!p) fail("vertex '" + g.vertex_name(v) + "' colors unknown player '" + pname + "'");
            if (!cj.is_number_integer() || cj.get<int>() < 0) {
                fail("color of player '" + pname + "' at vertex '" + g.vertex_name(v) +
                     "' must be a non-negative integer");
            }
            g.set_color(*p, v, cj.get<int>());
        }
    }

    if (!doc.contains("edges") || !doc["edges"].is_array()) {
        fail("game JSON needs an 'edges' array");
    }
    for (const auto& ej : doc["edges"]) {
        if (!ej.is_array() || ej.size() != 2 || !ej[0].is_string() || !ej[1].is_string()) {
            fail("each edge must be a [from, to] string pair");
        }
        auto from = g.vertex_id(ej[0].get<std::string>());
        auto to = g.vertex_id(ej[1].get<std::string>());
        if (!from) fail("edge references unknown vertex '" + ej[0].get<std::string>() + "'");
        if (!to) fail("edge references unknown vertex '" + ej[1].get<std::string>() + "'");
        g.add_edge(*from, *to);
    }

    if (!doc.contains("initial") || !doc["initial"].is_string()) {
        fail("game JSON needs an 'initial' vertex id");
    }
    auto init = g.vertex_id(doc["initial"].get<std::string>());
    if (!init) fail("initial vertex '" + doc["initial"].get<std::string>() + "' is unknown");
    g.set_initial(*init);

    g.finalize();
    return g;
}

Game Game::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open game file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string Game::to_json_text() const {
    OrderedJson doc;
    doc["players"] = player_names_;
    doc["vertices"] = OrderedJson::array();
    for (VertexId v = 0; v < num_vertices(); ++v) {
        OrderedJson vj;
        vj["id"] = vertex_names_[v];
        vj["owner"] = player_names_[owner_[v]];
        OrderedJson cj;
        for (PlayerId p = 0; p < num_players(); ++p) cj[player_names_[p]] = colors_[p][v];
        vj["colors"] = std::move(cj);
        doc["vertices"].push_back(std::move(vj));
    }
    doc["edges"] = OrderedJson::array();
    for (auto [from, to] : edges_) {
        doc["edges"].push_back(OrderedJson::array({vertex_names_[from], vertex_names_[to]}));
    }
    doc["initial"] = vertex_names_[initial_];
    return doc.dump(2);
}

bool valid_lasso(const Game& g, const LassoPlay& play) {
    if (play.cycle.empty()) return false;
    auto in_range = [&](VertexId v) { return v >= 0 && v < g.num_vertices(); };
    for (VertexId v : play.prefix)
        if (!in_range(v)) return false;
    for (VertexId v : play.cycle)
        if (!in_range(v)) return false;
    for (size_t k = 0; k + 1 < play.prefix.size(); ++k) {
        if (!g.has_edge(play.prefix[k], play.prefix[k + 1])) return false;
    }
    if (!play.prefix.empty() && !g.has_edge(play.prefix.back(), play.cycle.front())) return false;
    for (size_t k = 0; k + 1 < play.cycle.size(); ++k) {
        if (!g.has_edge(play.cycle[k], play.cycle[k + 1])) return false;
    }
    if (!g.has_edge(play.cycle.back(), play.cycle.front())) return false;
    return true;
}

std::vector<int> payoff(const Game& g, const LassoPlay& play) {
    std::vector<int> result(g.num_players(), 0);
    for (PlayerId p = 0; p < g.num_players(); ++p) {
        int min_color = -1;
        for (VertexId v : play.cycle) {
            int c = g.color(p, v);
            if (min_color < 0 || c < min_color) min_color = c;
        }
        result[p] = (min_color % 2 == 0) ? 1 : 0;
    }
    return result;
}

namespace {

// Finite characterization of a lasso's infinite play up to occurrence
// equivalence: the first vertex, the sequence of vertices in first-visit
// order, the set of end vertices reachable while the occurrence set stays
// at each intermediate stage, and the infinitely-repeated set.
struct LassoSignature {
    std::vector<VertexId> growth;
    std::vector<std::vector<VertexId>> endpoints;
    std::vector<VertexId> inf;
};

LassoSignature signature_of(const LassoPlay& play) {
    std::vector<VertexId> walk = play.prefix;
    walk.insert(walk.end(), play.cycle.begin(), play.cycle.end());
    walk.insert(walk.end(), play.cycle.begin(), play.cycle.end());

    LassoSignature sig;
    std::unordered_set<VertexId> seen;
    std::unordered_set<VertexId> plateau_seen;
    for (VertexId v : walk) {
        if (!seen.count(v)) {
            seen.insert(v);
            sig.growth.push_back(v);
            sig.endpoints.emplace_back();
            plateau_seen.clear();
        }
        if (!plateau_seen.count(v)) {
            plateau_seen.insert(v);
            sig.endpoints.back().push_back(v);
        }
    }
    for (auto& e : sig.endpoints) std::sort(e.begin(), e.end());

    sig.inf = play.cycle;
    std::sort(sig.inf.begin(), sig.inf.end());
    sig.inf.erase(std::unique(sig.inf.begin(), sig.inf.end()), sig.inf.end());
    return sig;
}

}  // namespace

bool occ_equiv(const LassoPlay& a, const LassoPlay& b) {
    if (a.cycle.empty() || b.cycle.empty()) {
        throw std::invalid_argument("occ_equiv: lasso cycle must be non-empty");
    }
    LassoSignature sa = signature_of(a);
    LassoSignature sb = signature_of(b);
    return sa.growth == sb.growth && sa.endpoints == sb.endpoints && sa.inf == sb.inf;
}

namespace {

// Shortest path from -> to using only vertices in `allowed`; returns the
// vertex sequence including both ends, or empty if unreachable.
std::vector<VertexId> bfs_path(const Game& g, VertexId from, VertexId to,
                               const std::unordered_set<VertexId>& allowed) {
    if (from == to) return {from};
    std::unordered_map<VertexId, VertexId> parent;
    std::deque<VertexId> queue{from};
    parent.emplace(from, from);
    while (!queue.empty()) {
        VertexId u = queue.front();
        queue.pop_front();
        for (VertexId w : g.successors(u)) {
            if (!allowed.count(w) || parent.count(w)) continue;
            parent.emplace(w, u);
            if (w == to) {
                std::vector<VertexId> path{to};
                for (VertexId x = to; x != from; x = parent[x]) path.push_back(parent[x]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(w);
        }
    }
    return {};
}

void append_path_tail(std::vector<VertexId>& out, const std::vector<VertexId>& path) {
    out.insert(out.end(), path.begin() + 1, path.end());
}

}  // namespace

LassoPlay reduce_play(const Game& g, const LassoPlay& play) {
    if (!valid_lasso(g, play)) throw std::invalid_argument("reduce_play: invalid lasso");

    std::vector<VertexId> walk = play.prefix;
    walk.insert(walk.end(), play.cycle.begin(), play.cycle.end());
    walk.insert(walk.end(), play.cycle.begin(), play.cycle.end());

    // Plateau decomposition: one plateau per first visit, recording the
    // first-visit order of the vertices touched while the occurrence set
    // does not grow, and the vertex from which the walk jumps to the next
    // new vertex.
    struct Plateau {
        VertexId entry = -1;
        std::vector<VertexId> order;
        std::unordered_set<VertexId> members;
        VertexId exit = -1;  // last vertex before the next plateau's entry
    };
    std::vector<Plateau> plateaus;
    std::unordered_set<VertexId> seen;
    for (size_t k = 0; k < walk.size(); ++k) {
        VertexId v = walk[k];
        if (!seen.count(v)) {
            seen.insert(v);
            if (!plateaus.empty()) plateaus.back().exit = walk[k - 1];
            plateaus.push_back({});
            plateaus.back().entry = v;
        }
        if (!plateaus.back().members.count(v)) {
            plateaus.back().members.insert(v);
            plateaus.back().order.push_back(v);
        }
    }

    std::vector<VertexId> inf_order;
    std::unordered_set<VertexId> inf_set;
    for (VertexId v : play.cycle) {
        if (inf_set.insert(v).second) inf_order.push_back(v);
    }

    std::vector<VertexId> out{plateaus.front().entry};
    auto extend_to = [&](VertexId target, const std::unordered_set<VertexId>& allowed) {
        std::vector<VertexId> path = bfs_path(g, out.back(), target, allowed);
        if (path.empty()) throw std::logic_error("reduce_play: covering leg unreachable");
        append_path_tail(out, path);
    };

    for (size_t s = 0; s + 1 < plateaus.size(); ++s) {
        const Plateau& pl = plateaus[s];
        for (size_t i = 1; i < pl.order.size(); ++i) extend_to(pl.order[i], pl.members);
        extend_to(pl.exit, pl.members);
        out.push_back(plateaus[s + 1].entry);
    }
    const Plateau& last = plateaus.back();
    for (size_t i = 1; i < last.order.size(); ++i) extend_to(last.order[i], last.members);
    extend_to(inf_order.front(), last.members);

    // `out` now ends at the cycle's first vertex; everything before it is
    // the reduced prefix.
    LassoPlay reduced;
    reduced.prefix.assign(out.begin(), out.end() - 1);
    reduced.cycle.push_back(inf_order.front());
    if (inf_order.size() > 1) {
        std::vector<VertexId>& c = reduced.cycle;
        auto extend_cycle_to = [&](VertexId target) {
            std::vector<VertexId> path = bfs_path(g, c.back(), target, inf_set);
            if (path.empty()) throw std::logic_error("reduce_play: cycle leg unreachable");
            c.insert(c.end(), path.begin() + 1, path.end());
        };
        for (size_t i = 1; i < inf_order.size(); ++i) extend_cycle_to(inf_order[i]);
        std::vector<VertexId> close = bfs_path(g, c.back(), inf_order.front(), inf_set);
        if (close.empty()) throw std::logic_error("reduce_play: cycle closure unreachable");
        c.insert(c.end(), close.begin() + 1, close.end() - 1);
    }
    return reduced;
}

std::string lasso_to_text(const Game& g, const LassoPlay& play) {
    if (play.cycle.empty()) throw std::invalid_argument("lasso_to_text: empty cycle");
    std::string text;
    for (VertexId v : play.prefix) {
        text += g.vertex_name(v);
        text += ' ';
    }
    text += '(';
    for (size_t i = 0; i < play.cycle.size(); ++i) {
        if (i > 0) text += ' ';
        text += g.vertex_name(play.cycle[i]);
    }
    text += ")^w";
    return text;
}

LassoPlay lasso_from_text(const Game& g, const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    if (tokens.empty()) fail("lasso text is empty");

    LassoPlay play;
    bool in_cycle = false;
    bool closed = false;
    for (auto& t : tokens) {
        if (closed) fail("lasso text has tokens after the cycle: '" + text + "'");
        if (!in_cycle && !t.empty() && t.front() == '(') {
            in_cycle = true;
            t.erase(t.begin());
        } else if (t.find('(') != std::string::npos) {
            fail("unexpected '(' in lasso text: '" + text + "'");
        }
        if (in_cycle && t.size() >= 3 && t.compare(t.size() - 3, 3, ")^w") == 0) {
            closed = true;
            t.erase(t.size() - 3);
        } else if (t.find(')') != std::string::npos) {
            fail("unexpected ')' in lasso text: '" + text + "'");
        }
        if (t.empty()) {
            if (!in_cycle || (closed && play.cycle.empty())) {
                fail("malformed lasso text: '" + text + "'");
            }
            continue;
        }
        auto v = g.vertex_id(t);
        if (!v) fail("unknown vertex '" + t + "' in lasso text");
        (in_cycle ? play.cycle : play.prefix).push_back(*v);
    }
    if (!in_cycle || !closed) fail("lasso text needs a '(...)^w' cycle: '" + text + "'");
    if (play.cycle.empty()) fail("lasso cycle is empty: '" + text + "'");
    return play;
}

}  // namespace spe
