// Shared test support: data-file loading and random instance generators.
#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spe/game.hpp"
#include "spe/ltl.hpp"
#include "spe/requirement.hpp"

namespace spe::testing {

using Rng = std::mt19937_64;

inline std::string data_path(const std::string& name) {
    return std::string(SPE_DATA_DIR) + "/" + name;
}

inline Game load_game(const std::string& name) {
    return Game::from_json_file(data_path(name));
}

/** Requirement literal for tests: vertices missing from the JSON default
 *  to 0 (the library's own parser insists on total mappings). */
inline Requirement req_of(const Game& g, const std::string& json) {
    Requirement r = Requirement::zero(g);
    const nlohmann::json parsed = nlohmann::json::parse(json);
    for (const auto& [key, value] : parsed.items()) {
        auto v = g.vertex_id(key);
        if (!v) throw std::invalid_argument("req_of: unknown vertex '" + key + "'");
        if (value.is_string()) {
            r[*v] = ReqVal::Inf;
        } else {
            r[*v] = value.get<int>() == 1 ? ReqVal::One : ReqVal::Zero;
        }
    }
    return r;
}

inline int rand_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool rand_chance(Rng& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

/** A random total game: every vertex keeps at least one successor. */
inline Game random_game(Rng& rng, int max_players, int max_vertices, int max_color) {
    int num_players = rand_int(rng, 1, max_players);
    int num_vertices = rand_int(rng, 1, max_vertices);
    Game g;
    for (int p = 0; p < num_players; ++p) g.add_player("P" + std::to_string(p));
    for (int v = 0; v < num_vertices; ++v) {
        g.add_vertex("v" + std::to_string(v), rand_int(rng, 0, num_players - 1));
    }
    for (int p = 0; p < num_players; ++p) {
        for (int v = 0; v < num_vertices; ++v) g.set_color(p, v, rand_int(rng, 0, max_color));
    }
    std::vector<std::vector<char>> present(num_vertices, std::vector<char>(num_vertices, 0));
    for (int v = 0; v < num_vertices; ++v) present[v][rand_int(rng, 0, num_vertices - 1)] = 1;
    for (int v = 0; v < num_vertices; ++v) {
        for (int w = 0; w < num_vertices; ++w) {
            if (!present[v][w] && rand_chance(rng, 1.5 / num_vertices)) present[v][w] = 1;
        }
    }
    for (int v = 0; v < num_vertices; ++v) {
        for (int w = 0; w < num_vertices; ++w) {
            if (present[v][w]) g.add_edge(v, w);
        }
    }
    g.set_initial(0);
    g.finalize();
    return g;
}

/** A random valid lasso from `start`: a walk closed at its first repeat,
 *  so |cycle| <= n and |prefix| < n. */
inline LassoPlay random_lasso(Rng& rng, const Game& g, VertexId start) {
    std::vector<VertexId> walk{start};
    std::vector<int> seen_at(g.num_vertices(), -1);
    seen_at[start] = 0;
    for (;;) {
        const auto& succ = g.successors(walk.back());
        VertexId next = succ[rand_int(rng, 0, static_cast<int>(succ.size()) - 1)];
        if (seen_at[next] >= 0) {
            int i = seen_at[next];
            LassoPlay play;
            play.prefix.assign(walk.begin(), walk.begin() + i);
            play.cycle.assign(walk.begin() + i, walk.end());
            return play;
        }
        seen_at[next] = static_cast<int>(walk.size());
        walk.push_back(next);
    }
}

inline LassoPlay random_lasso(Rng& rng, const Game& g) {
    return random_lasso(rng, g, rand_int(rng, 0, g.num_vertices() - 1));
}

inline Requirement random_requirement(Rng& rng, const Game& g, bool allow_inf = false) {
    Requirement req = Requirement::zero(g);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (allow_inf && rand_chance(rng, 0.1)) {
            req[v] = ReqVal::Inf;
        } else if (rand_chance(rng, 0.4)) {
            req[v] = ReqVal::One;
        }
    }
    return req;
}

/** A random core-syntax formula over vertex names with at most `budget`
 *  nodes (budget >= 1). */
inline int random_formula_at(Rng& rng, const Game& g, int budget, LtlFormula& f) {
    auto emit = [&f](LtlFormula::Kind kind, int a, int b, std::string atom = "") {
        f.nodes.push_back({kind, a, b, std::move(atom)});
        return static_cast<int>(f.nodes.size()) - 1;
    };
    if (budget <= 1) {
        if (rand_chance(rng, 0.15)) return emit(LtlFormula::Kind::True, -1, -1);
        VertexId v = rand_int(rng, 0, g.num_vertices() - 1);
        return emit(LtlFormula::Kind::Atom, -1, -1, g.vertex_name(v));
    }
    int choice = budget >= 3 ? rand_int(rng, 0, 3) : rand_int(rng, 0, 1);
    switch (choice) {
        case 0: {
            int a = random_formula_at(rng, g, budget - 1, f);
            return emit(LtlFormula::Kind::Not, a, -1);
        }
        case 1: {
            int a = random_formula_at(rng, g, budget - 1, f);
            return emit(LtlFormula::Kind::Next, a, -1);
        }
        case 2: {
            int left = rand_int(rng, 1, budget - 2);
            int a = random_formula_at(rng, g, left, f);
            int b = random_formula_at(rng, g, budget - 1 - left, f);
            return emit(LtlFormula::Kind::Or, a, b);
        }
        default: {
            int left = rand_int(rng, 1, budget - 2);
            int a = random_formula_at(rng, g, left, f);
            int b = random_formula_at(rng, g, budget - 1 - left, f);
            return emit(LtlFormula::Kind::Until, a, b);
        }
    }
}

inline LtlFormula random_formula(Rng& rng, const Game& g, int max_nodes) {
    LtlFormula f;
    f.root = random_formula_at(rng, g, rand_int(rng, 1, max_nodes), f);
    return f;
}

}  // namespace spe::testing
