#include "spe/reductions.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

namespace spe {

namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument(msg);
}

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lit_name(int lit) {
    return (lit < 0 ? "~x" : "x") + std::to_string(std::abs(lit));
}

/** Clause literals with repeats dropped, first occurrence kept. */
std::vector<int> distinct_literals(const std::vector<int>& clause) {
    std::vector<int> out;
    for (int lit : clause) {
        if (std::find(out.begin(), out.end(), lit) == out.end()) out.push_back(lit);
    }
    return out;
}

}  // namespace

void Cnf::validate() const {
    if (num_vars < 1) fail("cnf: needs at least one variable");
    if (clauses.empty()) fail("cnf: needs at least one clause");
    for (size_t j = 0; j < clauses.size(); ++j) {
        if (clauses[j].empty()) fail("cnf: clause " + std::to_string(j + 1) + " has no literals");
        for (int lit : clauses[j]) {
            if (lit == 0 || std::abs(lit) > num_vars) {
                fail("cnf: literal " + std::to_string(lit) + " in clause " +
                     std::to_string(j + 1) + " is out of range");
            }
        }
    }
}

Cnf parse_dimacs(const std::string& text) {
    std::istringstream lines(text);
    std::string line;
    std::ostringstream body;
    bool saw_header = false;
    Cnf cnf;
    long long declared_clauses = 0;
    while (std::getline(lines, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == 'c' || t[0] == '%') continue;
        if (!saw_header) {
            std::istringstream hdr(t);
            std::string p, fmt;
            if (!(hdr >> p >> fmt >> cnf.num_vars >> declared_clauses) || p != "p" ||
                fmt != "cnf") {
                fail("dimacs: expected 'p cnf <vars> <clauses>' header, got '" + t + "'");
            }
            std::string extra;
            if (hdr >> extra) fail("dimacs: trailing tokens after header");
            saw_header = true;
            continue;
        }
        body << t << ' ';
    }
    if (!saw_header) fail("dimacs: missing 'p cnf' header");

    std::istringstream toks(body.str());
    std::string tok;
    std::vector<int> clause;
    while (toks >> tok) {
        int lit = 0;
        try {
            size_t used = 0;
            lit = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            fail("dimacs: '" + tok + "' is not a literal");
        }
        if (lit == 0) {
            if (clause.empty()) fail("dimacs: clause with no literals");
            cnf.clauses.push_back(clause);
            clause.clear();
        } else {
            if (std::abs(lit) > cnf.num_vars) {
                fail("dimacs: literal " + std::to_string(lit) + " exceeds declared " +
                     std::to_string(cnf.num_vars) + " variables");
            }
            clause.push_back(lit);
        }
    }
    if (!clause.empty()) fail("dimacs: last clause is missing its terminating 0");
    cnf.validate();
    return cnf;
}

Cnf parse_dimacs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dimacs(buf.str());
}

Cnf parse_inline_cnf(const std::string& text) {
    Cnf cnf;
    std::vector<std::string> pieces;
    std::string piece;
    std::istringstream in(text);
    while (std::getline(in, piece, ';')) pieces.push_back(piece);
    while (!pieces.empty() && trim(pieces.back()).empty()) pieces.pop_back();
    if (pieces.empty()) fail("cnf: no clauses in '" + text + "'");
    for (const std::string& clause_text : pieces) {
        std::vector<int> clause;
        std::vector<std::string> lit_texts;
        size_t pos = 0;
        while (true) {
            size_t bar = clause_text.find('|', pos);
            lit_texts.push_back(clause_text.substr(
                pos, bar == std::string::npos ? std::string::npos : bar - pos));
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
        for (const std::string& lit_text : lit_texts) {
            std::string t = trim(lit_text);
            bool neg = !t.empty() && t[0] == '~';
            if (neg) t = trim(t.substr(1));
            bool ok = t.size() >= 2 && t[0] == 'x';
            for (size_t i = 1; ok && i < t.size(); ++i) {
                ok = std::isdigit(static_cast<unsigned char>(t[i])) != 0;
            }
            if (!ok) fail("cnf: bad literal '" + trim(lit_text) + "' (want x<i> or ~x<i>)");
            int var = 0;
            try {
                var = std::stoi(t.substr(1));
            } catch (const std::exception&) {
                fail("cnf: variable index out of range in '" + t + "'");
            }
            if (var < 1) fail("cnf: variable index must be >= 1 in '" + t + "'");
            cnf.num_vars = std::max(cnf.num_vars, var);
            clause.push_back(neg ? -var : var);
        }
        if (clause.empty()) fail("cnf: empty clause in '" + text + "'");
        cnf.clauses.push_back(clause);
    }
    cnf.validate();
    return cnf;
}

bool cnf_brute_sat(const Cnf& cnf) {
    if (cnf.num_vars > 30) fail("cnf_brute_sat: too many variables for brute force");
    for (uint64_t mask = 0; mask < (uint64_t{1} << cnf.num_vars); ++mask) {
        bool all = true;
        for (const auto& clause : cnf.clauses) {
            bool some = false;
            for (int lit : clause) {
                bool value = (mask >> (std::abs(lit) - 1)) & 1;
                if (lit > 0 ? value : !value) {
                    some = true;
                    break;
                }
            }
            if (!some) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

std::vector<char> assignment_from_play(const Cnf& cnf, const Game& g, const LassoPlay& play) {
    std::vector<char> assignment(static_cast<size_t>(cnf.num_vars), 0);
    for (VertexId v : play.cycle) {
        const std::string& name = g.vertex_name(v);
        size_t colon = name.find(':');
        if (colon == std::string::npos) continue;
        std::string lit = name.substr(colon + 1);
        if (lit.size() >= 2 && lit[0] == 'x') {
            int var = std::stoi(lit.substr(1));
            if (var >= 1 && var <= cnf.num_vars) assignment[var - 1] = 1;
        }
    }
    return assignment;
}

Game gen_sat_game(const Cnf& cnf) {
    cnf.validate();
    Game g;
    std::vector<PlayerId> pos_player(cnf.num_vars), neg_player(cnf.num_vars);
    for (int i = 1; i <= cnf.num_vars; ++i) {
        pos_player[i - 1] = g.add_player("x" + std::to_string(i));
        neg_player[i - 1] = g.add_player("~x" + std::to_string(i));
    }
    PlayerId solver = g.add_player("Solver");
    auto player_of = [&](int lit) {
        return lit > 0 ? pos_player[lit - 1] : neg_player[-lit - 1];
    };

    int m = static_cast<int>(cnf.clauses.size());
    std::vector<VertexId> clause_vertex(m);
    std::vector<std::vector<std::pair<int, VertexId>>> lit_vertices(m);
    for (int j = 0; j < m; ++j) {
        std::string cname = "C" + std::to_string(j + 1);
        clause_vertex[j] = g.add_vertex(cname, solver);
        for (int lit : distinct_literals(cnf.clauses[j])) {
            VertexId lv = g.add_vertex(cname + ":" + lit_name(lit), player_of(lit));
            lit_vertices[j].emplace_back(lit, lv);
        }
    }
    VertexId bot = g.add_vertex("bot", solver);

    for (int j = 0; j < m; ++j) {
        for (auto [lit, lv] : lit_vertices[j]) {
            g.add_edge(clause_vertex[j], lv);
            g.add_edge(lv, clause_vertex[(j + 1) % m]);
            g.add_edge(lv, bot);
        }
    }
    g.add_edge(bot, bot);
    g.set_initial(clause_vertex[0]);

    for (PlayerId p = 0; p < g.num_players(); ++p) {
        for (VertexId v = 0; v < g.num_vertices(); ++v) g.set_color(p, v, 2);
    }
    g.set_color(solver, bot, 1);
    for (int j = 0; j < m; ++j) {
        for (auto [lit, lv] : lit_vertices[j]) g.set_color(player_of(-lit), lv, 1);
    }
    g.finalize();
    return g;
}

std::pair<Game, Requirement> gen_bh2_game(const Cnf& sat_side, const Cnf& unsat_side) {
    sat_side.validate();
    unsat_side.validate();
    const Cnf* cnfs[2] = {&sat_side, &unsat_side};
    Game g;

    std::vector<std::vector<PlayerId>> pos_player(2), neg_player(2);
    PlayerId solver[2];
    for (int k = 0; k < 2; ++k) {
        std::string prefix = "g" + std::to_string(k + 1) + ":";
        pos_player[k].resize(cnfs[k]->num_vars);
        neg_player[k].resize(cnfs[k]->num_vars);
        for (int i = 1; i <= cnfs[k]->num_vars; ++i) {
            pos_player[k][i - 1] = g.add_player(prefix + "x" + std::to_string(i));
            neg_player[k][i - 1] = g.add_player(prefix + "~x" + std::to_string(i));
        }
        solver[k] = g.add_player(prefix + "Solver");
    }
    PlayerId opponent = g.add_player("Opponent");
    auto player_of = [&](int k, int lit) {
        return lit > 0 ? pos_player[k][lit - 1] : neg_player[k][-lit - 1];
    };

    std::vector<std::vector<VertexId>> clause_vertex(2);
    std::vector<std::vector<std::vector<std::pair<int, VertexId>>>> lit_vertices(2);
    VertexId bot[2];
    VertexId gate[2];
    for (int k = 0; k < 2; ++k) {
        std::string prefix = "g" + std::to_string(k + 1) + ":";
        int m = static_cast<int>(cnfs[k]->clauses.size());
        clause_vertex[k].resize(m);
        lit_vertices[k].resize(m);
        for (int j = 0; j < m; ++j) {
            std::string cname = prefix + "C" + std::to_string(j + 1);
            clause_vertex[k][j] = g.add_vertex(cname, solver[k]);
            for (int lit : distinct_literals(cnfs[k]->clauses[j])) {
                VertexId lv = g.add_vertex(cname + ":" + lit_name(lit), player_of(k, lit));
                lit_vertices[k][j].emplace_back(lit, lv);
            }
        }
        bot[k] = g.add_vertex(prefix + "bot", solver[k]);
        gate[k] = g.add_vertex("v" + std::to_string(k + 1), opponent);
    }

    for (int k = 0; k < 2; ++k) {
        int m = static_cast<int>(cnfs[k]->clauses.size());
        for (int j = 0; j < m; ++j) {
            for (auto [lit, lv] : lit_vertices[k][j]) {
                g.add_edge(clause_vertex[k][j], lv);
                g.add_edge(lv, j + 1 < m ? clause_vertex[k][j + 1] : gate[k]);
                g.add_edge(lv, bot[k]);
            }
        }
        g.add_edge(bot[k], bot[k]);
        g.add_edge(gate[k], clause_vertex[k][0]);
    }
    g.set_initial(gate[0]);

    for (PlayerId p = 0; p < g.num_players(); ++p) {
        for (VertexId v = 0; v < g.num_vertices(); ++v) g.set_color(p, v, 2);
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        g.set_color(opponent, v, v == bot[0] || v == bot[1] ? 2 : 1);
    }
    for (int k = 0; k < 2; ++k) {
        g.set_color(solver[k], bot[k], 1);
        int m = static_cast<int>(cnfs[k]->clauses.size());
        for (int j = 0; j < m; ++j) {
            for (auto [lit, lv] : lit_vertices[k][j]) g.set_color(player_of(k, -lit), lv, 1);
        }
    }
    g.finalize();

    Requirement req = Requirement::zero(g);
    for (int k = 0; k < 2; ++k) {
        for (const auto& per_clause : lit_vertices[k]) {
            for (auto [lit, lv] : per_clause) req[lv] = ReqVal::One;
        }
    }
    req[gate[1]] = ReqVal::One;
    return {std::move(g), std::move(req)};
}

int Kripke::state_id(const std::string& name) const {
    for (size_t i = 0; i < states.size(); ++i) {
        if (states[i] == name) return static_cast<int>(i);
    }
    return -1;
}

int Kripke::atom_id(const std::string& name) const {
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i] == name) return static_cast<int>(i);
    }
    return -1;
}

Kripke Kripke::from_json_text(const std::string& text) {
    OrderedJson j;
    try {
        j = OrderedJson::parse(text);
    } catch (const std::exception& e) {
        fail(std::string("kripke: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("kripke: top level must be an object");
    for (const char* key : {"atoms", "states", "edges"}) {
        if (!j.contains(key) || !j[key].is_array()) {
            fail(std::string("kripke: missing array field '") + key + "'");
        }
    }

    Kripke k;
    for (const auto& a : j["atoms"]) {
        if (!a.is_string()) fail("kripke: atoms must be strings");
        if (k.atom_id(a.get<std::string>()) >= 0) {
            fail("kripke: duplicate atom '" + a.get<std::string>() + "'");
        }
        k.atoms.push_back(a.get<std::string>());
    }
    for (const auto& s : j["states"]) {
        if (!s.is_string()) fail("kripke: states must be strings");
        if (k.state_id(s.get<std::string>()) >= 0) {
            fail("kripke: duplicate state '" + s.get<std::string>() + "'");
        }
        k.states.push_back(s.get<std::string>());
    }
    if (k.states.empty()) fail("kripke: needs at least one state");

    std::set<std::pair<int, int>> seen;
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            fail("kripke: each edge must be a [\"from\", \"to\"] pair");
        }
        int from = k.state_id(e[0].get<std::string>());
        int to = k.state_id(e[1].get<std::string>());
        if (from < 0) fail("kripke: edge from unknown state '" + e[0].get<std::string>() + "'");
        if (to < 0) fail("kripke: edge to unknown state '" + e[1].get<std::string>() + "'");
        if (seen.insert({from, to}).second) k.edges.emplace_back(from, to);
    }

    k.val.assign(k.states.size(), std::vector<char>(k.atoms.size(), 0));
    if (j.contains("val")) {
        if (!j["val"].is_object()) fail("kripke: 'val' must be an object");
        for (const auto& [state_name, atom_list] : j["val"].items()) {
            int s = k.state_id(state_name);
            if (s < 0) fail("kripke: valuation for unknown state '" + state_name + "'");
            if (!atom_list.is_array()) fail("kripke: valuation of '" + state_name + "' must be an array");
            for (const auto& a : atom_list) {
                if (!a.is_string()) fail("kripke: valuation atoms must be strings");
                int id = k.atom_id(a.get<std::string>());
                if (id < 0) fail("kripke: valuation uses unknown atom '" + a.get<std::string>() + "'");
                k.val[s][id] = 1;
            }
        }
    }
    return k;
}

Kripke Kripke::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::pair<Game, LtlFormula> kripke_to_game(const Kripke& k, const LtlFormula& formula) {
    std::vector<char> has_succ(k.states.size(), 0);
    for (auto [from, to] : k.edges) has_succ[from] = 1;
    for (size_t s = 0; s < k.states.size(); ++s) {
        if (!has_succ[s]) {
            fail("kripke_to_game: state '" + k.states[s] + "' has no outgoing edge");
        }
    }

    Game g;
    PlayerId system = g.add_player("System");
    for (const auto& name : k.states) g.add_vertex(name, system);
    for (auto [from, to] : k.edges) g.add_edge(from, to);
    g.set_initial(0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) g.set_color(system, v, 2);
    g.finalize();

    if (formula.root < 0) fail("kripke_to_game: empty formula");
    LtlFormula out;
    auto emit = [&out](LtlFormula::Kind kind, int a, int b, std::string atom = "") {
        out.nodes.push_back({kind, a, b, std::move(atom)});
        return static_cast<int>(out.nodes.size()) - 1;
    };
    std::vector<int> remap(formula.nodes.size(), -1);
    for (size_t idx = 0; idx < formula.nodes.size(); ++idx) {
        const auto& node = formula.nodes[idx];
        if (node.kind == LtlFormula::Kind::Atom) {
            if (k.atom_id(node.atom) < 0) {
                fail("kripke_to_game: formula uses undeclared atom '" + node.atom + "'");
            }
            int id = k.atom_id(node.atom);
            int acc = -1;
            for (size_t s = 0; s < k.states.size(); ++s) {
                if (!k.val[s][id]) continue;
                int leaf = emit(LtlFormula::Kind::Atom, -1, -1, k.states[s]);
                acc = acc < 0 ? leaf : emit(LtlFormula::Kind::Or, acc, leaf);
            }
            if (acc < 0) {
                int t = emit(LtlFormula::Kind::True, -1, -1);
                acc = emit(LtlFormula::Kind::Not, t, -1);
            }
            remap[idx] = acc;
        } else {
            int a = node.a >= 0 ? remap[node.a] : -1;
            int b = node.b >= 0 ? remap[node.b] : -1;
            remap[idx] = emit(node.kind, a, b, node.atom);
        }
    }
    out.root = remap[formula.root];
    return {std::move(g), std::move(out)};
}

}  // namespace spe
