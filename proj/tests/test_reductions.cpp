#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "spe/decisions.hpp"
#include "spe/game.hpp"
#include "spe/ltl.hpp"
#include "spe/negotiation.hpp"
#include "spe/reductions.hpp"
#include "spe/requirement.hpp"

using namespace spe;

namespace {

bool satisfies(const Cnf& cnf, const std::vector<char>& assignment) {
    for (const auto& clause : cnf.clauses) {
        bool some = false;
        for (int lit : clause) {
            bool value = assignment[std::abs(lit) - 1];
            if (lit > 0 ? value : !value) {
                some = true;
                break;
            }
        }
        if (!some) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("DIMACS parsing") {
    Cnf cnf = parse_dimacs("c a comment\np cnf 2 2\n1 -2 0\n2 0\n");
    CHECK(cnf.num_vars == 2);
    CHECK(cnf.clauses == std::vector<std::vector<int>>{{1, -2}, {2}});

    // Clauses may span lines; '%' footers are ignored.
    Cnf spanning = parse_dimacs("p cnf 3 1\n1\n-3 0\n%\n");
    CHECK(spanning.clauses == std::vector<std::vector<int>>{{1, -3}});

    CHECK_THROWS_AS(parse_dimacs("1 -2 0\n"), std::invalid_argument);        // no header
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\nz 0\n"), std::invalid_argument);  // bad token
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n1\n"), std::invalid_argument);  // unterminated
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n2 0\n"), std::invalid_argument);  // var range
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 2\n0 1 0\n"), std::invalid_argument);  // empty clause
}

TEST_CASE("inline CNF parsing") {
    Cnf cnf = parse_inline_cnf("x1 | ~x2; x2");
    CHECK(cnf.num_vars == 2);
    CHECK(cnf.clauses == std::vector<std::vector<int>>{{1, -2}, {2}});

    // A trailing separator is tolerated.
    CHECK(parse_inline_cnf("x3;").num_vars == 3);
    CHECK(parse_inline_cnf(" ~x1 ").clauses == std::vector<std::vector<int>>{{-1}});

    CHECK_THROWS_AS(parse_inline_cnf("y1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_inline_cnf("x0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_inline_cnf("x1 |; x2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_inline_cnf("; x1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_inline_cnf(""), std::invalid_argument);
}

TEST_CASE("brute-force satisfiability") {
    CHECK(cnf_brute_sat(parse_inline_cnf("x1")));
    CHECK(!cnf_brute_sat(parse_inline_cnf("x1; ~x1")));
    CHECK(cnf_brute_sat(parse_inline_cnf("x1 | x2; ~x1 | ~x2")));
    CHECK(!cnf_brute_sat(parse_inline_cnf("x1 | x2; ~x1; ~x2")));
    CHECK(cnf_brute_sat(parse_dimacs("p cnf 2 2\n1 -2 0\n-1 2 0\n")));
}

TEST_CASE("the clause-tour game of a single unit clause") {
    Game g = gen_sat_game(parse_inline_cnf("x1"));
    REQUIRE(g.num_players() == 3);
    CHECK(g.player_name(0) == "x1");
    CHECK(g.player_name(1) == "~x1");
    CHECK(g.player_name(2) == "Solver");

    REQUIRE(g.num_vertices() == 3);
    auto c1 = g.vertex_id("C1");
    auto lit = g.vertex_id("C1:x1");
    auto bot = g.vertex_id("bot");
    REQUIRE(c1);
    REQUIRE(lit);
    REQUIRE(bot);
    CHECK(g.vertex_name(g.initial()) == "C1");

    CHECK(g.player_name(g.owner(*c1)) == "Solver");
    CHECK(g.player_name(g.owner(*lit)) == "x1");
    CHECK(g.player_name(g.owner(*bot)) == "Solver");

    CHECK(g.has_edge(*c1, *lit));
    CHECK(g.has_edge(*lit, *c1));
    CHECK(g.has_edge(*lit, *bot));
    CHECK(g.has_edge(*bot, *bot));
    CHECK(g.edges().size() == 4);

    // All colors are the even default except the two designated penalties.
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        for (PlayerId p = 0; p < g.num_players(); ++p) {
            int expected = 2;
            if (v == *bot && g.player_name(p) == "Solver") expected = 1;
            if (v == *lit && g.player_name(p) == "~x1") expected = 1;
            CHECK(g.color(p, v) == expected);
        }
    }

    // The generated game survives a JSON round trip.
    CHECK(Game::from_json_text(g.to_json_text()).to_json_text() == g.to_json_text());
}

TEST_CASE("equilibrium existence in clause-tour games decides satisfiability") {
    struct Case {
        const char* text;
        bool sat;
    };
    const Case cases[] = {
        {"x1", true},
        {"x1; ~x1", false},
        {"x1 | ~x2; x2", true},
        {"x1 | x2; ~x1; ~x2", false},
        {"x1 | x2; ~x1 | ~x2", true},
        {"x1 | ~x3; x2 | x3; ~x1 | ~x2", true},
    };
    for (const Case& c : cases) {
        CAPTURE(c.text);
        Cnf cnf = parse_inline_cnf(c.text);
        REQUIRE(cnf_brute_sat(cnf) == c.sat);
        Game g = gen_sat_game(cnf);
        Threshold t = parse_threshold(g, "Solver=1", "");
        for (EqKind kind : {EqKind::Ne, EqKind::Spe}) {
            auto w = constrained_existence(g, g.initial(), t, kind);
            CHECK(w.has_value() == c.sat);
            if (w) {
                CHECK(valid_lasso(g, *w));
                CHECK(payoff(g, *w)[*g.player_id("Solver")] == 1);
                CHECK(satisfies(cnf, assignment_from_play(cnf, g, *w)));
            }
        }
    }
}

TEST_CASE("requirement support of clause-tour games") {
    Cnf cnf = parse_inline_cnf("x1 | ~x2; x2");
    Game g = gen_sat_game(cnf);
    Requirement star = lfp(g).least;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        bool solver_owned = g.player_name(g.owner(v)) == "Solver";
        CHECK(star[v] == (solver_owned ? ReqVal::Zero : ReqVal::One));
    }
}

TEST_CASE("paired clause-tour games detect sat/unsat splits") {
    Cnf sat = parse_inline_cnf("x1 | x2; ~x1 | ~x2");
    Cnf unsat = parse_inline_cnf("x1; ~x1");

    auto [g1, r1] = gen_bh2_game(sat, unsat);
    CHECK(is_fixed_point(g1, r1));
    CHECK(is_lfp(g1, r1));

    auto [g2, r2] = gen_bh2_game(sat, sat);
    CHECK(is_fixed_point(g2, r2));
    CHECK(!is_lfp(g2, r2));

    auto [g3, r3] = gen_bh2_game(unsat, sat);
    CHECK(!is_lfp(g3, r3));

    auto [g4, r4] = gen_bh2_game(unsat, unsat);
    CHECK(!is_lfp(g4, r4));

    // Structural spot checks on the paired construction.
    CHECK(g1.vertex_name(g1.initial()) == "v1");
    CHECK(g1.vertex_id("v2").has_value());
    CHECK(g1.vertex_id("g1:bot").has_value());
    CHECK(g1.vertex_id("g2:bot").has_value());
    CHECK(r1[*g1.vertex_id("v2")] == ReqVal::One);
    CHECK(r1[*g1.vertex_id("v1")] == ReqVal::Zero);
    CHECK(r1[*g1.vertex_id("g1:bot")] == ReqVal::Zero);
    CHECK(Game::from_json_text(g1.to_json_text()).to_json_text() == g1.to_json_text());
}

TEST_CASE("transition-system descriptions load from JSON") {
    Kripke k = Kripke::from_json_text(R"({
        "atoms": ["p", "q"],
        "states": ["s", "t"],
        "edges": [["s", "t"], ["t", "s"], ["s", "t"]],
        "val": {"s": ["p"], "t": ["p", "q"]}
    })");
    CHECK(k.atoms == std::vector<std::string>{"p", "q"});
    CHECK(k.states == std::vector<std::string>{"s", "t"});
    // The duplicate edge is collapsed.
    CHECK(k.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
    CHECK(k.val[0] == std::vector<char>{1, 0});
    CHECK(k.val[1] == std::vector<char>{1, 1});
    CHECK(k.state_id("s") == 0);
    CHECK(k.state_id("zz") == -1);
    CHECK(k.atom_id("q") == 1);
    CHECK(k.atom_id("zz") == -1);

    CHECK_THROWS_AS(Kripke::from_json_text("not json"), std::invalid_argument);
    CHECK_THROWS_AS(Kripke::from_json_text(R"({"atoms":[],"states":[]})"),
                    std::invalid_argument);  // missing edges
    CHECK_THROWS_AS(Kripke::from_json_text(
                        R"({"atoms":["p","p"],"states":["s"],"edges":[]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(Kripke::from_json_text(
                        R"({"atoms":[],"states":["s","s"],"edges":[]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(Kripke::from_json_text(
                        R"({"atoms":[],"states":["s"],"edges":[["s","zz"]]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(Kripke::from_json_text(
                        R"({"atoms":[],"states":["s"],"edges":[],"val":{"zz":[]}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(Kripke::from_json_text(
                        R"({"atoms":[],"states":["s"],"edges":[],"val":{"s":["p"]}})"),
                    std::invalid_argument);
}

TEST_CASE("formulas over atoms rewrite to formulas over states") {
    Kripke k = Kripke::from_json_text(R"({
        "atoms": ["p", "q"],
        "states": ["s", "t"],
        "edges": [["s", "t"], ["t", "s"]],
        "val": {"s": ["p"], "t": ["p"]}
    })");

    auto [g, f1] = kripke_to_game(k, parse_ltl("F p"));
    CHECK(g.num_vertices() == 2);
    CHECK(g.num_players() == 1);
    CHECK(g.vertex_name(g.initial()) == "s");
    CHECK(ltl_to_text(f1) == ltl_to_text(parse_ltl("F (s | t)")));

    // An atom holding nowhere becomes a contradiction.
    auto f2 = kripke_to_game(k, parse_ltl("X q")).second;
    CHECK(ltl_to_text(f2) == ltl_to_text(parse_ltl("X !true")));

    CHECK_THROWS_AS(kripke_to_game(k, parse_ltl("F z")), std::invalid_argument);

    // Totality is required.
    Kripke partial = Kripke::from_json_text(
        R"({"atoms":[],"states":["s","t"],"edges":[["s","t"]]})");
    CHECK_THROWS_AS(kripke_to_game(partial, parse_ltl("true")), std::invalid_argument);
}

TEST_CASE("end-to-end model checking through the one-player game") {
    Kripke k = Kripke::from_json_text(R"({
        "atoms": ["p"],
        "states": ["s", "t"],
        "edges": [["s", "t"], ["t", "s"]],
        "val": {"s": ["p"]}
    })");
    auto [g, often_p] = kripke_to_game(k, parse_ltl("G F p"));
    // Every color is even, so every run of the system is an equilibrium
    // outcome; the query degenerates to plain existence of a satisfying run.
    auto w = spe_verify(g, g.initial(), often_p);
    REQUIRE(w.has_value());
    CHECK(eval_lasso(often_p, g, *w));

    auto always_p = kripke_to_game(k, parse_ltl("G p")).second;
    CHECK(!spe_verify(g, g.initial(), always_p).has_value());
}
