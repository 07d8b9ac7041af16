#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "spe/cli.hpp"
#include "spe/game.hpp"
#include "spe/ltl.hpp"
#include "spe/requirement.hpp"

using namespace spe;
using spe::testing::data_path;
using spe::testing::load_game;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliResult res;
    res.code = spe::cli::run(std::move(args), out, err);
    res.out = out.str();
    res.err = err.str();
    return res;
}

nlohmann::ordered_json last_json_line(const std::string& text) {
    std::istringstream in(text);
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    return nlohmann::ordered_json::parse(last);
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("spe_cli_" + name)).string();
}

std::string write_tmp(const std::string& name, const std::string& content) {
    std::string path = tmp_path(name);
    std::ofstream f(path);
    REQUIRE(f.good());
    f << content;
    f.close();
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("lfp prints a per-vertex table") {
    CliResult res = run_cli({"lfp", data_path("small2p.json")});
    CHECK(res.code == 0);
    CHECK(res.out == "a: 1\nb: 0\nc: 1\nd: 0\ne: 1\n");
    CHECK(res.err.empty());
}

TEST_CASE("machine reports carry the table and timing") {
    CliResult res = run_cli({"--json", "lfp", data_path("small2p.json")});
    CHECK(res.code == 0);
    auto report = last_json_line(res.out);
    CHECK(report["command"] == "lfp");
    CHECK(report["result"] == "value");
    CHECK(report["witness"].is_null());
    CHECK(report["table"]["a"] == 1);
    CHECK(report["table"]["b"] == 0);
    CHECK(report["ms"].is_number());
}

TEST_CASE("nego defaults to the all-zero requirement") {
    CliResult res = run_cli({"nego", data_path("small2p.json")});
    CHECK(res.code == 0);
    CHECK(res.out == "a: 0\nb: 0\nc: 1\nd: 0\ne: 1\n");

    // Arena dump as a side effect.
    std::string dot = tmp_path("nego.dot");
    CliResult res2 = run_cli({"nego", data_path("small2p.json"), "--dot", dot});
    CHECK(res2.code == 0);
    std::string dumped = slurp(dot);
    CHECK(dumped.find("digraph") != std::string::npos);
    CHECK(dumped.find("negotiation arena for player") != std::string::npos);
}

TEST_CASE("equilibrium existence witnesses round-trip through the report") {
    Game g = load_game("small2p.json");
    CliResult res = run_cli({"--json", "exists", data_path("small2p.json"),
                             "--lower", "Circle=1,Box=1"});
    CHECK(res.code == 0);
    CHECK(res.out.substr(0, res.out.find('\n')) == "a c (e)^w");
    auto report = last_json_line(res.out);
    CHECK(report["command"] == "exists");
    CHECK(report["result"] == "yes");
    std::string witness = report["witness"].get<std::string>();
    CHECK(lasso_to_text(g, lasso_from_text(g, witness)) == witness);

    CliResult none = run_cli({"--json", "exists", data_path("small2p.json"),
                              "--upper", "Circle=0,Box=0"});
    CHECK(none.code == 1);
    CHECK(none.out.substr(0, none.out.find('\n')) == "none");
    CHECK(last_json_line(none.out)["result"] == "no");

    // The weaker equilibrium notion admits the all-losing play.
    CliResult ne = run_cli({"exists", data_path("small2p.json"), "--upper",
                            "Circle=0,Box=0", "--kind", "ne"});
    CHECK(ne.code == 0);
}

TEST_CASE("LTL verification against equilibrium outcomes") {
    CliResult yes = run_cli({"verify", data_path("small2p.json"), "--ltl", "F e"});
    CHECK(yes.code == 0);
    CHECK(yes.out == "a c (e)^w\n");

    CliResult no = run_cli({"verify", data_path("small2p.json"), "--ltl", "F b"});
    CHECK(no.code == 1);
    CHECK(no.out == "none\n");
}

TEST_CASE("fixed-point checks read a requirement file") {
    CliResult yes = run_cli({"check-fixpoint", data_path("cycles3p.json"), "--req",
                             data_path("cycles3p_lfp.json")});
    CHECK(yes.code == 0);
    CHECK(yes.out == "yes\n");

    CliResult least = run_cli({"check-lfp", data_path("cycles3p.json"), "--req",
                               data_path("cycles3p_lfp.json")});
    CHECK(least.code == 0);

    std::string zero = write_tmp("zero_req.json", R"({"a":0,"b":0,"c":0,"d":0,"e":0,"f":0})");
    CliResult no = run_cli({"check-fixpoint", data_path("cycles3p.json"), "--req", zero});
    CHECK(no.code == 1);
    CHECK(no.out.substr(0, 3) == "no\n");
    CHECK(no.out.find("reason: ") != std::string::npos);
}

TEST_CASE("satisfiability emits a checkable certificate") {
    Game g = load_game("small2p.json");
    const char* star = R"({"a":1,"b":0,"c":1,"d":0,"e":1})";
    std::string req = write_tmp("sat_req.json", star);
    std::string cert_path = tmp_path("sat_cert.json");
    CliResult res = run_cli({"satisfiable", data_path("small2p.json"), "--req", req,
                             "--cert-out", cert_path});
    CHECK(res.code == 0);
    CHECK(res.out.substr(0, 4) == "yes\n");
    SatCertificate cert = SatCertificate::from_json_text(g, slurp(cert_path));
    Requirement r = Requirement::from_json_text(g, star);
    CHECK(check_certificate(g, r, cert));

    std::string bad =
        write_tmp("unsat_req.json", R"({"a":0,"b":1,"c":0,"d":0,"e":0})");
    CliResult no = run_cli({"satisfiable", data_path("small2p.json"), "--req", bad});
    CHECK(no.code == 1);
    CHECK(no.out == "no\n");
}

TEST_CASE("edge pruning lists the retained edges") {
    CliResult res = run_cli({"ummels", data_path("cycles3p.json")});
    CHECK(res.code == 0);
    CHECK(res.out.find("a: 1\n") != std::string::npos);
    CHECK(res.out.find("e: 0\n") != std::string::npos);
    CHECK(res.out.find("retained edges:\n") != std::string::npos);
    CHECK(res.out.find("  a -> b\n") != std::string::npos);
    CHECK(res.out.find("  c -> c\n") != std::string::npos);
    CHECK(res.out.find("  b -> a\n") == std::string::npos);
}

TEST_CASE("deviation-graph checking from the command line") {
    std::string dot = tmp_path("devgraph.dot");
    CliResult res = run_cli({"devgraph", data_path("cycles3p.json"),
                             "--req", data_path("cycles3p_lfp.json"),
                             "--player", "Circle",
                             "--strategy", data_path("strategy_cycles3p.json"),
                             "--from", "a", "--dot", dot});
    CHECK(res.code == 0);
    CHECK(res.out.find("yes\n") != std::string::npos);
    CHECK(slurp(dot).find("digraph") != std::string::npos);
}

TEST_CASE("game generation from CNF input") {
    std::string out_path = tmp_path("gen_sat.json");
    CliResult res = run_cli({"gen-sat", "x1", "-o", out_path});
    CHECK(res.code == 0);
    Game g = Game::from_json_text(slurp(out_path));
    CHECK(g.num_vertices() == 3);
    CHECK(g.vertex_id("C1:x1").has_value());

    // Without -o the game JSON goes to stdout.
    CliResult direct = run_cli({"gen-sat", "x1 | ~x2; x2"});
    CHECK(direct.code == 0);
    Game g2 = Game::from_json_text(direct.out);
    CHECK(g2.vertex_name(g2.initial()) == "C1");

    // DIMACS file input.
    std::string dimacs = write_tmp("one.cnf", "p cnf 1 1\n1 0\n");
    CliResult from_file = run_cli({"gen-sat", dimacs});
    CHECK(from_file.code == 0);
    CHECK(Game::from_json_text(from_file.out).num_vertices() == 3);
}

TEST_CASE("paired generation feeds the least-fixed-point check") {
    std::string game_path = tmp_path("bh2_game.json");
    std::string req_path = tmp_path("bh2_req.json");
    CliResult gen = run_cli({"gen-bh2", "x1", "x1; ~x1", "-o", game_path,
                             "--req-out", req_path});
    CHECK(gen.code == 0);
    CliResult yes = run_cli({"check-lfp", game_path, "--req", req_path});
    CHECK(yes.code == 0);
    CHECK(yes.out == "yes\n");

    // Swapping the operands flips the verdict.
    CliResult gen2 = run_cli({"gen-bh2", "x1; ~x1", "x1", "-o", game_path,
                              "--req-out", req_path});
    CHECK(gen2.code == 0);
    CliResult no = run_cli({"check-lfp", game_path, "--req", req_path});
    CHECK(no.code == 1);
}

TEST_CASE("one-player games from transition systems") {
    std::string kripke = write_tmp("kripke.json", R"({
        "atoms": ["p"],
        "states": ["s", "t"],
        "edges": [["s", "t"], ["t", "s"]],
        "val": {"s": ["p"]}
    })");
    std::string out_path = tmp_path("kripke_game.json");
    std::string ltl_path = tmp_path("kripke_formula.txt");
    CliResult res = run_cli({"gen-kripke", kripke, "--ltl", "G F p",
                             "-o", out_path, "--ltl-out", ltl_path});
    CHECK(res.code == 0);
    Game g = Game::from_json_text(slurp(out_path));
    CHECK(g.num_vertices() == 2);
    LtlFormula f = parse_ltl(slurp(ltl_path));
    CHECK(ltl_to_text(f) == ltl_to_text(parse_ltl("G F s")));

    // Stdout mode prints the rewritten formula on an "ltl:" line.
    CliResult direct = run_cli({"gen-kripke", kripke, "--ltl", "F p", "-o", out_path});
    CHECK(direct.code == 0);
    CHECK(direct.out.find("ltl: ") != std::string::npos);
}

TEST_CASE("worker count does not change results") {
    CliResult one = run_cli({"lfp", data_path("cycles3p.json")});
    CliResult four = run_cli({"--jobs", "4", "lfp", data_path("cycles3p.json")});
    CHECK(one.code == four.code);
    CHECK(one.out == four.out);
}

TEST_CASE("usage and input errors exit with code 2") {
    CHECK(run_cli({"bogus"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"lfp", "/nonexistent/game.json"}).code == 2);
    CHECK(run_cli({"exists", data_path("small2p.json"), "--kind", "weird"}).code == 2);
    CHECK(run_cli({"exists", data_path("small2p.json"), "--from", "zz"}).code == 2);
    CHECK(run_cli({"verify", data_path("small2p.json"), "--ltl", "F ("}).code == 2);
    CHECK(run_cli({"--jobs", "0", "lfp", data_path("small2p.json")}).code == 2);
    CHECK(run_cli({"check-fixpoint", data_path("small2p.json")}).code == 2);  // missing --req

    CliResult bad = run_cli({"lfp", "/nonexistent/game.json"});
    CHECK(bad.err.find("error: ") != std::string::npos);
}

TEST_CASE("help is not an error") {
    CliResult res = run_cli({"--help"});
    CHECK(res.code == 0);
    CHECK(res.out.find("spe") != std::string::npos);
}
