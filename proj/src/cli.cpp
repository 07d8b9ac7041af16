#include "spe/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spe/decisions.hpp"
#include "spe/game.hpp"
#include "spe/ltl.hpp"
#include "spe/negotiation.hpp"
#include "spe/reductions.hpp"
#include "spe/requirement.hpp"
#include "spe/zero_sum.hpp"

namespace spe::cli {

namespace {

using OrderedJson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Options {
    std::string game_path;
    std::string req_path;
    std::string strategy_path;
    std::string dot_path;
    std::string cert_out;
    std::string out_path;
    std::string req_out;
    std::string ltl_out;
    std::string from;
    std::string lower;
    std::string upper;
    std::string kind = "spe";
    std::string ltl;
    std::string player;
    std::string input1;
    std::string input2;
    bool json = false;
    int jobs = 1;
    long long seed = 0;
};

struct Invocation {
    std::ostream& out;
    const Options& opt;
    std::string command;
    Clock::time_point started = Clock::now();

    /** Prints the machine report (when requested) and fixes the exit code. */
    int finish(const std::string& result, const std::optional<std::string>& witness,
               const OrderedJson* table) const {
        if (opt.json) {
            OrderedJson report;
            report["command"] = command;
            report["result"] = result;
            report["witness"] = witness ? OrderedJson(*witness) : OrderedJson(nullptr);
            report["table"] = table ? *table : OrderedJson(nullptr);
            auto elapsed = Clock::now() - started;
            report["ms"] =
                std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
            out << report.dump() << "\n";
        }
        return result == "no" ? 1 : 0;
    }
};

std::string req_val_text(ReqVal v) {
    switch (v) {
        case ReqVal::Zero: return "0";
        case ReqVal::One: return "1";
        default: return "inf";
    }
}

OrderedJson req_table(const Game& g, const Requirement& req) {
    OrderedJson table = OrderedJson::object();
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (req[v] == ReqVal::Inf) {
            table[g.vertex_name(v)] = "inf";
        } else {
            table[g.vertex_name(v)] = req[v] == ReqVal::One ? 1 : 0;
        }
    }
    return table;
}

void print_req_table(std::ostream& out, const Game& g, const Requirement& req) {
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        out << g.vertex_name(v) << ": " << req_val_text(req[v]) << "\n";
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot write file '" + path + "'");
    f << content;
    if (!f.good()) throw std::invalid_argument("failed writing file '" + path + "'");
}

Requirement load_req(const Game& g, const std::string& path) {
    if (path.empty()) throw std::invalid_argument("--req FILE is required for this command");
    return Requirement::from_json_file(g, path);
}

VertexId resolve_vertex(const Game& g, const std::string& name) {
    if (name.empty()) return g.initial();
    auto v = g.vertex_id(name);
    if (!v) throw std::invalid_argument("unknown vertex '" + name + "'");
    return *v;
}

PlayerId resolve_player(const Game& g, const std::string& name) {
    if (name.empty()) throw std::invalid_argument("--player NAME is required for this command");
    auto p = g.player_id(name);
    if (!p) throw std::invalid_argument("unknown player '" + name + "'");
    return *p;
}

Cnf load_cnf(const std::string& input) {
    std::error_code ec;
    if (std::filesystem::exists(input, ec)) return parse_dimacs_file(input);
    return parse_inline_cnf(input);
}

void emit_text(Invocation& inv, const std::string& path, const std::string& text,
               const std::string& what) {
    if (path.empty()) {
        inv.out << text;
    } else {
        write_file(path, text);
        inv.out << "wrote " << what << " to " << path << "\n";
    }
}

int run_lfp(Invocation& inv) {
    Game g = Game::from_json_file(inv.opt.game_path);
    LfpResult res = lfp(g, inv.opt.jobs);
    print_req_table(inv.out, g, res.least);
    OrderedJson table = req_table(g, res.least);
    return inv.finish("value", std::nullopt, &table);
}

int run_nego(Invocation& inv) {
    Game g = Game::from_json_file(inv.opt.game_path);
    Requirement req = inv.opt.req_path.empty() ? Requirement::zero(g)
                                               : Requirement::from_json_file(g, inv.opt.req_path);
    Requirement result = nego(g, req, inv.opt.jobs);
    print_req_table(inv.out, g, result);
    if (!inv.opt.dot_path.empty()) {
        VertexId start = resolve_vertex(g, inv.opt.from);
        std::ostringstream dot;
        if (inv.opt.player.empty()) {
            for (PlayerId p = 0; p < g.num_players(); ++p) {
                ConcreteGame cg = build_concrete_game(g, req, p, start);
                dot << "// negotiation arena for player " << g.player_name(p) << "\n"
                    << arena_to_dot(cg.arena);
            }
        } else {
            ConcreteGame cg = build_concrete_game(g, req, resolve_player(g, inv.opt.player), start);
            dot << arena_to_dot(cg.arena);
        }
        write_file(inv.opt.dot_path, dot.str());
        inv.out << "wrote arena dot to " << inv.opt.dot_path << "\n";
    }
    OrderedJson table = req_table(g, result);
    return inv.finish("value", std::nullopt, &table);
}

int run_check_fixpoint(Invocation& inv, bool least) {
    Game g = Game::from_json_file(inv.opt.game_path);
    Requirement req = load_req(g, inv.opt.req_path);
    std::string why;
    bool ok = least ? is_lfp(g, req, &why, inv.opt.jobs)
                    : is_fixed_point(g, req, &why, inv.opt.jobs);
    inv.out << (ok ? "yes" : "no") << "\n";
    if (!ok && !why.empty()) inv.out << "reason: " << why << "\n";
    return inv.finish(ok ? "yes" : "no", std::nullopt, nullptr);
}

int run_satisfiable(Invocation& inv) {
    Game g = Game::from_json_file(inv.opt.game_path);
    Requirement req = load_req(g, inv.opt.req_path);
    SatCertificate cert;
    bool ok = satisfiable(g, req, &cert);
    inv.out << (ok ? "yes" : "no") << "\n";
    if (ok && !inv.opt.cert_out.empty()) {
        write_file(inv.opt.cert_out, cert.to_json_text(g));
        inv.out << "wrote certificate to " << inv.opt.cert_out << "\n";
    }
    return inv.finish(ok ? "yes" : "no", std::nullopt, nullptr);
}

int run_exists(Invocation& inv) {
    Game g = Game::from_json_file(inv.opt.game_path);
    VertexId start = resolve_vertex(g, inv.opt.from);
    Threshold t = parse_threshold(g, inv.opt.lower, inv.opt.upper);
    EqKind kind;
    if (inv.opt.kind == "ne") {
        kind = EqKind::Ne;
    } else if (inv.opt.kind == "spe") {
        kind = EqKind::Spe;
    } else {
        throw std::invalid_argument("--kind must be 'ne' or 'spe', got '" + inv.opt.kind + "'");
    }
    std::optional<LassoPlay> witness = constrained_existence(g, start, t, kind, inv.opt.jobs);
    if (!witness) {
        inv.out << "none\n";
        return inv.finish("no", std::nullopt, nullptr);
    }
    std::string text = lasso_to_text(g, *witness);
    inv.out << text << "\n";
    return inv.finish("yes", text, nullptr);
}

int run_verify(Invocation& inv) {
    Game g = Game::from_json_file(inv.opt.game_path);
    VertexId start = resolve_vertex(g, inv.opt.from);
    if (inv.opt.ltl.empty()) throw std::invalid_argument("--ltl FORMULA is required");
    LtlFormula f = parse_ltl(inv.opt.ltl);
    std::optional<LassoPlay> witness = spe_verify(g, start, f);
    if (!witness) {
        inv.out << "none\n";
        return inv.finish("no", std::nullopt, nullptr);
    }
    std::string text = lasso_to_text(g, *witness);
    inv.out << text << "\n";
    return inv.finish("yes", text, nullptr);
}

int run_ummels(Invocation& inv) {
    Game g = Game::from_json_file(inv.opt.game_path);
    UmmelsResult res = ummels_fixpoint(g);
    print_req_table(inv.out, g, res.req);
    inv.out << "retained edges:\n";
    for (auto [from, to] : res.retained_edges) {
        inv.out << "  " << g.vertex_name(from) << " -> " << g.vertex_name(to) << "\n";
    }
    OrderedJson table = req_table(g, res.req);
    return inv.finish("value", std::nullopt, &table);
}

int run_devgraph(Invocation& inv) {
    Game g = Game::from_json_file(inv.opt.game_path);
    Requirement req = load_req(g, inv.opt.req_path);
    PlayerId player = resolve_player(g, inv.opt.player);
    if (inv.opt.strategy_path.empty()) {
        throw std::invalid_argument("--strategy FILE is required for this command");
    }
    ReducedStrategy strat = reduced_strategy_from_json_file(g, inv.opt.strategy_path);
    VertexId start = resolve_vertex(g, inv.opt.from);
    if (!inv.opt.dot_path.empty()) {
        DeviationGraph dg = build_deviation_graph(g, req, player, strat);
        write_file(inv.opt.dot_path, deviation_graph_to_dot(g, dg));
        inv.out << "wrote deviation graph dot to " << inv.opt.dot_path << "\n";
    }
    bool ok = check_reduced_strategy(g, req, player, start, strat);
    inv.out << (ok ? "yes" : "no") << "\n";
    return inv.finish(ok ? "yes" : "no", std::nullopt, nullptr);
}

int run_gen_sat(Invocation& inv) {
    Cnf cnf = load_cnf(inv.opt.input1);
    Game g = gen_sat_game(cnf);
    emit_text(inv, inv.opt.out_path, g.to_json_text(), "game");
    return inv.finish("value", std::nullopt, nullptr);
}

int run_gen_bh2(Invocation& inv) {
    Cnf first = load_cnf(inv.opt.input1);
    Cnf second = load_cnf(inv.opt.input2);
    auto [g, req] = gen_bh2_game(first, second);
    emit_text(inv, inv.opt.out_path, g.to_json_text(), "game");
    emit_text(inv, inv.opt.req_out, req.to_json_text(g), "requirement");
    return inv.finish("value", std::nullopt, nullptr);
}

int run_gen_kripke(Invocation& inv) {
    Kripke k = Kripke::from_json_file(inv.opt.input1);
    if (inv.opt.ltl.empty()) throw std::invalid_argument("--ltl FORMULA is required");
    LtlFormula f = parse_ltl(inv.opt.ltl);
    auto [g, rewritten] = kripke_to_game(k, f);
    std::string formula_text = ltl_to_text(rewritten);
    emit_text(inv, inv.opt.out_path, g.to_json_text(), "game");
    if (inv.opt.ltl_out.empty()) {
        inv.out << "ltl: " << formula_text << "\n";
    } else {
        write_file(inv.opt.ltl_out, formula_text + "\n");
        inv.out << "wrote formula to " << inv.opt.ltl_out << "\n";
    }
    return inv.finish("value", formula_text, nullptr);
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Solver for multiplayer parity games: negotiation fixed points,"
                 " equilibrium play existence, and LTL queries over equilibrium outcomes."};
    app.name("spe");
    app.require_subcommand(0, 1);
    app.add_flag("--json", opt.json, "append a one-line JSON report to stdout");
    app.add_option("--jobs", opt.jobs, "worker threads for per-vertex computations")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "random seed (only used by test generators)");

    auto add_game = [&](CLI::App* sub) {
        sub->add_option("game", opt.game_path, "game description (JSON)")->required();
        sub->fallthrough();
    };

    CLI::App* lfp_cmd = app.add_subcommand("lfp", "least fixed point of the negotiation step");
    add_game(lfp_cmd);

    CLI::App* nego_cmd = app.add_subcommand("nego", "one negotiation step on a requirement");
    add_game(nego_cmd);
    nego_cmd->add_option("--req", opt.req_path, "requirement (JSON); defaults to all-zero");
    nego_cmd->add_option("--dot", opt.dot_path, "write the negotiation arena as DOT");
    nego_cmd->add_option("--from", opt.from, "start vertex for the arena dump");
    nego_cmd->add_option("--player", opt.player, "dump only this player's arena");

    CLI::App* fix_cmd =
        app.add_subcommand("check-fixpoint", "is the requirement a negotiation fixed point?");
    add_game(fix_cmd);
    fix_cmd->add_option("--req", opt.req_path, "requirement (JSON)")->required();

    CLI::App* lfp_check_cmd =
        app.add_subcommand("check-lfp", "is the requirement the least negotiation fixed point?");
    add_game(lfp_check_cmd);
    lfp_check_cmd->add_option("--req", opt.req_path, "requirement (JSON)")->required();

    CLI::App* sat_cmd =
        app.add_subcommand("satisfiable", "does every vertex admit a consistent play?");
    add_game(sat_cmd);
    sat_cmd->add_option("--req", opt.req_path, "requirement (JSON)")->required();
    sat_cmd->add_option("--cert-out", opt.cert_out, "write a checkable certificate (JSON)");

    CLI::App* exists_cmd =
        app.add_subcommand("exists", "equilibrium play within payoff bounds");
    add_game(exists_cmd);
    exists_cmd->add_option("--from", opt.from, "start vertex (default: initial)");
    exists_cmd->add_option("--lower", opt.lower, "lower payoff bounds, e.g. \"Circle=1,Box=0\"");
    exists_cmd->add_option("--upper", opt.upper, "upper payoff bounds, same syntax");
    exists_cmd->add_option("--kind", opt.kind, "equilibrium kind: ne or spe (default spe)");

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "subgame-perfect equilibrium play satisfying a formula");
    add_game(verify_cmd);
    verify_cmd->add_option("--from", opt.from, "start vertex (default: initial)");
    verify_cmd->add_option("--ltl", opt.ltl, "LTL formula over vertex names")->required();

    CLI::App* ummels_cmd =
        app.add_subcommand("ummels", "retained-edge fixed point (coalition pruning)");
    add_game(ummels_cmd);

    CLI::App* dev_cmd =
        app.add_subcommand("devgraph", "check a reduced strategy via its deviation graph");
    add_game(dev_cmd);
    dev_cmd->add_option("--req", opt.req_path, "requirement (JSON)")->required();
    dev_cmd->add_option("--player", opt.player, "deviating player")->required();
    dev_cmd->add_option("--strategy", opt.strategy_path, "reduced strategy (JSON)")->required();
    dev_cmd->add_option("--from", opt.from, "start vertex (default: initial)");
    dev_cmd->add_option("--dot", opt.dot_path, "write the deviation graph as DOT");

    CLI::App* gen_sat_cmd =
        app.add_subcommand("gen-sat", "clause-tour game from a CNF formula");
    gen_sat_cmd->add_option("cnf", opt.input1,
                            "DIMACS file, or inline clauses like \"x1 | ~x2; x2\"")
        ->required();
    gen_sat_cmd->add_option("-o,--out", opt.out_path, "write the game JSON here");
    gen_sat_cmd->fallthrough();

    CLI::App* gen_bh2_cmd = app.add_subcommand(
        "gen-bh2", "two-copy clause-tour game whose least-fixed-point check encodes"
                   " SAT(first) and UNSAT(second)");
    gen_bh2_cmd->add_option("first", opt.input1, "CNF (DIMACS file or inline)")->required();
    gen_bh2_cmd->add_option("second", opt.input2, "CNF (DIMACS file or inline)")->required();
    gen_bh2_cmd->add_option("-o,--out", opt.out_path, "write the game JSON here");
    gen_bh2_cmd->add_option("--req-out", opt.req_out, "write the requirement JSON here");
    gen_bh2_cmd->fallthrough();

    CLI::App* gen_kripke_cmd = app.add_subcommand(
        "gen-kripke", "one-player game plus rewritten formula from a Kripke structure");
    gen_kripke_cmd->add_option("kripke", opt.input1, "Kripke structure (JSON)")->required();
    gen_kripke_cmd->add_option("--ltl", opt.ltl, "LTL formula over the structure's atoms")
        ->required();
    gen_kripke_cmd->add_option("-o,--out", opt.out_path, "write the game JSON here");
    gen_kripke_cmd->add_option("--ltl-out", opt.ltl_out, "write the rewritten formula here");
    gen_kripke_cmd->fallthrough();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        for (auto [name, fn] : {
                 std::pair<CLI::App*, int (*)(Invocation&)>{lfp_cmd, run_lfp},
                 {nego_cmd, run_nego},
                 {sat_cmd, run_satisfiable},
                 {exists_cmd, run_exists},
                 {verify_cmd, run_verify},
                 {ummels_cmd, run_ummels},
                 {dev_cmd, run_devgraph},
                 {gen_sat_cmd, run_gen_sat},
                 {gen_bh2_cmd, run_gen_bh2},
                 {gen_kripke_cmd, run_gen_kripke},
             }) {
            if (name->parsed()) {
                Invocation inv{out, opt, name->get_name()};
                return fn(inv);
            }
        }
        if (fix_cmd->parsed()) {
            Invocation inv{out, opt, "check-fixpoint"};
            return run_check_fixpoint(inv, false);
        }
        if (lfp_check_cmd->parsed()) {
            Invocation inv{out, opt, "check-lfp"};
            return run_check_fixpoint(inv, true);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    out << app.help();
    return 2;
}

}  // namespace spe::cli
