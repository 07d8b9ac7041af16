#include "spe/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace spe {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument(msg);
}

struct Token {
    enum class Type { Atom, True, False, Not, Or, And, Implies, Next, Finally, Globally, Until,
                      LParen, RParen, End };
    Type type;
    std::string text;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    size_t i = 0;
    auto is_ident_start = [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    };
    auto is_ident_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '~';
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '(') {
            tokens.push_back({Token::Type::LParen, "("});
            ++i;
        } else if (c == ')') {
            tokens.push_back({Token::Type::RParen, ")"});
            ++i;
        } else if (c == '!') {
            tokens.push_back({Token::Type::Not, "!"});
            ++i;
        } else if (c == '|') {
            tokens.push_back({Token::Type::Or, "|"});
            ++i;
        } else if (c == '&') {
            tokens.push_back({Token::Type::And, "&"});
            ++i;
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            tokens.push_back({Token::Type::Implies, "->"});
            i += 2;
        } else if (is_ident_start(c)) {
            size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            std::string word = text.substr(i, j - i);
            i = j;
            if (word == "true") tokens.push_back({Token::Type::True, word});
            else if (word == "false") tokens.push_back({Token::Type::False, word});
            else if (word == "X") tokens.push_back({Token::Type::Next, word});
            else if (word == "F") tokens.push_back({Token::Type::Finally, word});
            else if (word == "G") tokens.push_back({Token::Type::Globally, word});
            else if (word == "U") tokens.push_back({Token::Type::Until, word});
            else tokens.push_back({Token::Type::Atom, word});
        } else {
            fail(std::string("unexpected character '") + c + "' in LTL formula");
        }
    }
    tokens.push_back({Token::Type::End, ""});
    return tokens;
}

// Recursive-descent parser producing the expanded core. Precedence, from
// loosest: -> (right), |, &, U (right), unary (! X F G), primary.
class Parser {
public:
    explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

    LtlFormula parse() {
        f_.root = parse_implies();
        if (peek().type != Token::Type::End) fail("trailing input in LTL formula");
        return std::move(f_);
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token take() { return tokens_[pos_++]; }

    int node(LtlFormula::Kind kind, int a = -1, int b = -1, std::string atom = {}) {
        f_.nodes.push_back({kind, a, b, std::move(atom)});
        return static_cast<int>(f_.nodes.size()) - 1;
    }

    int mk_true() { return node(LtlFormula::Kind::True); }
    int mk_not(int a) { return node(LtlFormula::Kind::Not, a); }
    int mk_or(int a, int b) { return node(LtlFormula::Kind::Or, a, b); }

    int parse_implies() {
        int left = parse_or();
        if (peek().type == Token::Type::Implies) {
            take();
            int right = parse_implies();
            return mk_or(mk_not(left), right);
        }
        return left;
    }

    int parse_or() {
        int left = parse_and();
        while (peek().type == Token::Type::Or) {
            take();
            int right = parse_and();
            left = mk_or(left, right);
        }
        return left;
    }

    int parse_and() {
        int left = parse_until();
        while (peek().type == Token::Type::And) {
            take();
            int right = parse_until();
            left = mk_not(mk_or(mk_not(left), mk_not(right)));
        }
        return left;
    }

    int parse_until() {
        int left = parse_unary();
        if (peek().type == Token::Type::Until) {
            take();
            int right = parse_until();
            return node(LtlFormula::Kind::Until, left, right);
        }
        return left;
    }

    int parse_unary() {
        switch (peek().type) {
            case Token::Type::Not: {
                take();
                return mk_not(parse_unary());
            }
            case Token::Type::Next: {
                take();
                return node(LtlFormula::Kind::Next, parse_unary());
            }
            case Token::Type::Finally: {
                take();
                return node(LtlFormula::Kind::Until, mk_true(), parse_unary());
            }
            case Token::Type::Globally: {
                take();
                int inner = parse_unary();
                return mk_not(node(LtlFormula::Kind::Until, mk_true(), mk_not(inner)));
            }
            default:
                return parse_primary();
        }
    }

    int parse_primary() {
        Token t = take();
        switch (t.type) {
            case Token::Type::True:
                return mk_true();
            case Token::Type::False:
                return mk_not(mk_true());
            case Token::Type::Atom:
                return node(LtlFormula::Kind::Atom, -1, -1, t.text);
            case Token::Type::LParen: {
                int inner = parse_implies();
                if (take().type != Token::Type::RParen) fail("missing ')' in LTL formula");
                return inner;
            }
            default:
                fail("unexpected token '" + t.text + "' in LTL formula");
        }
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
    LtlFormula f_;
};

std::string render(const LtlFormula& f, int idx, int parent_binding) {
    // Binding strengths: | = 1, U = 2, unary = 3. Parenthesize whenever a
    // weaker construct appears under a stronger context.
    const LtlFormula::Node& n = f.nodes[idx];
    switch (n.kind) {
        case LtlFormula::Kind::True:
            return "true";
        case LtlFormula::Kind::Atom:
            return n.atom;
        case LtlFormula::Kind::Not:
            return "!" + render(f, n.a, 3);
        case LtlFormula::Kind::Next:
            return "X " + render(f, n.a, 3);
        case LtlFormula::Kind::Or: {
            std::string s = render(f, n.a, 1) + " | " + render(f, n.b, 1);
            return parent_binding > 1 ? "(" + s + ")" : s;
        }
        case LtlFormula::Kind::Until: {
            std::string s = render(f, n.a, 3) + " U " + render(f, n.b, 2);
            return parent_binding > 2 ? "(" + s + ")" : s;
        }
    }
    return "";
}

}  // namespace

LtlFormula parse_ltl(const std::string& text) {
    return Parser(text).parse();
}

std::string ltl_to_text(const LtlFormula& f) {
    if (f.root < 0) fail("ltl_to_text: empty formula");
    return render(f, f.root, 0);
}

bool eval_lasso(const LtlFormula& f, const Game& g, const LassoPlay& play) {
    if (f.root < 0) fail("eval_lasso: empty formula");
    if (!valid_lasso(g, play)) fail("eval_lasso: invalid lasso");

    std::vector<VertexId> positions = play.prefix;
    positions.insert(positions.end(), play.cycle.begin(), play.cycle.end());
    int len = static_cast<int>(positions.size());
    auto next_pos = [&](int k) {
        return (k + 1 < len) ? k + 1 : static_cast<int>(play.prefix.size());
    };

    std::vector<std::vector<char>> truth(f.nodes.size(), std::vector<char>(len, 0));
    for (size_t idx = 0; idx < f.nodes.size(); ++idx) {
        const LtlFormula::Node& n = f.nodes[idx];
        switch (n.kind) {
            case LtlFormula::Kind::True:
                std::fill(truth[idx].begin(), truth[idx].end(), 1);
                break;
            case LtlFormula::Kind::Atom: {
                auto v = g.vertex_id(n.atom);
                for (int k = 0; k < len; ++k) {
                    truth[idx][k] = (v && positions[k] == *v) ? 1 : 0;
                }
                break;
            }
            case LtlFormula::Kind::Not:
                for (int k = 0; k < len; ++k) truth[idx][k] = !truth[n.a][k];
                break;
            case LtlFormula::Kind::Or:
                for (int k = 0; k < len; ++k) truth[idx][k] = truth[n.a][k] || truth[n.b][k];
                break;
            case LtlFormula::Kind::Next:
                for (int k = 0; k < len; ++k) truth[idx][k] = truth[n.a][next_pos(k)];
                break;
            case LtlFormula::Kind::Until: {
                // Least fixpoint of U = b | (a & X U) over the lasso graph.
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (int k = len - 1; k >= 0; --k) {
                        char val = truth[n.b][k] ||
                                   (truth[n.a][k] && truth[idx][next_pos(k)]);
                        if (val != truth[idx][k]) {
                            truth[idx][k] = val;
                            changed = true;
                        }
                    }
                }
                break;
            }
        }
    }
    return truth[f.root][0] != 0;
}

bool Gba::in_acc_set(int acc, int state) const {
    uint64_t bits = states[state];
    bool until_holds = (bits >> until_nodes[acc]) & 1;
    bool rhs_holds = (bits >> until_rhs[acc]) & 1;
    return !until_holds || rhs_holds;
}

bool Gba::letter_matches(int state, const std::vector<char>& atom_values) const {
    uint64_t bits = states[state];
    for (size_t i = 0; i < atoms.size(); ++i) {
        bool bit = (bits >> atoms[i].node) & 1;
        if (bit != (atom_values[i] != 0)) return false;
    }
    return true;
}

bool Gba::step_allowed(int from, int to) const {
    uint64_t a = states[from];
    uint64_t b = states[to];
    for (size_t i = 0; i < next_nodes.size(); ++i) {
        bool x_bit = (a >> next_nodes[i]) & 1;
        bool arg_next = (b >> next_args[i]) & 1;
        if (x_bit != arg_next) return false;
    }
    for (size_t i = 0; i < until_nodes.size(); ++i) {
        bool u_now = (a >> until_nodes[i]) & 1;
        bool rhs_now = (a >> until_rhs[i]) & 1;
        bool lhs_now = (a >> until_lhs[i]) & 1;
        bool u_next = (b >> until_nodes[i]) & 1;
        bool expanded = rhs_now || (lhs_now && u_next);
        if (u_now != expanded) return false;
    }
    return true;
}

Gba ltl_to_gba(const LtlFormula& f) {
    if (f.root < 0) fail("ltl_to_gba: empty formula");
    if (f.size() > 64) fail("ltl_to_gba: formula too large (more than 64 nodes)");

    Gba gba;
    gba.root = f.root;
    std::vector<int> free_bits;
    for (int idx = 0; idx < f.size(); ++idx) {
        const LtlFormula::Node& n = f.nodes[idx];
        switch (n.kind) {
            case LtlFormula::Kind::Atom:
                gba.atoms.push_back({idx, n.atom});
                free_bits.push_back(idx);
                break;
            case LtlFormula::Kind::Next:
                gba.next_nodes.push_back(idx);
                gba.next_args.push_back(n.a);
                free_bits.push_back(idx);
                break;
            case LtlFormula::Kind::Until:
                gba.until_nodes.push_back(idx);
                gba.until_rhs.push_back(n.b);
                gba.until_lhs.push_back(n.a);
                free_bits.push_back(idx);
                break;
            default:
                break;
        }
    }

    if (free_bits.size() > 24) {
        fail("ltl_to_gba: formula has too many independent bits to enumerate");
    }

    uint64_t combos = 1ULL << free_bits.size();
    for (uint64_t assignment = 0; assignment < combos; ++assignment) {
        uint64_t bits = 0;
        for (size_t i = 0; i < free_bits.size(); ++i) {
            if ((assignment >> i) & 1) bits |= 1ULL << free_bits[i];
        }
        // Derive the boolean structure bottom-up (children precede parents).
        for (int idx = 0; idx < f.size(); ++idx) {
            const LtlFormula::Node& n = f.nodes[idx];
            switch (n.kind) {
                case LtlFormula::Kind::True:
                    bits |= 1ULL << idx;
                    break;
                case LtlFormula::Kind::Not:
                    if (!((bits >> n.a) & 1)) bits |= 1ULL << idx;
                    break;
                case LtlFormula::Kind::Or:
                    if (((bits >> n.a) & 1) || ((bits >> n.b) & 1)) bits |= 1ULL << idx;
                    break;
                default:
                    break;
            }
        }
        // Local until coherence: the right side forces the until, and an
        // asserted until needs one of its sides now.
        bool ok = true;
        for (size_t i = 0; i < gba.until_nodes.size(); ++i) {
            bool u = (bits >> gba.until_nodes[i]) & 1;
            bool lhs = (bits >> gba.until_lhs[i]) & 1;
            bool rhs = (bits >> gba.until_rhs[i]) & 1;
            if (rhs && !u) ok = false;
            if (u && !rhs && !lhs) ok = false;
        }
        if (!ok) continue;
        gba.states.push_back(bits);
    }
    return gba;
}

}  // namespace spe
