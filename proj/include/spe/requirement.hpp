// Requirements (per-vertex payoff demands), lasso consistency, requirement
// satisfiability, and satisfiability certificates.
#pragma once

#include <string>
#include <vector>

#include "spe/game.hpp"

namespace spe {

/** A demanded payoff at one vertex: 0 (no demand), 1 (the owner must win
 *  any play that visits the vertex), or Inf (no play may visit it). */
enum class ReqVal : unsigned char { Zero = 0, One = 1, Inf = 2 };

/** A requirement assigns a ReqVal to every vertex of a fixed game. */
class Requirement {
public:
    Requirement() = default;
    explicit Requirement(int num_vertices, ReqVal fill = ReqVal::Zero)
        : vals_(num_vertices, fill) {}

    static Requirement zero(const Game& g) { return Requirement(g.num_vertices()); }

    ReqVal operator[](VertexId v) const { return vals_[v]; }
    ReqVal& operator[](VertexId v) { return vals_[v]; }
    int size() const { return static_cast<int>(vals_.size()); }

    bool operator==(const Requirement& other) const { return vals_ == other.vals_; }
    bool operator!=(const Requirement& other) const { return vals_ != other.vals_; }

    static Requirement from_json_text(const Game& g, const std::string& text);
    static Requirement from_json_file(const Game& g, const std::string& path);
    std::string to_json_text(const Game& g) const;

private:
    std::vector<ReqVal> vals_;
};

/** Pointwise order with 0 < 1 < Inf. */
bool req_leq(const Requirement& a, const Requirement& b);

/**
 * True iff the lasso's play satisfies the requirement: no visited vertex
 * demands Inf, and the owner of every visited vertex demanding 1 wins the
 * play.
 */
bool consistent(const Game& g, const Requirement& req, const LassoPlay& play);

/**
 * Witness that a requirement is satisfiable: for each vertex v, an acyclic
 * history h_v starting at v and a set W_v such that h_v ends in W_v, W_v is
 * strongly connected and can carry a cycle, and every 1-demanding vertex
 * on h_v or in W_v has an owner whose minimum color over W_v is even.
 */
struct SatCertificate {
    std::vector<std::vector<VertexId>> h;  // indexed by vertex
    std::vector<std::vector<VertexId>> W;

    static SatCertificate from_json_text(const Game& g, const std::string& text);
    std::string to_json_text(const Game& g) const;
};

/**
 * Decides whether a requirement-consistent play exists from every vertex.
 * If `cert` is non-null and the answer is yes, fills it with a witness
 * that check_certificate accepts.
 */
bool satisfiable(const Game& g, const Requirement& req, SatCertificate* cert = nullptr);

/**
 * Checks a claimed satisfiability certificate. Returns false when a
 * well-formed certificate fails one of the witness conditions; throws
 * std::invalid_argument when it is malformed (wrong start vertex, a
 * non-edge step, a cyclic history, or an end vertex outside its W set).
 */
bool check_certificate(const Game& g, const Requirement& req, const SatCertificate& cert);

}  // namespace spe
