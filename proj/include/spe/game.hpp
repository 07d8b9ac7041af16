// Multiplayer parity game arenas, lasso plays, payoffs, occurrence
// equivalence, and play reduction.
#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace spe {

using PlayerId = int;
using VertexId = int;

/**
 * A finite multiplayer parity game. Every vertex is owned by one player,
 * carries one color per player, and has at least one outgoing edge. A
 * player wins a play iff the minimum of her colors over the infinitely
 * repeated vertices is even.
 *
 * Construction goes through the builder methods (add_player, add_vertex,
 * set_color, add_edge, set_initial) followed by finalize(), or through
 * the JSON loaders which do all of that internally.
 */
class Game {
public:
    Game() = default;

    static Game from_json_text(const std::string& text);
    static Game from_json_file(const std::string& path);
    std::string to_json_text() const;

    PlayerId add_player(const std::string& name);
    VertexId add_vertex(const std::string& name, PlayerId owner);
    void set_color(PlayerId p, VertexId v, int color);
    void add_edge(VertexId from, VertexId to);
    void set_initial(VertexId v);

    /** Validates all invariants and builds derived tables. Throws
     *  std::invalid_argument on any violation. */
    void finalize();

    int num_players() const { return static_cast<int>(player_names_.size()); }
    int num_vertices() const { return static_cast<int>(vertex_names_.size()); }
    const std::string& player_name(PlayerId p) const { return player_names_[p]; }
    const std::string& vertex_name(VertexId v) const { return vertex_names_[v]; }
    std::optional<PlayerId> player_id(const std::string& name) const;
    std::optional<VertexId> vertex_id(const std::string& name) const;

    PlayerId owner(VertexId v) const { return owner_[v]; }
    int color(PlayerId p, VertexId v) const { return colors_[p][v]; }
    const std::vector<VertexId>& successors(VertexId v) const { return succ_[v]; }
    const std::vector<VertexId>& predecessors(VertexId v) const { return pred_[v]; }
    const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }
    bool has_edge(VertexId from, VertexId to) const;
    VertexId initial() const { return initial_; }

    /** Sorted distinct colors player p uses anywhere in the game. */
    const std::vector<int>& distinct_colors(PlayerId p) const { return distinct_colors_[p]; }
    int max_color() const { return max_color_; }

    /** Vertices owned by player p. */
    const std::vector<VertexId>& owned_by(PlayerId p) const { return owned_[p]; }

private:
    std::vector<std::string> player_names_;
    std::vector<std::string> vertex_names_;
    std::unordered_map<std::string, PlayerId> player_index_;
    std::unordered_map<std::string, VertexId> vertex_index_;
    std::vector<PlayerId> owner_;
    std::vector<std::vector<int>> colors_;  // colors_[player][vertex], -1 = unset
    std::vector<std::pair<VertexId, VertexId>> edges_;
    std::vector<std::vector<VertexId>> succ_;
    std::vector<std::vector<VertexId>> pred_;
    std::vector<std::vector<VertexId>> owned_;
    std::vector<std::vector<int>> distinct_colors_;
    std::unordered_set<long long> edge_set_;
    VertexId initial_ = -1;
    int max_color_ = 0;
    bool finalized_ = false;
};

/**
 * An ultimately periodic play prefix . cycle^omega. The prefix may be
 * empty, the cycle never is.
 */
struct LassoPlay {
    std::vector<VertexId> prefix;
    std::vector<VertexId> cycle;

    bool operator==(const LassoPlay& other) const {
        return prefix == other.prefix && cycle == other.cycle;
    }
};

/** True iff every step of the lasso follows a game edge (including the
 *  prefix-to-cycle entry and the cycle closure) and the cycle is nonempty. */
bool valid_lasso(const Game& g, const LassoPlay& play);

/** Per-player parity payoff of the lasso: 1 iff the minimum color over the
 *  cycle's occurrence set is even. */
std::vector<int> payoff(const Game& g, const LassoPlay& play);

/** Occurrence equivalence of the two induced infinite plays: equal
 *  infinitely-repeated sets, and each finite prefix of one play matches a
 *  prefix of the other with the same occurrence set and the same end
 *  vertex (in both directions). */
bool occ_equiv(const LassoPlay& a, const LassoPlay& b);

/**
 * Returns a lasso occurrence-equivalent to the input whose prefix has at
 * most n^3 + n^2 vertices and whose cycle has at most n^2, where n is the
 * number of game vertices.
 */
LassoPlay reduce_play(const Game& g, const LassoPlay& play);

/** Renders the lasso as text, e.g. "a b (c d)^w". */
std::string lasso_to_text(const Game& g, const LassoPlay& play);

/** Parses the textual lasso format. Throws std::invalid_argument on
 *  malformed syntax or unknown vertex names. */
LassoPlay lasso_from_text(const Game& g, const std::string& text);

}  // namespace spe
