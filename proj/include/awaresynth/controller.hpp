#pragma once

// Deterministic Mealy strategy extraction from a solved GR(1) game, plus a
// stable textual dump consumed by the simulator and golden tests.
//
// Move selection, per controller node and environment move:
//   - on a state satisfying the pursued goal, advance the goal index and
//     take any winning successor (the measure resets);
//   - while every environment liveness goal currently holds, take a
//     successor of strictly smaller goal distance;
//   - while some environment goal is false the strategy may wait: any
//     winning successor qualifies (sound here because the persistence
//     assumptions make the environment goals latch once satisfied).
// Ties: prefer outputs move < slowDown < halt, reversed to halt-first while
// a stop prescription is pending, then the lowest successor state id.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "awaresynth/game.hpp"
#include "awaresynth/solver.hpp"

namespace aware {

struct NotRealizable : std::runtime_error {
    NotRealizable() : std::runtime_error("specification is not realizable") {}
};

struct ControllerDeadEnd : std::runtime_error {
    explicit ControllerDeadEnd(const std::string& where)
        : std::runtime_error("controller has no move at " + where) {}
};

class MealyController {
public:
    struct Node {
        std::size_t sid;   // game state
        std::size_t goal;  // pursued system goal index
    };
    struct Step {
        std::size_t next_node;
        std::string output;
        std::string next_state;  // FTS state name
    };

    // One root per legal initial valuation: a Mealy run applies its first
    // input at the initial state, so the root already carries it.
    const std::map<std::uint32_t, std::size_t>& roots() const { return roots_; }
    std::size_t start(std::uint32_t valuation) const {
        auto it = roots_.find(valuation);
        if (it == roots_.end())
            throw ControllerDeadEnd("no root for initial valuation");
        return it->second;
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::string>& env_names() const { return env_names_; }

    const Step* step(std::size_t node, std::uint32_t valuation) const {
        auto it = table_.find(key(node, valuation));
        return it == table_.end() ? nullptr : &it->second;
    }

    std::uint32_t valuation_of_names(const std::vector<std::string>& names) const {
        std::uint32_t v = 0;
        for (const auto& n : names) {
            bool hit = false;
            for (std::size_t i = 0; i < env_names_.size(); ++i)
                if (env_names_[i] == n) { v |= 1u << i; hit = true; break; }
            if (!hit) throw std::invalid_argument("unknown environment feature '" + n + "'");
        }
        return v;
    }

    std::string node_state_name(std::size_t node) const { return node_state_names_.at(node); }
    std::string node_valuation_bits(std::size_t node) const { return node_bits_.at(node); }

    std::string dump() const {
        std::ostringstream out;
        out << "mealy v1\n";
        out << "envvars";
        for (const auto& n : env_names_) out << ' ' << n;
        out << '\n';
        for (const auto& [v, node] : roots_)
            out << "root " << bits_of(v) << ' ' << node << "\n";
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            out << "node " << i << ' ' << node_state_names_[i] << ' ' << node_bits_[i]
                << ' ' << nodes_[i].goal << "\n";
        for (const auto& [k, st] : table_)
            out << "step " << k.first << ' ' << bits_of(k.second) << ' ' << st.next_node
                << ' ' << st.output << ' ' << st.next_state << "\n";
        return out.str();
    }

    friend MealyController extract_controller(const Game&, const SolveResult&);
    friend MealyController parse_controller(const std::string&);
    friend void bind_to_game(MealyController&, const Game&);

private:
    static std::pair<std::size_t, std::uint32_t> key(std::size_t node, std::uint32_t v) {
        return {node, v};
    }
    std::string bits_of(std::uint32_t v) const {
        std::string out(env_names_.size(), '0');
        for (std::size_t i = 0; i < env_names_.size(); ++i)
            if (v >> i & 1) out[i] = '1';
        return out;
    }

    std::map<std::uint32_t, std::size_t> roots_;
    std::vector<Node> nodes_;
    std::vector<std::string> node_state_names_;
    std::vector<std::string> node_bits_;
    std::vector<std::string> env_names_;
    std::map<std::pair<std::size_t, std::uint32_t>, Step> table_;
};

namespace detail {

inline int output_preference(const std::string& output, bool stop_pending) {
    auto index_of = [](const std::string& o) {
        if (o == "move") return 0;
        if (o == "slowDown") return 1;
        if (o == "halt") return 2;
        return 3;
    };
    int idx = index_of(output);
    return stop_pending ? (idx < 3 ? 2 - idx : idx) : idx;
}

} // namespace detail

inline MealyController extract_controller(const Game& game, const SolveResult& result) {
    if (!result.realizable) throw NotRealizable();

    MealyController ctrl;
    for (const auto& p : game.env_bits()) ctrl.env_names_.push_back(p.name);

    const std::size_t goals = game.sys_goal_count();

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> node_index;
    auto intern = [&](std::size_t sid, std::size_t goal) {
        auto it = node_index.find({sid, goal});
        if (it != node_index.end()) return it->second;
        std::size_t id = ctrl.nodes_.size();
        node_index.emplace(std::make_pair(sid, goal), id);
        ctrl.nodes_.push_back({sid, goal});
        ctrl.node_state_names_.push_back(game.fts().state_name(game.q_of(sid)));
        ctrl.node_bits_.push_back(game.valuation_bits(game.v_of(sid)));
        return id;
    };

    for (std::size_t s : game.init_sids())
        ctrl.roots_.emplace(game.v_of(s), intern(s, 0));

    for (std::size_t n = 0; n < ctrl.nodes_.size(); ++n) {  // grows while iterating
        const auto [sid, goal] = ctrl.nodes_[n];
        const std::size_t q = game.q_of(sid);
        const bool at_goal = goals > 0 && game.sys_goal(goal, sid);
        const bool must_progress = goals > 0 && !at_goal && game.all_env_goals(sid);
        const bool pending = game.obligation_active(sid);
        const std::size_t next_goal = goals > 0 ? (at_goal ? (goal + 1) % goals : goal) : 0;

        for (std::uint32_t vn : game.env_moves(sid)) {
            std::optional<std::size_t> best;
            long best_key = 0;
            for (std::size_t e : game.legal_edges(sid, vn)) {
                const FtsEdge& edge = game.fts().edges()[e];
                const std::size_t sn = game.sid(edge.to, vn);
                if (!game.state_valid(sn) || !result.winning[sn]) continue;
                long rank_part = 0;
                if (must_progress) {
                    int rs = result.rank[goal][sid];
                    int rn = result.rank[goal][sn];
                    if (rn < 0 || rn >= rs) continue;  // strict progress required
                    rank_part = rn;
                }
                long key = (rank_part * 8 + detail::output_preference(edge.output, pending)) * 64 +
                           static_cast<long>(edge.to);
                if (!best || key < best_key) { best = e; best_key = key; }
            }
            if (!best)
                throw ControllerDeadEnd(game.describe(sid) + " upon " + game.valuation_bits(vn));
            const FtsEdge& edge = game.fts().edges()[*best];
            std::size_t next_node = intern(game.sid(edge.to, vn), next_goal);
            ctrl.table_[{n, vn}] = {next_node, edge.output, game.fts().state_name(edge.to)};
        }
    }
    return ctrl;
}

inline MealyController parse_controller(const std::string& text) {
    MealyController ctrl;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("controller dump line " + std::to_string(lineno) + ": " + msg);
    };
    auto parse_bits = [&](const std::string& bits) {
        std::uint32_t v = 0;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] == '1') v |= 1u << i;
            else if (bits[i] != '0') fail("bad valuation '" + bits + "'");
        return v;
    };
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "mealy") { header = true; continue; }
        if (!header) fail("missing 'mealy v1' header");
        if (kw == "envvars") {
            std::string n;
            while (ls >> n) ctrl.env_names_.push_back(n);
        } else if (kw == "root") {
            std::string bits;
            std::size_t node;
            if (!(ls >> bits >> node)) fail("bad root record");
            ctrl.roots_[parse_bits(bits)] = node;
        } else if (kw == "node") {
            std::size_t id, goal;
            std::string state, bits;
            if (!(ls >> id >> state >> bits >> goal)) fail("bad node record");
            if (id != ctrl.nodes_.size()) fail("out-of-order node id");
            ctrl.nodes_.push_back({0, goal});
            ctrl.node_state_names_.push_back(state);
            ctrl.node_bits_.push_back(bits);
        } else if (kw == "step") {
            std::size_t node, next;
            std::string bits, output, next_state;
            if (!(ls >> node >> bits >> next >> output >> next_state)) fail("bad step record");
            ctrl.table_[{node, parse_bits(bits)}] = {next, output, next_state};
        } else fail("unknown record '" + kw + "'");
    }
    if (!header) throw std::runtime_error("not a controller dump");
    return ctrl;
}

// Reattach a parsed controller to its game: node game-state ids are
// reconstructed from the dumped state names and valuation bits.
inline void bind_to_game(MealyController& ctrl, const Game& game) {
    for (std::size_t i = 0; i < ctrl.nodes_.size(); ++i) {
        std::size_t q = game.fts().state_id(ctrl.node_state_names_[i]);
        std::uint32_t v = game.valuation_from_bits(ctrl.node_bits_[i]);
        ctrl.nodes_[i].sid = game.sid(q, v);
    }
}

} // namespace aware
