#pragma once

// Bounded adversarial check of an extracted controller against its own
// game: exhaustively walks every legal environment move sequence up to a
// depth, confirming the controller is receptive, never takes a step its
// safety rules exclude, and keeps visiting its goals while the environment
// honors its liveness.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "awaresynth/controller.hpp"
#include "awaresynth/game.hpp"

namespace aware {

struct DepthTooLargeForBudget : std::runtime_error {
    explicit DepthTooLargeForBudget(std::size_t budget)
        : std::runtime_error("bounded verification exceeds its step budget of " +
                             std::to_string(budget)) {}
};

struct VerifyViolation {
    enum Kind { Receptiveness, Safety, Liveness, StateInvariant } kind = Safety;
    std::string detail;
    std::vector<std::string> trace;  // readable steps from the initial node
};

struct VerifyOptions {
    std::size_t depth = 15;
    std::size_t step_budget = 50'000'000;
    // Window (in steps) within which every system goal must recur while all
    // environment goals hold; defaults to one tour of the plant plus slack.
    std::size_t liveness_window = 0;
};

namespace detail {

class BoundedVerifier {
public:
    BoundedVerifier(const Game& game, const MealyController& ctrl, VerifyOptions opts)
        : g_(game), c_(ctrl), opts_(opts) {
        if (opts_.depth < 1) throw std::invalid_argument("depth must be >= 1");
        window_ = opts_.liveness_window ? opts_.liveness_window
                                        : g_.fts().state_count() + 2;
    }

    std::optional<VerifyViolation> run(std::size_t start_node) {
        trace_.clear();
        steps_ = 0;
        std::vector<std::size_t> last_goal_seen(g_.sys_goal_count(), 0);
        return walk(start_node, 0, 0, last_goal_seen);
    }

    std::optional<VerifyViolation> run_all_roots() {
        for (const auto& [v, node] : c_.roots()) {
            (void)v;
            if (auto violation = run(node)) return violation;
        }
        return std::nullopt;
    }

private:
    std::optional<VerifyViolation> walk(std::size_t node, std::size_t depth,
                                        std::size_t env_streak,
                                        std::vector<std::size_t> last_goal_seen) {
        if (depth == opts_.depth) return std::nullopt;
        const std::size_t sid = c_.nodes()[node].sid;

        for (std::uint32_t vn : g_.env_moves(sid)) {
            if (++steps_ > opts_.step_budget) throw DepthTooLargeForBudget(opts_.step_budget);

            const MealyController::Step* st = c_.step(node, vn);
            if (!st)
                return fail(VerifyViolation::Receptiveness,
                            "no response at " + g_.describe(sid) + " upon " +
                                g_.valuation_bits(vn));

            // Identify the edge the controller takes.
            std::size_t edge = npos;
            for (std::size_t e : g_.fts().out_edge_ids(g_.q_of(sid))) {
                const FtsEdge& fe = g_.fts().edges()[e];
                if (fe.output == st->output && g_.fts().state_name(fe.to) == st->next_state) {
                    edge = e;
                    break;
                }
            }
            if (edge == npos)
                return fail(VerifyViolation::Safety,
                            "controller step is not an FTS edge at " + g_.describe(sid));

            trace_.push_back(g_.describe(sid) + " --" + g_.valuation_bits(vn) + "/" +
                             st->output + "--> " + st->next_state);

            if (!g_.step_allows(sid, vn, edge)) {
                std::string rule = g_.violated_rule(sid, vn, edge);
                return fail(VerifyViolation::Safety,
                            "step breaks " + (rule.empty() ? std::string("a safety rule") : rule) +
                                " at " + g_.describe(sid));
            }

            const std::size_t sn = g_.sid(g_.fts().edges()[edge].to, vn);
            if (!g_.state_valid(sn))
                return fail(VerifyViolation::StateInvariant,
                            "step enters invalid state " + g_.describe(sn));

            // Liveness progress bookkeeping.
            std::size_t streak = g_.all_env_goals(sn) ? env_streak + 1 : 0;
            auto seen = last_goal_seen;
            for (std::size_t j = 0; j < g_.sys_goal_count(); ++j) {
                if (g_.sys_goal(j, sn)) seen[j] = depth + 1;
                else if (streak >= window_ && depth + 1 - seen[j] >= window_)
                    return fail(VerifyViolation::Liveness,
                                "system goal " + std::to_string(j) + " starved for " +
                                    std::to_string(window_) + " steps under live environment");
            }

            const std::size_t next = st->next_node;
            if (auto v = walk(next, depth + 1, streak, seen)) return v;
            trace_.pop_back();
        }
        return std::nullopt;
    }

    std::optional<VerifyViolation> fail(VerifyViolation::Kind kind, const std::string& detail) {
        VerifyViolation v;
        v.kind = kind;
        v.detail = detail;
        v.trace = trace_;
        return v;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    const Game& g_;
    const MealyController& c_;
    VerifyOptions opts_;
    std::size_t window_ = 12;
    std::size_t steps_ = 0;
    std::vector<std::string> trace_;
};

} // namespace detail

inline std::optional<VerifyViolation> verify_bounded(const Game& game,
                                                     const MealyController& controller,
                                                     VerifyOptions opts = {}) {
    return detail::BoundedVerifier(game, controller, opts).run_all_roots();
}

// Entry point for checking from an arbitrary controller node, used by the
// winning-region soundness tests.
inline std::optional<VerifyViolation> verify_bounded_from(const Game& game,
                                                          const MealyController& controller,
                                                          std::size_t node,
                                                          VerifyOptions opts = {}) {
    return detail::BoundedVerifier(game, controller, opts).run(node);
}

} // namespace aware
