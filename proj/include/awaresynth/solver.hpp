#pragma once

// Three-nested fixpoint solver for GR(1) games over explicit state sets.
//
// Outermost: greatest fixpoint over the candidate winning set Z. For each
// system goal, a least fixpoint accumulates the states that can force goal
// progress; innermost, per environment goal, a greatest fixpoint keeps the
// states that may lawfully wait while that environment goal stays false.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "awaresynth/game.hpp"

namespace aware {

struct SolveResult {
    bool realizable = false;
    std::vector<char> winning;                  // per game state id
    std::vector<std::vector<int>> rank;         // per sys goal: minimal Y level, 0 on goal states
    std::vector<std::size_t> counter_initial;   // initial states outside the winning set
};

namespace detail {

class Gr1Solver {
public:
    explicit Gr1Solver(const Game& game) : g_(game), n_(game.state_count()) {}

    SolveResult solve() {
        std::vector<char> z(n_, 0);
        for (std::size_t s = 0; s < n_; ++s) z[s] = g_.state_valid(s) ? 1 : 0;

        const std::size_t goals = g_.sys_goal_count();
        if (goals == 0) {
            // Pure safety: stay receptive inside the valid region forever.
            bool changed = true;
            while (changed) {
                changed = false;
                std::vector<char> pre = cpre(z);
                for (std::size_t s = 0; s < n_; ++s)
                    if (z[s] && !pre[s]) { z[s] = 0; changed = true; }
            }
        } else {
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t j = 0; j < goals; ++j) {
                    std::vector<char> y = fix_y(j, z, nullptr);
                    // fix_y confines Y to Z, so this only ever shrinks Z.
                    for (std::size_t s = 0; s < n_; ++s)
                        if (z[s] && !y[s]) { z[s] = 0; changed = true; }
                }
            }
        }

        SolveResult res;
        res.winning = z;
        res.rank.resize(goals);
        for (std::size_t j = 0; j < goals; ++j) {
            std::vector<int> rank(n_, -1);
            fix_y(j, z, &rank);
            res.rank[j] = std::move(rank);
        }

        res.realizable = true;
        for (std::size_t s : g_.init_sids())
            if (!z[s]) { res.realizable = false; res.counter_initial.push_back(s); }
        if (g_.init_sids().empty()) res.realizable = false;
        return res;
    }

private:
    // Controllable predecessor: whatever valuation the environment plays
    // next, some legal system response lands in T.
    std::vector<char> cpre(const std::vector<char>& t) const {
        std::vector<char> out(n_, 0);
        for (std::size_t s = 0; s < n_; ++s) {
            if (!g_.state_valid(s)) continue;
            bool all = true;
            for (std::uint32_t vn : g_.env_moves(s)) {
                bool some = false;
                for (std::size_t e : g_.legal_edges(s, vn)) {
                    std::size_t sn = g_.sid(g_.fts().edges()[e].to, vn);
                    if (g_.state_valid(sn) && t[sn]) { some = true; break; }
                }
                if (!some) { all = false; break; }
            }
            out[s] = all ? 1 : 0;
        }
        return out;
    }

    // Least fixpoint of Y for system goal j inside Z. When `rank_out` is
    // given, records the first Y iteration admitting each state; goal
    // states rank 0.
    std::vector<char> fix_y(std::size_t j, const std::vector<char>& z,
                            std::vector<int>* rank_out) const {
        std::vector<char> goal(n_, 0);
        for (std::size_t s = 0; s < n_; ++s)
            if (g_.state_valid(s) && g_.sys_goal(j, s)) goal[s] = 1;

        std::vector<char> y(n_, 0);
        std::vector<char> pre_z = cpre(z);
        int level = 0;
        std::size_t y_size = 0;
        while (true) {
            ++level;
            std::vector<char> pre_y = cpre(y);
            std::vector<char> start(n_, 0);
            for (std::size_t s = 0; s < n_; ++s)
                start[s] = (z[s] && ((goal[s] && pre_z[s]) || pre_y[s])) ? 1 : 0;

            std::vector<char> ynew(n_, 0);
            const std::size_t env_goals = g_.env_goal_count();
            if (env_goals == 0) {
                ynew = start;
            } else {
                for (std::size_t i = 0; i < env_goals; ++i) {
                    std::vector<char> x = z;
                    while (true) {
                        std::vector<char> pre_x = cpre(x);
                        std::vector<char> xnew(n_, 0);
                        bool shrunk = false;
                        for (std::size_t s = 0; s < n_; ++s) {
                            xnew[s] = (z[s] && (start[s] || (!g_.env_goal(i, s) && pre_x[s] &&
                                                             g_.state_valid(s)))) ? 1 : 0;
                            if (x[s] && !xnew[s]) shrunk = true;
                            assert(!(xnew[s] && !x[s]) && "X grew");
                        }
                        x.swap(xnew);
                        if (!shrunk) break;
                    }
                    for (std::size_t s = 0; s < n_; ++s)
                        if (x[s]) ynew[s] = 1;
                }
            }

            std::size_t grown = 0;
            for (std::size_t s = 0; s < n_; ++s) {
                assert(!(y[s] && !ynew[s]) && "Y shrank");
                if (ynew[s]) ++grown;
                if (rank_out && ynew[s] && (*rank_out)[s] < 0)
                    (*rank_out)[s] = goal[s] ? 0 : level;
            }
            bool stable = grown == y_size;
            y.swap(ynew);
            y_size = grown;
            if (stable) break;
        }
        return y;
    }

    const Game& g_;
    std::size_t n_;
};

} // namespace detail

inline SolveResult solve_gr1(const Game& game) {
    return detail::Gr1Solver(game).solve();
}

} // namespace aware
