#pragma once

// GR(1) game construction over FTS x environment valuations.
//
// Game states pair an FTS state with an environment valuation bitmask.
// Auxiliary propositions (classification symbols, perception-tree levels)
// are not free system choices: they are resolved to the minimal model of
// the Boolean safety constraints before the system moves, which keeps the
// game bipartite and recognition non-spurious.
//
// A safety rule of shape A -> X y, with y an edge output, binds exactly in
// the states that own an outgoing y-edge; where the plant cannot execute
// the prescribed action the rule is vacuous for that step. Infeasible
// prescriptions are a simulation verdict, not a blocked transition.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "awaresynth/fts.hpp"
#include "awaresynth/ltl.hpp"

namespace aware {

struct UniverseMismatch : std::runtime_error {
    explicit UniverseMismatch(const std::string& msg)
        : std::runtime_error("universe mismatch: " + msg) {}
};

struct StateSpaceTooLarge : std::runtime_error {
    StateSpaceTooLarge(std::size_t need, std::size_t cap)
        : std::runtime_error("state space " + std::to_string(need) +
                             " exceeds cap " + std::to_string(cap)) {}
};

inline std::size_t default_state_cap() {
    if (const char* env = std::getenv("AWARESYNTH_STATE_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::size_t{1} << 20;
}

struct GameOptions {
    std::size_t state_cap = default_state_cap();
    // Propositions whose truth marks a pending stop prescription; they flip
    // the output preference toward halt during strategy extraction.
    std::vector<std::string> obligation_props;
};

class Game {
public:
    Game(const Fts& fts, Gr1Spec spec, GameOptions opts = {})
        : fts_(&fts), spec_(std::move(spec)), opts_(std::move(opts)) {
        index_propositions();
        compile_formulas();
        check_cap();
        resolve_aux();
        precompute_moves();
        precompute_candidates();
    }

    const Fts& fts() const { return *fts_; }
    const Gr1Spec& spec() const { return spec_; }

    const std::vector<Proposition>& env_bits() const { return env_bits_; }
    const std::vector<Proposition>& aux_bits() const { return aux_bits_; }

    std::uint32_t valuation_count() const { return nv_; }
    std::size_t state_count() const { return fts_->state_count() * nv_; }
    std::size_t sid(std::size_t q, std::uint32_t v) const { return q * nv_ + v; }
    std::size_t q_of(std::size_t sid) const { return sid / nv_; }
    std::uint32_t v_of(std::size_t sid) const { return static_cast<std::uint32_t>(sid % nv_); }

    std::uint32_t aux_of(std::uint32_t v) const { return aux_of_[v]; }
    bool state_valid(std::size_t sid) const { return valid_[sid]; }

    const std::vector<std::uint32_t>& env_moves(std::size_t sid) const { return env_moves_[sid]; }

    // Edge ids legal from `sid` once the environment played `v_next`.
    const std::vector<std::size_t>& legal_edges(std::size_t sid, std::uint32_t v_next) const {
        return candidates_[sid * nv_ + v_next];
    }
    bool step_allows(std::size_t sid, std::uint32_t v_next, std::size_t edge) const {
        const auto& c = legal_edges(sid, v_next);
        return std::find(c.begin(), c.end(), edge) != c.end();
    }
    // Name of the first safety rule excluding `edge` from `sid` under `v_next`,
    // for diagnostics; empty when the step is legal.
    std::string violated_rule(std::size_t sid, std::uint32_t v_next, std::size_t edge) const;

    std::size_t sys_goal_count() const { return spec_.sys_liveness.size(); }
    std::size_t env_goal_count() const { return spec_.env_liveness.size(); }
    bool sys_goal(std::size_t g, std::size_t sid) const { return eval_cur(sys_goals_[g], sid); }
    bool env_goal(std::size_t g, std::size_t sid) const { return eval_cur(env_goals_[g], sid); }
    bool all_env_goals(std::size_t sid) const {
        for (const auto& g : env_goals_)
            if (!eval_cur(g, sid)) return false;
        return true;
    }

    bool obligation_active(std::size_t sid) const {
        for (const auto& f : step_rule_triggers_)
            if (eval_cur(f, sid)) return true;
        for (std::uint32_t bit : obligation_bits_)
            if (cur_bit(sid, bit)) return true;
        return false;
    }

    std::vector<std::size_t> init_sids() const {
        std::vector<std::size_t> out;
        for (std::size_t q : fts_->init_states())
            for (std::uint32_t v = 0; v < nv_; ++v) {
                std::size_t s = sid(q, v);
                if (!valid_[s]) continue;
                if (!eval_cur(env_init_, s)) continue;
                if (!eval_cur(sys_init_, s)) continue;
                out.push_back(s);
            }
        return out;
    }

    std::string describe(std::size_t sid) const {
        std::string out = fts_->state_name(q_of(sid)) + " {";
        bool first = true;
        std::uint32_t v = v_of(sid);
        for (std::size_t i = 0; i < env_bits_.size(); ++i)
            if (v >> i & 1) {
                if (!first) out += ',';
                out += env_bits_[i].name;
                first = false;
            }
        out += '}';
        return out;
    }

    std::string valuation_bits(std::uint32_t v) const {
        std::string out(env_bits_.size(), '0');
        for (std::size_t i = 0; i < env_bits_.size(); ++i)
            if (v >> i & 1) out[i] = '1';
        return out;
    }
    std::uint32_t valuation_from_bits(const std::string& bits) const {
        if (bits.size() != env_bits_.size())
            throw std::invalid_argument("valuation width mismatch");
        std::uint32_t v = 0;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] == '1') v |= 1u << i;
        return v;
    }
    std::uint32_t valuation_of_names(const std::set<std::string>& names) const {
        std::uint32_t v = 0;
        for (const auto& n : names) {
            bool found = false;
            for (std::size_t i = 0; i < env_bits_.size(); ++i)
                if (env_bits_[i].name == n) { v |= 1u << i; found = true; break; }
            if (!found) throw UniverseMismatch("'" + n + "' is not an environment feature");
        }
        return v;
    }

private:
    // Atom resolution targets.
    enum class Slot { EnvBit, AuxBit, Label, Output };
    struct AtomRef { Slot slot; std::size_t index; };

    void index_propositions() {
        for (const auto& p : spec_.env_vars) env_bits_.push_back(p);
        if (env_bits_.size() > 20)
            throw StateSpaceTooLarge(std::size_t{1} << env_bits_.size(), opts_.state_cap);
        nv_ = 1u << env_bits_.size();

        std::set<std::string> labels = fts_->label_props();
        std::set<std::string> outputs = fts_->outputs();
        for (const auto& p : spec_.sys_vars) {
            if (p.kind == PropKind::Output) {
                if (!outputs.count(p.name))
                    throw UniverseMismatch("output '" + p.name + "' is not produced by the FTS");
                continue;
            }
            if (labels.count(p.name)) continue;  // FTS state label
            aux_bits_.push_back(p);              // derived auxiliary
        }
        if (aux_bits_.size() > 20)
            throw StateSpaceTooLarge(std::size_t{1} << aux_bits_.size(), opts_.state_cap);

        for (std::size_t i = 0; i < env_bits_.size(); ++i)
            atoms_[env_bits_[i].name] = {Slot::EnvBit, i};
        for (std::size_t i = 0; i < aux_bits_.size(); ++i)
            atoms_[aux_bits_[i].name] = {Slot::AuxBit, i};
        for (const auto& l : labels)
            if (!atoms_.count(l)) atoms_[l] = {Slot::Label, 0};
        for (const auto& o : outputs)
            if (!atoms_.count(o)) atoms_[o] = {Slot::Output, 0};

        for (const auto& n : opts_.obligation_props) {
            auto it = atoms_.find(n);
            if (it == atoms_.end())
                throw UniverseMismatch("obligation proposition '" + n + "' is undeclared");
            if (it->second.slot == Slot::EnvBit) obligation_bits_.push_back(it->second.index);
            else if (it->second.slot == Slot::AuxBit)
                obligation_bits_.push_back(1000 + it->second.index);  // tagged aux, see cur_bit
            else throw UniverseMismatch("obligation proposition '" + n + "' must be env or aux");
        }
    }

    void compile_formulas() {
        for (const auto& f : spec_.sys_safety) {
            validate_atoms(f, /*env_only_under_next=*/false);
            if (f.is_boolean()) sys_invariants_.push_back(f);
            else {
                sys_steps_.push_back(f);
                if (f.op() == Op::Implies && f.lhs().is_boolean())
                    step_rule_triggers_.push_back(f.lhs());
            }
        }
        for (const auto& f : spec_.env_safety) {
            validate_atoms(f, /*env_only_under_next=*/true);
            if (f.is_boolean()) env_invariants_.push_back(f);
            else env_steps_.push_back(f);
        }
        for (const auto& f : spec_.sys_liveness) { validate_atoms(f, false); sys_goals_.push_back(f); }
        for (const auto& f : spec_.env_liveness) { validate_atoms(f, false); env_goals_.push_back(f); }
        validate_atoms(spec_.env_init, false);
        validate_atoms(spec_.sys_init, false);
        env_init_ = spec_.env_init;
        sys_init_ = spec_.sys_init;

        // Auxiliary definitions: invariant implications with a single aux
        // atom as consequent set that bit in the minimal-model closure.
        for (const auto& f : sys_invariants_) {
            if (f.op() != Op::Implies) continue;
            const Formula& rhs = f.rhs();
            if (rhs.op() != Op::Atom) continue;
            auto it = atoms_.find(rhs.prop().name);
            if (it == atoms_.end() || it->second.slot != Slot::AuxBit) continue;
            if (mentions_labels(f.lhs()))
                throw UniverseMismatch("auxiliary '" + rhs.prop().name +
                                       "' may not depend on FTS labels");
            aux_setters_.push_back({f.lhs(), it->second.index});
            defined_aux_.insert(it->second.index);
        }
        for (std::size_t i = 0; i < aux_bits_.size(); ++i)
            if (!defined_aux_.count(i))
                throw UniverseMismatch("auxiliary '" + aux_bits_[i].name +
                                       "' has no defining constraint");
    }

    bool mentions_labels(const Formula& f) const {
        std::set<std::string> names;
        f.collect_atoms(names);
        for (const auto& n : names) {
            auto it = atoms_.find(n);
            if (it != atoms_.end() && (it->second.slot == Slot::Label || it->second.slot == Slot::Output))
                return true;
        }
        return false;
    }

    void validate_atoms(const Formula& f, bool env_only_under_next, bool under_next = false) const {
        switch (f.op()) {
            case Op::True: case Op::False: return;
            case Op::Atom: {
                auto it = atoms_.find(f.prop().name);
                if (it == atoms_.end())
                    throw UniverseMismatch("proposition '" + f.prop().name +
                                           "' is neither declared nor an FTS symbol");
                if (it->second.slot == Slot::Output && !under_next)
                    throw UniverseMismatch("output '" + f.prop().name +
                                           "' may appear only under X");
                if (under_next && env_only_under_next && it->second.slot != Slot::EnvBit)
                    throw UniverseMismatch("environment assumption constrains '" +
                                           f.prop().name + "' under X");
                return;
            }
            case Op::Next:
                validate_atoms(f.lhs(), env_only_under_next, true);
                return;
            default:
                validate_atoms(f.lhs(), env_only_under_next, under_next);
                if (is_binary(f.op()))
                    validate_atoms(f.rhs(), env_only_under_next, under_next);
        }
    }

    void check_cap() const {
        // Conservative bound: auxiliaries counted as free bits.
        std::size_t need = fts_->state_count();
        for (std::size_t i = 0; i < env_bits_.size() + aux_bits_.size(); ++i) {
            need *= 2;
            if (need > opts_.state_cap) throw StateSpaceTooLarge(need, opts_.state_cap);
        }
    }

    void resolve_aux() {
        aux_of_.assign(nv_, 0);
        for (std::uint32_t v = 0; v < nv_; ++v) {
            std::uint32_t aux = 0;
            bool changed = true;
            while (changed) {
                changed = false;
                for (const auto& [ante, bit] : aux_setters_) {
                    if (aux >> bit & 1) continue;
                    if (eval_parts(ante, v, aux, 0)) { aux |= 1u << bit; changed = true; }
                }
            }
            aux_of_[v] = aux;
        }
        valid_.assign(state_count(), false);
        for (std::size_t q = 0; q < fts_->state_count(); ++q)
            for (std::uint32_t v = 0; v < nv_; ++v) {
                bool ok = true;
                for (const auto& f : sys_invariants_)
                    if (!eval_parts(f, v, aux_of_[v], q)) { ok = false; break; }
                if (ok)
                    for (const auto& f : env_invariants_)
                        if (!eval_parts(f, v, aux_of_[v], q)) { ok = false; break; }
                valid_[sid(q, v)] = ok;
            }
    }

    void precompute_moves() {
        env_moves_.assign(state_count(), {});
        for (std::size_t q = 0; q < fts_->state_count(); ++q)
            for (std::uint32_t v = 0; v < nv_; ++v) {
                auto& moves = env_moves_[sid(q, v)];
                for (std::uint32_t vn = 0; vn < nv_; ++vn) {
                    bool ok = true;
                    for (const auto& f : env_steps_)
                        if (!eval_step(f, q, v, aux_of_[v], 0, vn, aux_of_[vn], -1)) { ok = false; break; }
                    if (ok) moves.push_back(vn);
                }
            }
    }

    void precompute_candidates() {
        // Output name -> small id for step evaluation.
        for (const auto& e : fts_->edges()) {
            if (!output_ids_.count(e.output)) {
                output_ids_[e.output] = output_names_.size();
                output_names_.push_back(e.output);
            }
        }
        candidates_.assign(state_count() * nv_, {});
        for (std::size_t q = 0; q < fts_->state_count(); ++q) {
            const auto& out_edges = fts_->out_edge_ids(q);
            for (std::uint32_t v = 0; v < nv_; ++v)
                for (std::uint32_t vn = 0; vn < nv_; ++vn) {
                    std::vector<std::size_t> cand(out_edges.begin(), out_edges.end());
                    for (const auto& f : sys_steps_) {
                        std::vector<std::size_t> keep;
                        for (std::size_t e : cand)
                            if (step_ok(f, q, v, vn, e)) keep.push_back(e);
                        if (!keep.empty()) cand.swap(keep);
                        // Unmeetable prescriptions leave the step unconstrained.
                    }
                    candidates_[sid(q, v) * nv_ + vn] = std::move(cand);
                }
        }
    }

    bool step_ok(const Formula& f, std::size_t q, std::uint32_t v, std::uint32_t vn,
                 std::size_t edge) const {
        const FtsEdge& e = fts_->edges()[edge];
        return eval_step(f, q, v, aux_of_[v], e.to, vn, aux_of_[vn],
                         static_cast<int>(output_ids_.at(e.output)));
    }

    // --- formula evaluation -------------------------------------------------

    bool cur_bit(std::size_t sid_, std::uint32_t tagged) const {
        std::uint32_t v = v_of(sid_);
        if (tagged >= 1000) return aux_of_[v] >> (tagged - 1000) & 1;
        return v >> tagged & 1;
    }

    bool eval_cur(const Formula& f, std::size_t sid_) const {
        return eval_parts(f, v_of(sid_), aux_of_[v_of(sid_)], q_of(sid_));
    }

    bool eval_parts(const Formula& f, std::uint32_t env, std::uint32_t aux, std::size_t q) const {
        switch (f.op()) {
            case Op::True: return true;
            case Op::False: return false;
            case Op::Atom: {
                const AtomRef& a = atoms_.at(f.prop().name);
                switch (a.slot) {
                    case Slot::EnvBit: return env >> a.index & 1;
                    case Slot::AuxBit: return aux >> a.index & 1;
                    case Slot::Label: return fts_->has_label(q, f.prop().name);
                    case Slot::Output: throw std::logic_error("output atom outside X");
                }
                return false;
            }
            case Op::Not: return !eval_parts(f.lhs(), env, aux, q);
            case Op::And: return eval_parts(f.lhs(), env, aux, q) && eval_parts(f.rhs(), env, aux, q);
            case Op::Or: return eval_parts(f.lhs(), env, aux, q) || eval_parts(f.rhs(), env, aux, q);
            case Op::Implies: return !eval_parts(f.lhs(), env, aux, q) || eval_parts(f.rhs(), env, aux, q);
            default: throw std::logic_error("temporal operator in a state predicate");
        }
    }

    bool eval_next_part(const Formula& f, std::size_t qn, std::uint32_t vn, std::uint32_t auxn,
                        int out_id) const {
        switch (f.op()) {
            case Op::True: return true;
            case Op::False: return false;
            case Op::Atom: {
                const AtomRef& a = atoms_.at(f.prop().name);
                switch (a.slot) {
                    case Slot::EnvBit: return vn >> a.index & 1;
                    case Slot::AuxBit: return auxn >> a.index & 1;
                    case Slot::Label: return fts_->has_label(qn, f.prop().name);
                    case Slot::Output:
                        return out_id >= 0 && output_names_[out_id] == f.prop().name;
                }
                return false;
            }
            case Op::Not: return !eval_next_part(f.lhs(), qn, vn, auxn, out_id);
            case Op::And: return eval_next_part(f.lhs(), qn, vn, auxn, out_id) &&
                                 eval_next_part(f.rhs(), qn, vn, auxn, out_id);
            case Op::Or: return eval_next_part(f.lhs(), qn, vn, auxn, out_id) ||
                                eval_next_part(f.rhs(), qn, vn, auxn, out_id);
            case Op::Implies: return !eval_next_part(f.lhs(), qn, vn, auxn, out_id) ||
                                     eval_next_part(f.rhs(), qn, vn, auxn, out_id);
            default: throw std::logic_error("temporal operator under X");
        }
    }

    bool eval_step(const Formula& f, std::size_t q, std::uint32_t v, std::uint32_t aux,
                   std::size_t qn, std::uint32_t vn, std::uint32_t auxn, int out_id) const {
        switch (f.op()) {
            case Op::True: return true;
            case Op::False: return false;
            case Op::Atom: return eval_parts(f, v, aux, q);
            case Op::Next: return eval_next_part(f.lhs(), qn, vn, auxn, out_id);
            case Op::Not: return !eval_step(f.lhs(), q, v, aux, qn, vn, auxn, out_id);
            case Op::And: return eval_step(f.lhs(), q, v, aux, qn, vn, auxn, out_id) &&
                                 eval_step(f.rhs(), q, v, aux, qn, vn, auxn, out_id);
            case Op::Or: return eval_step(f.lhs(), q, v, aux, qn, vn, auxn, out_id) ||
                                eval_step(f.rhs(), q, v, aux, qn, vn, auxn, out_id);
            case Op::Implies: return !eval_step(f.lhs(), q, v, aux, qn, vn, auxn, out_id) ||
                                     eval_step(f.rhs(), q, v, aux, qn, vn, auxn, out_id);
            default: throw std::logic_error("U/F/G inside a safety body");
        }
    }

    const Fts* fts_;
    Gr1Spec spec_;
    GameOptions opts_;

    std::vector<Proposition> env_bits_, aux_bits_;
    std::map<std::string, AtomRef> atoms_;
    std::uint32_t nv_ = 1;

    std::vector<Formula> sys_invariants_, sys_steps_, env_invariants_, env_steps_;
    std::vector<Formula> sys_goals_, env_goals_;
    std::vector<Formula> step_rule_triggers_;
    Formula env_init_ = f_true(), sys_init_ = f_true();
    std::vector<std::pair<Formula, std::size_t>> aux_setters_;
    std::set<std::size_t> defined_aux_;
    std::vector<std::uint32_t> obligation_bits_;

    std::vector<std::uint32_t> aux_of_;
    std::vector<char> valid_;
    std::vector<std::vector<std::uint32_t>> env_moves_;
    std::vector<std::vector<std::size_t>> candidates_;
    std::map<std::string, std::size_t> output_ids_;
    std::vector<std::string> output_names_;

public:
    // Exposed for the verifier: evaluate one sys safety step formula.
    bool check_step_formula(const Formula& f, std::size_t sid_, std::uint32_t vn,
                            std::size_t edge) const {
        return step_ok(f, q_of(sid_), v_of(sid_), vn, edge);
    }
    const std::vector<Formula>& sys_step_formulas() const { return sys_steps_; }
    const std::vector<Formula>& sys_invariant_formulas() const { return sys_invariants_; }
};

inline std::string Game::violated_rule(std::size_t sid_, std::uint32_t v_next,
                                       std::size_t edge) const {
    std::size_t q = q_of(sid_);
    std::uint32_t v = v_of(sid_);
    const auto& out_edges = fts_->out_edge_ids(q);
    std::vector<std::size_t> cand(out_edges.begin(), out_edges.end());
    for (const auto& f : sys_steps_) {
        std::vector<std::size_t> keep;
        for (std::size_t e : cand)
            if (step_ok(f, q, v, v_next, e)) keep.push_back(e);
        if (keep.empty()) continue;
        if (std::find(keep.begin(), keep.end(), edge) == keep.end())
            return "G (" + to_string(f) + ")";
        cand.swap(keep);
    }
    return {};
}

} // namespace aware
