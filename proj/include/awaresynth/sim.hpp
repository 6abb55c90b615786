#pragma once

// Random environment trace generation (profiles #1..#3), closed-loop trial
// execution against a Mealy controller, and verdict aggregation.
//
// A trial is one approach to the sign: the car starts at the horizon cell
// and takes horizon+1 steps, seeing the cumulative feature set of its
// current location before each move. "Stop in n" means the first slowDown
// was emitted with the car n cells from the sign and the car halted at the
// sign; everything else is an infeasible behaviour.
//
// Profiles #2 and #3 reveal the object-level symbol (a sign is present)
// first and the detail features afterwards in random order; that matches
// the refinement reading of partial perception. Profile #3 additionally
// spaces the reveals by random gaps, possibly pushing them past the sign.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "awaresynth/controller.hpp"
#include "awaresynth/rng.hpp"

namespace aware {

enum class ProfileKind { P1_LinearPdf = 1, P2_ConsecutiveRandom = 2, P3_LooseRandom = 3 };

struct TraceProfile {
    ProfileKind kind = ProfileKind::P1_LinearPdf;
    int horizon = 4;
    std::vector<std::string> features = {"sign", "red", "octagon"};  // [0] = object-level symbol

    // Profile #1: per-feature cumulative visibility p(d) = start + (1-start)*(horizon-d)/horizon.
    double p1_start = 0.5;
    std::vector<double> p1_start_per_feature;  // optional per-feature override

    // Profiles #2/#3: location of the first detection, uniform in [d0_min, d0_max];
    // the default upper bound horizon-1 keeps the first detection strictly
    // inside the approach.
    int d0_min = 1;
    int d0_max = -1;  // -1: horizon - 1

    // Profile #3: uniform gaps between consecutive reveals in [0, gap_max],
    // plus a gap in [0, lead_gap_max] ahead of the first detection.
    int gap_max = 2;
    int lead_gap_max = 3;
};

inline const char* profile_name(ProfileKind k) {
    switch (k) {
        case ProfileKind::P1_LinearPdf: return "1";
        case ProfileKind::P2_ConsecutiveRandom: return "2";
        case ProfileKind::P3_LooseRandom: return "3";
    }
    return "?";
}

// Cumulative feature sets per step; bit i of a mask is features[i].
struct EnvTrace {
    int horizon = 4;
    std::vector<std::uint32_t> masks;  // size horizon+1, step t is location horizon-t

    std::uint32_t at_step(std::size_t t) const { return masks.at(t); }
    bool monotone() const {
        for (std::size_t t = 1; t < masks.size(); ++t)
            if ((masks[t - 1] & ~masks[t]) != 0) return false;
        return true;
    }
};

inline EnvTrace gen_trace(const TraceProfile& profile, Rng& rng) {
    const int h = profile.horizon;
    if (h < 1) throw std::invalid_argument("horizon must be >= 1");
    const std::size_t nf = profile.features.size();
    if (nf == 0) throw std::invalid_argument("profile needs at least one feature");

    // reveal_loc[i]: location at which feature i becomes (and stays) visible;
    // below 0 means never within this lap.
    std::vector<int> reveal_loc(nf, -1);

    switch (profile.kind) {
        case ProfileKind::P1_LinearPdf: {
            for (std::size_t i = 0; i < nf; ++i) {
                double start = i < profile.p1_start_per_feature.size()
                                   ? profile.p1_start_per_feature[i]
                                   : profile.p1_start;
                double u = rng.unit();
                int loc = -1;
                for (int d = h; d >= 0; --d) {
                    double p = start + (1.0 - start) * static_cast<double>(h - d) / h;
                    if (u < p) { loc = d; break; }
                }
                reveal_loc[i] = loc;  // p(0) = 1, so loc >= 0 always
            }
            break;
        }
        case ProfileKind::P2_ConsecutiveRandom:
        case ProfileKind::P3_LooseRandom: {
            const int d0_max = profile.d0_max >= 0 ? profile.d0_max : h - 1;
            if (profile.d0_min > d0_max)
                throw std::invalid_argument("empty first-reveal range");
            int loc = rng.between(profile.d0_min, d0_max);

            std::vector<std::size_t> order(nf);
            for (std::size_t i = 0; i < nf; ++i) order[i] = i;
            for (std::size_t i = 1; i + 1 < nf; ++i) {  // shuffle detail features only
                std::size_t j = i + rng.below(static_cast<std::uint32_t>(nf - i));
                std::swap(order[i], order[j]);
            }

            const bool loose = profile.kind == ProfileKind::P3_LooseRandom;
            for (std::size_t k = 0; k < nf; ++k) {
                if (k > 0) loc -= 1;
                if (loose)
                    loc -= k == 0 ? rng.between(0, profile.lead_gap_max)
                                  : rng.between(0, profile.gap_max);
                reveal_loc[order[k]] = loc;
            }
            break;
        }
    }

    EnvTrace trace;
    trace.horizon = h;
    trace.masks.assign(static_cast<std::size_t>(h) + 1, 0);
    for (int t = 0; t <= h; ++t) {
        int d = h - t;
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < nf; ++i)
            if (reveal_loc[i] >= d) m |= 1u << i;
        trace.masks[static_cast<std::size_t>(t)] = m;
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Trials

struct TrialOutcome {
    std::optional<int> stop_in;                 // nullopt: infeasible
    std::optional<int> first_slowdown_location;
    bool halted_at_sign = false;

    bool infeasible() const { return !stop_in.has_value(); }
};

struct TrialStep {
    std::uint32_t valuation;  // controller bit order
    std::string output;
    std::string state_before;
};

struct TraceBinding {
    // feature index in the trace -> controller env bit
    std::vector<std::uint32_t> bit_of_feature;

    static TraceBinding make(const MealyController& ctrl, const std::vector<std::string>& features) {
        TraceBinding b;
        for (const auto& f : features)
            b.bit_of_feature.push_back(ctrl.valuation_of_names({f}));
        return b;
    }

    std::uint32_t remap(std::uint32_t trace_mask) const {
        std::uint32_t v = 0;
        for (std::size_t i = 0; i < bit_of_feature.size(); ++i)
            if (trace_mask >> i & 1) v |= bit_of_feature[i];
        return v;
    }
};

inline TrialOutcome run_trial(const MealyController& controller, const EnvTrace& trace,
                              const TraceBinding& binding,
                              std::vector<TrialStep>* steps_out = nullptr) {
    TrialOutcome outcome;
    const int h = trace.horizon;
    // The car enters the lap seeing the horizon cell's features; each move
    // out of location d is then taken under the valuation revealed there.
    std::size_t node = controller.start(binding.remap(trace.at_step(0)));
    for (int step = 1; step <= h + 1; ++step) {
        const std::size_t trace_idx = std::min<std::size_t>(static_cast<std::size_t>(step),
                                                            static_cast<std::size_t>(h));
        const std::uint32_t v = binding.remap(trace.at_step(trace_idx));
        const MealyController::Step* st = controller.step(node, v);
        if (!st)
            throw ControllerDeadEnd(controller.node_state_name(node) + " at trial step " +
                                    std::to_string(step));
        if (steps_out)
            steps_out->push_back({v, st->output, controller.node_state_name(node)});
        const int location = h - (step - 1);  // source cell of this move
        if (st->output == "slowDown" && !outcome.first_slowdown_location)
            outcome.first_slowdown_location = location;
        if (location == 0 && st->output == "halt") outcome.halted_at_sign = true;
        node = st->next_node;
    }
    if (outcome.halted_at_sign && outcome.first_slowdown_location)
        outcome.stop_in = outcome.first_slowdown_location;
    return outcome;
}

// ---------------------------------------------------------------------------
// Aggregation

struct Histogram {
    std::string profile;
    std::string controller;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    int horizon = 4;
    std::vector<std::size_t> stop_counts;  // index n = StopIn(n), 1..horizon used
    std::size_t infeasible_count = 0;

    double stop_fraction(int n) const {
        return runs ? static_cast<double>(stop_counts.at(static_cast<std::size_t>(n))) / runs : 0.0;
    }
    double infeasible_fraction() const {
        return runs ? static_cast<double>(infeasible_count) / runs : 0.0;
    }
    double fraction_sum() const {
        double s = infeasible_fraction();
        for (int n = 1; n <= horizon; ++n) s += stop_fraction(n);
        return s;
    }
};

inline Histogram run_batch(const MealyController& controller, const TraceProfile& profile,
                           std::size_t runs, std::uint64_t seed,
                           const std::string& controller_label) {
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    Histogram hist;
    hist.profile = profile_name(profile.kind);
    hist.controller = controller_label;
    hist.runs = runs;
    hist.seed = seed;
    hist.horizon = profile.horizon;
    hist.stop_counts.assign(static_cast<std::size_t>(profile.horizon) + 1, 0);

    const TraceBinding binding = TraceBinding::make(controller, profile.features);
    for (std::size_t i = 0; i < runs; ++i) {
        Rng rng = Rng::substream(seed, i);
        EnvTrace trace = gen_trace(profile, rng);
        TrialOutcome out;
        try {
            out = run_trial(controller, trace, binding);
        } catch (const ControllerDeadEnd& e) {
            throw ControllerDeadEnd(std::string(e.what()) + " (trial " + std::to_string(i) + ")");
        }
        if (out.stop_in) ++hist.stop_counts[static_cast<std::size_t>(*out.stop_in)];
        else ++hist.infeasible_count;
    }
    return hist;
}

// ---------------------------------------------------------------------------
// Cross-controller comparison

struct MismatchedProfiles : std::runtime_error {
    MismatchedProfiles() : std::runtime_error("histograms cover different profiles or runs") {}
};

struct ComparisonReport {
    std::string profile;
    std::vector<Histogram> histograms;
    std::vector<std::string> ordering_violations;

    std::string render() const {
        std::ostringstream out;
        out << "profile #" << profile << "\n";
        int h = histograms.empty() ? 4 : histograms.front().horizon;
        out << "controller";
        for (int n = h; n >= 1; --n) out << "  stop_in_" << n;
        out << "  infeasible\n";
        char buf[32];
        for (const auto& hist : histograms) {
            out << hist.controller;
            for (std::size_t pad = hist.controller.size(); pad < 10; ++pad) out << ' ';
            for (int n = h; n >= 1; --n) {
                std::snprintf(buf, sizeof buf, "  %9.4f", hist.stop_fraction(n));
                out << buf;
            }
            std::snprintf(buf, sizeof buf, "  %10.4f", hist.infeasible_fraction());
            out << buf << "\n";
        }
        for (const auto& v : ordering_violations) out << "ordering violation: " << v << "\n";
        return out.str();
    }
};

inline ComparisonReport compare(const std::vector<Histogram>& histograms) {
    ComparisonReport rep;
    if (histograms.empty()) return rep;
    rep.profile = histograms.front().profile;
    for (const auto& h : histograms) {
        if (h.profile != rep.profile || h.runs != histograms.front().runs)
            throw MismatchedProfiles();
        rep.histograms.push_back(h);
    }
    auto find = [&](const std::string& name) -> const Histogram* {
        for (const auto& h : rep.histograms)
            if (h.controller == name) return &h;
        return nullptr;
    };
    const Histogram* base = find("base");
    const Histogram* ptree = find("ptree");
    const Histogram* awarec = find("aware");
    auto check = [&](const Histogram* safer, const Histogram* riskier) {
        if (safer && riskier && safer->infeasible_fraction() > riskier->infeasible_fraction())
            rep.ordering_violations.push_back(safer->controller + " is less safe than " +
                                              riskier->controller);
    };
    check(awarec, ptree);
    check(awarec, base);
    check(ptree, base);
    return rep;
}

} // namespace aware
