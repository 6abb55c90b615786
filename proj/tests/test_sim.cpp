#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "awaresynth/sim.hpp"
#include "awaresynth/synth.hpp"

using namespace aware;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const SynthesisProduct& product(StrategyKind kind) {
    static std::map<int, SynthesisProduct> cache;
    auto it = cache.find(static_cast<int>(kind));
    if (it == cache.end()) {
        OntologyModel m =
            load_ontology(read_file(std::string(AWARESYNTH_DATA_DIR) + "/traffic.onto"));
        it = cache.emplace(static_cast<int>(kind), synthesize_strategy(m, kind)).first;
    }
    return it->second;
}

TraceProfile profile(ProfileKind kind) {
    TraceProfile p;
    p.kind = kind;
    return p;
}

EnvTrace trace_from_reveals(int horizon, std::vector<int> reveal_locs) {
    EnvTrace t;
    t.horizon = horizon;
    t.masks.assign(static_cast<std::size_t>(horizon) + 1, 0);
    for (int step = 0; step <= horizon; ++step) {
        int d = horizon - step;
        for (std::size_t i = 0; i < reveal_locs.size(); ++i)
            if (reveal_locs[i] >= d) t.masks[static_cast<std::size_t>(step)] |= 1u << i;
    }
    return t;
}

int verdict_order(const TrialOutcome& o) { return o.stop_in ? *o.stop_in : -1; }

} // namespace

TEST_CASE("profile #2 mechanics match the consecutive-reveal rule") {
    TraceProfile p = profile(ProfileKind::P2_ConsecutiveRandom);
    p.d0_max = 4;  // allow a first detection at the horizon cell for this check
    bool seen_example = false;
    for (std::uint64_t s = 0; s < 400 && !seen_example; ++s) {
        Rng rng = Rng::substream(99, s);
        EnvTrace t = gen_trace(p, rng);
        // Looking for d0 = 4 with detail order octagon-then-red.
        if (t.masks[0] == 0b001u && t.masks[1] == 0b101u && t.masks[2] == 0b111u) {
            CHECK(t.masks[3] == 0b111u);
            CHECK(t.masks[4] == 0b111u);
            seen_example = true;
        }
    }
    CHECK(seen_example);

    // The object-level feature always leads, details follow one per cell.
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng = Rng::substream(7, s);
        EnvTrace t = gen_trace(p, rng);
        for (std::size_t step = 1; step < t.masks.size(); ++step) {
            std::uint32_t fresh = t.masks[step] & ~t.masks[step - 1];
            // at most one new detail per location once the sign is visible
            if (t.masks[step - 1] != 0) {
                int count = 0;
                for (int b = 0; b < 3; ++b) count += (fresh >> b) & 1;
                CHECK(count <= 1);
            }
            if (t.masks[step] != 0) CHECK((t.masks[step] & 1u) != 0);  // sign first
        }
    }
}

TEST_CASE("traces are monotone under every profile") {
    for (ProfileKind kind : {ProfileKind::P1_LinearPdf, ProfileKind::P2_ConsecutiveRandom,
                             ProfileKind::P3_LooseRandom}) {
        TraceProfile p = profile(kind);
        for (std::uint64_t s = 0; s < 500; ++s) {
            Rng rng = Rng::substream(123, s);
            CHECK(gen_trace(p, rng).monotone());
        }
    }
}

TEST_CASE("profile #1 visibility follows the linear pdf within half a percent") {
    TraceProfile p = profile(ProfileKind::P1_LinearPdf);
    const int samples = 1'000'000;
    std::vector<int> visible_by(5, 0);  // index d
    for (int i = 0; i < samples; ++i) {
        Rng rng = Rng::substream(2024, static_cast<std::uint64_t>(i));
        EnvTrace t = gen_trace(p, rng);
        for (int d = 0; d <= 4; ++d)
            if (t.masks[static_cast<std::size_t>(4 - d)] & 1u) ++visible_by[d];
    }
    for (int d = 0; d <= 4; ++d) {
        double expected = 0.5 + 0.5 * (4 - d) / 4.0;
        double got = static_cast<double>(visible_by[d]) / samples;
        CHECK(std::abs(got - expected) < 0.005);
    }
}

TEST_CASE("trial verdicts on hand-built traces") {
    const auto& aware = product(StrategyKind::Aware);
    const auto& base = product(StrategyKind::Base);
    const auto& ptree = product(StrategyKind::PerceptionTree);
    TraceProfile p = profile(ProfileKind::P2_ConsecutiveRandom);
    TraceBinding ab = TraceBinding::make(*aware.controller, p.features);
    TraceBinding bb = TraceBinding::make(*base.controller, p.features);
    TraceBinding pb = TraceBinding::make(*ptree.controller, p.features);

    // Everything visible from the horizon: the smoothest stop for all three.
    EnvTrace all = trace_from_reveals(4, {4, 4, 4});
    CHECK(run_trial(*aware.controller, all, ab).stop_in == 4);
    CHECK(run_trial(*base.controller, all, bb).stop_in == 4);
    CHECK(run_trial(*ptree.controller, all, pb).stop_in == 4);

    // Sign at 3, octagon at 2, red at 1: the aware car reacts at the sign.
    EnvTrace d3 = trace_from_reveals(4, {3, 1, 2});
    CHECK(run_trial(*aware.controller, d3, ab).stop_in == 3);
    // Base classifies only at the full set (location 1) and stops last-moment.
    TrialOutcome b3 = run_trial(*base.controller, d3, bb);
    CHECK(b3.stop_in == 1);
    CHECK(b3.halted_at_sign);

    // Full description completes only at the sign cell: nobody can stop.
    EnvTrace late = trace_from_reveals(4, {2, 0, 1});
    CHECK(run_trial(*base.controller, late, bb).infeasible());
    TrialOutcome a_late = run_trial(*aware.controller, late, ab);
    CHECK(a_late.stop_in == 2);  // partial evidence was enough to react

    // Sign revealed first at the first step counts as detection at the
    // horizon: the M4 -> S3 edge is the stop-in-4 manoeuvre.
    EnvTrace first_step = trace_from_reveals(4, {4, 2, 3});
    CHECK(run_trial(*aware.controller, first_step, ab).stop_in == 4);

    // Nothing ever shows up: the lap just passes through.
    EnvTrace dark = trace_from_reveals(4, {-1, -1, -1});
    TrialOutcome none = run_trial(*base.controller, dark, bb);
    CHECK(none.infeasible());
    CHECK(!none.first_slowdown_location.has_value());
}

TEST_CASE("batches are deterministic and total") {
    const auto& aware = product(StrategyKind::Aware);
    TraceProfile p = profile(ProfileKind::P2_ConsecutiveRandom);
    Histogram a = run_batch(*aware.controller, p, 5000, 42, "aware");
    Histogram b = run_batch(*aware.controller, p, 5000, 42, "aware");
    CHECK(a.stop_counts == b.stop_counts);
    CHECK(a.infeasible_count == b.infeasible_count);

    std::size_t total = a.infeasible_count;
    for (auto c : a.stop_counts) total += c;
    CHECK(total == a.runs);
    CHECK(std::abs(a.fraction_sum() - 1.0) < 1e-12);
}

TEST_CASE("aware dominates base on shared traces") {
    const auto& aware = product(StrategyKind::Aware);
    const auto& base = product(StrategyKind::Base);
    for (ProfileKind kind : {ProfileKind::P1_LinearPdf, ProfileKind::P2_ConsecutiveRandom,
                             ProfileKind::P3_LooseRandom}) {
        TraceProfile p = profile(kind);
        TraceBinding ab = TraceBinding::make(*aware.controller, p.features);
        TraceBinding bb = TraceBinding::make(*base.controller, p.features);
        for (std::uint64_t i = 0; i < 10'000; ++i) {
            Rng rng = Rng::substream(42, i);
            EnvTrace t = gen_trace(p, rng);
            TrialOutcome oa = run_trial(*aware.controller, t, ab);
            TrialOutcome ob = run_trial(*base.controller, t, bb);
            CHECK(verdict_order(oa) >= verdict_order(ob));
        }
    }
}

TEST_CASE("every stop verdict replays through the safety checker") {
    const auto& aware = product(StrategyKind::Aware);
    const Game& game = *aware.game;
    TraceProfile p = profile(ProfileKind::P3_LooseRandom);
    TraceBinding binding = TraceBinding::make(*aware.controller, p.features);

    for (std::uint64_t i = 0; i < 300; ++i) {
        Rng rng = Rng::substream(5, i);
        EnvTrace t = gen_trace(p, rng);
        std::vector<TrialStep> steps;
        run_trial(*aware.controller, t, binding, &steps);

        // Replay: controller nodes carry game states; every taken edge must
        // be legal under the compiled safety rules.
        std::size_t node = aware.controller->start(binding.remap(t.at_step(0)));
        for (const auto& s : steps) {
            std::size_t sid = aware.controller->nodes()[node].sid;
            const auto* st = aware.controller->step(node, s.valuation);
            REQUIRE(st);
            std::size_t edge = static_cast<std::size_t>(-1);
            for (std::size_t e : game.fts().out_edge_ids(game.q_of(sid))) {
                const FtsEdge& fe = game.fts().edges()[e];
                if (fe.output == st->output && game.fts().state_name(fe.to) == st->next_state)
                    edge = e;
            }
            REQUIRE(edge != static_cast<std::size_t>(-1));
            CHECK(game.step_allows(sid, s.valuation, edge));
            node = st->next_node;
        }
    }
}

TEST_CASE("comparison report flags orderings and rejects mixed profiles") {
    const auto& aware = product(StrategyKind::Aware);
    const auto& base = product(StrategyKind::Base);
    TraceProfile p2 = profile(ProfileKind::P2_ConsecutiveRandom);
    TraceProfile p3 = profile(ProfileKind::P3_LooseRandom);

    Histogram ha = run_batch(*aware.controller, p2, 2000, 1, "aware");
    Histogram hb = run_batch(*base.controller, p2, 2000, 1, "base");
    ComparisonReport rep = compare({hb, ha});
    CHECK(rep.ordering_violations.empty());
    CHECK(rep.render().find("base") != std::string::npos);

    ComparisonReport single = compare({ha});
    CHECK(single.ordering_violations.empty());

    Histogram h3 = run_batch(*aware.controller, p3, 2000, 1, "aware");
    CHECK_THROWS_AS(compare({hb, h3}), MismatchedProfiles);

    // A fabricated inversion is flagged.
    Histogram fake_base = hb;
    fake_base.infeasible_count = 0;
    Histogram fake_aware = ha;
    fake_aware.infeasible_count = fake_aware.runs;
    fake_aware.stop_counts.assign(fake_aware.stop_counts.size(), 0);
    ComparisonReport flagged = compare({fake_base, fake_aware});
    CHECK(!flagged.ordering_violations.empty());
}

TEST_CASE("full-scale fractions: report the measured grid") {
    // Not an assertion pass: prints the strategy x profile grid at 10k runs
    // so calibration drift is visible in the test log.
    for (ProfileKind kind : {ProfileKind::P1_LinearPdf, ProfileKind::P2_ConsecutiveRandom,
                             ProfileKind::P3_LooseRandom}) {
        TraceProfile p = profile(kind);
        std::vector<Histogram> hs;
        for (StrategyKind s :
             {StrategyKind::Base, StrategyKind::PerceptionTree, StrategyKind::Aware})
            hs.push_back(run_batch(*product(s).controller, p, 10'000, 42, strategy_name(s)));
        MESSAGE(compare(hs).render());
    }

    // Calibrated profile #1: the object-level symbol resolves late (start
    // visibility 0), sharpening the smoothness contrast at three cells.
    TraceProfile cal = profile(ProfileKind::P1_LinearPdf);
    cal.p1_start_per_feature = {0.0, 0.5, 0.5};
    std::vector<Histogram> hs;
    for (StrategyKind s :
         {StrategyKind::Base, StrategyKind::PerceptionTree, StrategyKind::Aware})
        hs.push_back(run_batch(*product(s).controller, cal, 10'000, 42, strategy_name(s)));
    MESSAGE("calibrated ", compare(hs).render());
    CHECK(true);
}
