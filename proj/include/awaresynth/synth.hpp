#pragma once

// End-to-end synthesis pipeline for the traffic-sign case study: compile an
// ontology into a strategy-specific rule set, assemble the GR(1) game over
// the car FTS, solve it, and extract the Mealy controller.
//
// Liveness wiring: the environment promises to keep revealing full sign
// descriptions (G F over the scenario object's feature conjunction); the
// system promises to keep stopping at the sign and to keep moving
// (G F (loc0 & stopping) and G F moving).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "awaresynth/compiler.hpp"
#include "awaresynth/controller.hpp"
#include "awaresynth/fts.hpp"
#include "awaresynth/game.hpp"
#include "awaresynth/ontology.hpp"
#include "awaresynth/solver.hpp"

namespace aware {

struct SynthesisOptions {
    std::vector<std::string> tree_order;      // ptree refinement order, empty = derive
    std::string scenario_object;              // empty = first classified object
    bool with_env_assumptions = true;
    std::size_t state_cap = default_state_cap();
};

struct SynthesisProduct {
    CompiledSpec compiled;
    std::unique_ptr<Fts> fts;
    Universe universe;                        // compiled symbols + FTS labels/outputs
    Gr1Spec gr1;
    std::vector<std::pair<Side, Formula>> gr1_lines;
    std::unique_ptr<Game> game;
    SolveResult result;
    std::optional<MealyController> controller;  // present iff realizable
    std::string scenario_object;
};

inline std::string pick_scenario_object(const OntologyModel& model, const std::string& requested) {
    auto objects = model.classified_objects();
    if (!requested.empty()) {
        for (const auto& o : objects)
            if (o == requested) return o;
        throw OntologyError("'" + requested + "' is not a classified object of this ontology");
    }
    if (objects.empty())
        throw OntologyError("ontology declares no object with detectable features");
    return objects.front();
}

inline SynthesisProduct synthesize_strategy(const OntologyModel& model, StrategyKind kind,
                                            SynthesisOptions opts = {}) {
    SynthesisProduct prod;
    prod.compiled = compile(model, kind, opts.tree_order, opts.with_env_assumptions);
    prod.fts = std::make_unique<Fts>(build_car_fts());
    prod.scenario_object = pick_scenario_object(model, opts.scenario_object);

    // Full universe: compiled symbols plus FTS labels and outputs.
    for (const auto& p : prod.compiled.universe.all())
        prod.universe.declare(p.name, p.kind);
    for (const auto& l : prod.fts->label_props())
        prod.universe.declare(l, PropKind::Auxiliary);
    for (const auto& o : prod.fts->outputs())
        prod.universe.declare(o, PropKind::Output);

    auto atom = [&](const std::string& name) { return f_atom(*prod.universe.find(name)); };

    std::vector<std::pair<Side, Formula>>& lines = prod.gr1_lines;

    // The initial valuation is unconstrained: a lap may already start with
    // features in view, and the controller keeps one root per case.
    for (const auto& cf : prod.compiled.env_assumptions) lines.push_back({Side::Env, cf.formula});

    std::vector<Formula> scenario_atoms;
    for (const auto& p : required_features(model, prod.scenario_object))
        scenario_atoms.push_back(atom(p.name));
    lines.push_back({Side::Env, f_always(f_eventually(f_conj(scenario_atoms)))});

    for (const auto& cf : prod.compiled.sigma) lines.push_back({Side::Sys, cf.formula});

    lines.push_back({Side::Sys, f_always(f_eventually(f_and(atom("loc0"), atom("stopping"))))});
    lines.push_back({Side::Sys, f_always(f_eventually(atom("moving")))});

    prod.gr1 = partition_gr1(lines, prod.universe);

    GameOptions gopts;
    gopts.state_cap = opts.state_cap;
    for (const auto& obj : model.classified_objects())
        gopts.obligation_props.push_back(model.prop_of(obj).name);

    prod.game = std::make_unique<Game>(*prod.fts, prod.gr1, gopts);
    prod.result = solve_gr1(*prod.game);
    if (prod.result.realizable)
        prod.controller = extract_controller(*prod.game, prod.result);
    return prod;
}

} // namespace aware
