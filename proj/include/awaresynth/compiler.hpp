#pragma once

// Translation of ontology relations into the LTL specification set sigma,
// plus the persistence assumptions used by the case study.

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "awaresynth/ltl.hpp"
#include "awaresynth/ontology.hpp"

namespace aware {

enum class StrategyKind { Base, PerceptionTree, Aware };

inline const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Base: return "base";
        case StrategyKind::PerceptionTree: return "ptree";
        case StrategyKind::Aware: return "aware";
    }
    return "?";
}

struct UnknownStrategyKind : std::runtime_error {
    explicit UnknownStrategyKind(const std::string& s)
        : std::runtime_error("unknown strategy kind '" + s + "'") {}
};

inline StrategyKind parse_strategy(const std::string& s) {
    if (s == "base") return StrategyKind::Base;
    if (s == "ptree") return StrategyKind::PerceptionTree;
    if (s == "aware") return StrategyKind::Aware;
    throw UnknownStrategyKind(s);
}

struct MissingTreeOrder : std::runtime_error {
    explicit MissingTreeOrder(const std::string& why)
        : std::runtime_error("perception-tree order unavailable: " + why) {}
};

struct CompiledFormula {
    Formula formula;
    std::string provenance;
};

struct CompiledSpec {
    std::vector<CompiledFormula> sigma;            // system-side safety
    std::vector<CompiledFormula> env_assumptions;  // persistence formulas
    Universe universe;                             // ontology symbols plus aux
    std::vector<std::string> tree_order;           // ptree only, proposition names
};

// ---------------------------------------------------------------------------
// Rule families. Formula order is the ontology declaration order, which keeps
// compiled output reproducible against hand-written expectations.

inline std::vector<CompiledFormula> compile_subclass_rules(const OntologyModel& model) {
    std::vector<CompiledFormula> out;
    for (const auto& r : model.subclass_roles()) {
        Formula f = f_always(f_implies(f_atom(model.prop_of(r.source)),
                                       f_atom(model.prop_of(r.target))));
        out.push_back({f, "subclass " + r.source + " " + r.target});
    }
    return out;
}

inline std::vector<CompiledFormula> compile_classification_rules(const OntologyModel& model) {
    std::vector<CompiledFormula> out;
    for (const auto& obj : model.classified_objects()) {
        auto feats = required_features(model, obj);
        if (feats.empty()) continue;
        std::vector<Formula> atoms;
        for (const auto& p : feats) atoms.push_back(f_atom(p));
        Formula f = f_always(f_implies(f_conj(atoms), f_atom(model.prop_of(obj))));
        out.push_back({f, "features of " + obj});
    }
    return out;
}

// `objects_only` keeps rules whose trigger is a fully classified object
// (an Individual); partial-feature triggers such as concept-level rules
// are dropped. Inheritance is semantic, through the subclass implications.
inline std::vector<CompiledFormula> compile_behavior_rules(const OntologyModel& model,
                                                           bool objects_only = false) {
    std::vector<CompiledFormula> out;
    for (const auto& r : model.behavior_roles()) {
        if (objects_only && model.entity(r.source).kind != EntityKind::Individual) continue;
        Formula f = f_always(f_implies(f_atom(model.prop_of(r.source)),
                                       f_next(f_atom(model.prop_of(r.target)))));
        out.push_back({f, "role " + r.name + " " + r.source + " " + r.target});
    }
    return out;
}

// Raw detectable features of the model: every proposition that appears in
// some object's required-feature set. Classification propositions (the
// objects themselves) are derived and get no assumption.
inline std::vector<Proposition> raw_features(const OntologyModel& model) {
    std::vector<Proposition> out;
    std::set<std::string> seen;
    for (const auto& obj : model.classified_objects())
        for (const auto& p : required_features(model, obj))
            if (seen.insert(p.name).second) out.push_back(p);
    return out;
}

inline std::vector<CompiledFormula> compile_env_assumptions(const std::vector<Proposition>& features) {
    std::vector<CompiledFormula> out;
    for (const auto& p : features) {
        Formula f = f_always(f_implies(f_atom(p), f_next(f_atom(p))));
        out.push_back({f, "persistence " + p.name});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Perception tree
//
// Default refinement order for an object: superclass symbols first, then
// shapes, then colors, then any remaining bound features. For the traffic
// model this derives (sign, octagon, red).

inline std::vector<std::string> default_tree_order(const OntologyModel& model,
                                                   const std::string& object) {
    auto feats = required_features(model, object);
    std::set<std::string> super;
    for (const auto& p : feats) super.insert(p.name);
    for (const auto& r : model.feature_roles_of(object)) super.erase(model.prop_of(r.target).name);

    std::vector<std::string> order;
    for (const auto& p : feats)
        if (super.count(p.name)) order.push_back(p.name);
    auto add_targets_of = [&](const std::string& role_name) {
        for (const auto& r : model.feature_roles_of(object))
            if (r.name == role_name) order.push_back(model.prop_of(r.target).name);
    };
    add_targets_of("hasShape");
    add_targets_of("hasColor");
    for (const auto& r : model.feature_roles_of(object)) {
        std::string n = model.prop_of(r.target).name;
        if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
    }
    return order;
}

// ---------------------------------------------------------------------------
// Strategy assembly

inline CompiledSpec compile(const OntologyModel& model, StrategyKind kind,
                            std::vector<std::string> tree_order = {},
                            bool with_env_assumptions = true) {
    CompiledSpec spec;

    // The environment reveals raw features; recognizing an object is the
    // system's inference, so classification symbols become auxiliary
    // system variables rather than environment inputs.
    std::set<std::string> object_props;
    for (const auto& obj : model.classified_objects())
        object_props.insert(model.prop_of(obj).name);
    for (const auto& p : model.universe().all()) {
        PropKind kind_out = p.kind;
        if (p.kind == PropKind::Input && object_props.count(p.name))
            kind_out = PropKind::Auxiliary;
        spec.universe.declare(p.name, kind_out);
    }

    auto append = [](std::vector<CompiledFormula>& into, std::vector<CompiledFormula> more) {
        for (auto& f : more) into.push_back(std::move(f));
    };

    append(spec.sigma, compile_subclass_rules(model));
    append(spec.sigma, compile_classification_rules(model));

    switch (kind) {
        case StrategyKind::Aware:
            append(spec.sigma, compile_behavior_rules(model, false));
            break;
        case StrategyKind::Base:
            append(spec.sigma, compile_behavior_rules(model, true));
            break;
        case StrategyKind::PerceptionTree: {
            append(spec.sigma, compile_behavior_rules(model, true));

            if (tree_order.empty()) {
                auto objects = model.classified_objects();
                if (objects.size() != 1)
                    throw MissingTreeOrder(objects.empty()
                                           ? "no classified object in the ontology"
                                           : "several objects; pass an explicit order");
                tree_order = default_tree_order(model, objects.front());
            }
            for (const auto& name : tree_order)
                if (!spec.universe.find(name) || spec.universe.find(name)->kind != PropKind::Input)
                    throw MissingTreeOrder("'" + name + "' is not a detectable feature");
            spec.tree_order = tree_order;

            // Refinement levels pt1..ptk as paired implications:
            // pt1 <-> f1, pt_k <-> pt_{k-1} & f_k.
            std::vector<Proposition> levels;
            for (std::size_t k = 0; k < tree_order.size(); ++k) {
                Proposition pt = spec.universe.declare("pt" + std::to_string(k + 1),
                                                       PropKind::Auxiliary);
                Formula feat = f_atom(*spec.universe.find(tree_order[k]));
                Formula def = k == 0 ? feat : f_and(f_atom(levels.back()), feat);
                std::string prov = "tree level " + std::to_string(k + 1);
                spec.sigma.push_back({f_always(f_implies(f_atom(pt), def)), prov});
                spec.sigma.push_back({f_always(f_implies(def, f_atom(pt))), prov});
                levels.push_back(pt);
            }

            // Early reactions: partial-trigger behaviour rules re-keyed on the
            // level that confirms the refinement sequence (level 2, or the
            // deepest level for single-feature trees).
            const std::size_t early = std::min<std::size_t>(2, levels.size());
            if (early > 0) {
                std::set<std::string> emitted;
                for (const auto& r : model.behavior_roles()) {
                    if (model.entity(r.source).kind == EntityKind::Individual) continue;
                    std::string action = model.prop_of(r.target).name;
                    if (!emitted.insert(action).second) continue;
                    Formula f = f_always(f_implies(f_atom(levels[early - 1]),
                                                   f_next(f_atom(*spec.universe.find(action)))));
                    spec.sigma.push_back({f, "early reaction for " + r.source + " via pt" +
                                                 std::to_string(early)});
                }
            }
            break;
        }
    }

    if (with_env_assumptions)
        append(spec.env_assumptions, compile_env_assumptions(raw_features(model)));
    return spec;
}

// Spec-file dump with provenance comments; readable back by read_spec_lines.
inline std::string dump_compiled(const CompiledSpec& spec) {
    std::string out;
    for (const auto& cf : spec.sigma)
        out += "sys: " + to_string(cf.formula) + "    # provenance: " + cf.provenance + "\n";
    for (const auto& cf : spec.env_assumptions)
        out += "env: " + to_string(cf.formula) + "    # provenance: " + cf.provenance + "\n";
    return out;
}

} // namespace aware
