#pragma once

// Description-logic knowledge base: ontology data model, the textual loader,
// subclass closure, and the classification decision procedure.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "awaresynth/ltl.hpp"

namespace aware {

enum class EntityKind { Concept, Individual };

struct Entity {
    std::string name;
    EntityKind kind = EntityKind::Individual;
    bool is_action = false;   // output-side behaviour symbol
};

struct Role {
    std::string name;    // hasColor, hasShape, hasAction, isSubClass, ...
    std::string source;
    std::string target;
};

struct OntologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OntologyParseError : OntologyError {
    std::size_t line;
    OntologyParseError(std::size_t ln, const std::string& msg)
        : OntologyError("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};
struct UndefinedEntity : OntologyError {
    std::string name;
    UndefinedEntity(std::size_t ln, std::string n)
        : OntologyError("line " + std::to_string(ln) + ": undefined entity '" + n + "'"),
          name(std::move(n)) {}
};
struct SubclassCycle : OntologyError {
    explicit SubclassCycle(const std::string& at)
        : OntologyError("subclass cycle through '" + at + "'") {}
};
struct DuplicateName : OntologyError {
    explicit DuplicateName(std::size_t ln, const std::string& n)
        : OntologyError("line " + std::to_string(ln) + ": duplicate name '" + n + "'") {}
};
struct NotAnInputEntity : OntologyError {
    explicit NotAnInputEntity(const std::string& n)
        : OntologyError("'" + n + "' is not an input-side entity") {}
};

// Truth assignment over input symbols; unlisted symbols read as false.
struct FeatureValuation {
    std::map<std::string, bool> assignment;

    bool value(const std::string& prop_name) const {
        auto it = assignment.find(prop_name);
        return it != assignment.end() && it->second;
    }
};

class OntologyModel {
public:
    // Entity names map to propositions with the first character lowercased,
    // so that `Sign` appears in formulas as `sign`.
    static std::string prop_name_of(const std::string& entity_name) {
        std::string s = entity_name;
        if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
        return s;
    }

    const std::vector<Entity>& entities() const { return entities_; }
    const std::vector<Role>& roles() const { return roles_; }
    const Universe& universe() const { return universe_; }

    bool has_entity(const std::string& name) const { return index_.count(name) != 0; }
    const Entity& entity(const std::string& name) const { return entities_[index_.at(name)]; }
    bool is_input_side(const std::string& name) const { return !entity(name).is_action; }

    Proposition prop_of(const std::string& entity_name) const {
        const Proposition* p = universe_.find(prop_name_of(entity_name));
        if (!p) throw OntologyError("no proposition for entity '" + entity_name + "'");
        return *p;
    }

    std::vector<Role> subclass_roles() const {
        std::vector<Role> out;
        for (const auto& r : roles_)
            if (r.name == "isSubClass") out.push_back(r);
        return out;
    }

    // omega^UY: behaviour rules, input-side source, action target.
    std::vector<Role> behavior_roles() const {
        std::vector<Role> out;
        for (const auto& r : roles_)
            if (r.name != "isSubClass" && !entity(r.source).is_action && entity(r.target).is_action)
                out.push_back(r);
        return out;
    }

    // omega^U: feature-structure bindings, both endpoints input-side.
    std::vector<Role> feature_roles_of(const std::string& source) const {
        std::vector<Role> out;
        for (const auto& r : roles_)
            if (r.source == source && r.name != "isSubClass" &&
                !entity(r.source).is_action && !entity(r.target).is_action)
                out.push_back(r);
        return out;
    }

    // Input-side entities carrying at least one feature binding, declaration order.
    std::vector<std::string> classified_objects() const {
        std::vector<std::string> out;
        for (const auto& e : entities_)
            if (!e.is_action && !feature_roles_of(e.name).empty())
                out.push_back(e.name);
        return out;
    }

    friend OntologyModel load_ontology(const std::string&);

private:
    Entity& add_entity(std::size_t line, const std::string& name, EntityKind kind, bool action) {
        if (index_.count(name)) throw DuplicateName(line, name);
        const std::string pname = prop_name_of(name);
        if (universe_.contains(pname)) throw DuplicateName(line, name);
        universe_.declare(pname, action ? PropKind::Output : PropKind::Input);
        index_.emplace(name, entities_.size());
        entities_.push_back(Entity{name, kind, action});
        return entities_.back();
    }

    std::vector<Entity> entities_;
    std::vector<Role> roles_;
    std::map<std::string, std::size_t> index_;
    Universe universe_;
};

// ---------------------------------------------------------------------------
// Loader.
//
//   concept <Name>
//   individual <name> : <ConceptName>
//   role <roleName> <source> <target>
//   subclass <name> <name>
//   action <name>
//
// `#` starts a comment. Unknown targets of feature roles are created as
// feature individuals; subclass endpoints are created as concepts. Sources
// and action targets must be declared beforehand.

inline OntologyModel load_ontology(const std::string& document) {
    OntologyModel model;
    std::istringstream in(document);
    std::string line;
    std::size_t lineno = 0;

    auto require_entity = [&](const std::string& name) {
        if (!model.has_entity(name)) throw UndefinedEntity(lineno, name);
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;

        auto next_word = [&](const char* what) {
            std::string w;
            if (!(ls >> w)) throw OntologyParseError(lineno, std::string("expected ") + what);
            if (!valid_identifier(w) && w != ":")
                throw OntologyParseError(lineno, "bad identifier '" + w + "'");
            return w;
        };

        if (kw == "concept") {
            model.add_entity(lineno, next_word("concept name"), EntityKind::Concept, false);
        } else if (kw == "individual") {
            std::string name = next_word("individual name");
            std::string colon = next_word("':'");
            if (colon != ":") throw OntologyParseError(lineno, "expected ':' after individual name");
            std::string cname = next_word("concept name");
            require_entity(cname);
            if (model.entity(cname).kind != EntityKind::Concept)
                throw OntologyParseError(lineno, "'" + cname + "' is not a concept");
            model.add_entity(lineno, name, EntityKind::Individual, false);
        } else if (kw == "action") {
            model.add_entity(lineno, next_word("action name"), EntityKind::Individual, true);
        } else if (kw == "role") {
            std::string rname = next_word("role name");
            std::string src = next_word("source entity");
            std::string tgt = next_word("target entity");
            require_entity(src);
            if (rname == "hasAction") {
                require_entity(tgt);
                if (!model.entity(tgt).is_action)
                    throw OntologyParseError(lineno, "hasAction target '" + tgt + "' is not an action");
            } else if (!model.has_entity(tgt)) {
                model.add_entity(lineno, tgt, EntityKind::Individual, false);  // feature individual
            }
            if (model.entity(src).is_action && !model.entity(tgt).is_action)
                throw OntologyParseError(lineno, "role '" + rname +
                                         "' runs from an action to an input symbol");
            model.roles_.push_back(Role{rname, src, tgt});
        } else if (kw == "subclass") {
            std::string a = next_word("entity name");
            std::string b = next_word("entity name");
            for (const std::string& n : {a, b})
                if (!model.has_entity(n)) model.add_entity(lineno, n, EntityKind::Concept, false);
            if (model.entity(a).is_action || model.entity(b).is_action)
                throw OntologyParseError(lineno, "subclass between actions is not supported");
            model.roles_.push_back(Role{"isSubClass", a, b});
        } else {
            throw OntologyParseError(lineno, "unknown directive '" + kw + "'");
        }
        std::string extra;
        if (ls >> extra) throw OntologyParseError(lineno, "trailing token '" + extra + "'");
    }

    // Reject subclass cycles (DFS, three colors).
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& r : model.roles())
        if (r.name == "isSubClass") succ[r.source].push_back(r.target);
    std::map<std::string, int> color;
    std::vector<std::pair<std::string, std::size_t>> stack;
    for (const auto& [start, _] : succ) {
        if (color[start]) continue;
        stack.push_back({start, 0});
        color[start] = 1;
        while (!stack.empty()) {
            auto& [node, idx] = stack.back();
            auto& edges = succ[node];
            if (idx == edges.size()) {
                color[node] = 2;
                stack.pop_back();
                continue;
            }
            const std::string& nxt = edges[idx++];
            if (color[nxt] == 1) throw SubclassCycle(nxt);
            if (color[nxt] == 0) {
                color[nxt] = 1;
                stack.push_back({nxt, 0});
            }
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// Reasoning

// Reflexive-transitive closure of isSubClass.
inline std::map<std::string, std::set<std::string>> subclass_closure(const OntologyModel& model) {
    std::map<std::string, std::set<std::string>> up;
    for (const auto& e : model.entities())
        if (!e.is_action) up[e.name].insert(e.name);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : model.roles()) {
            if (r.name != "isSubClass") continue;
            auto& from = up[r.source];
            for (const auto& anc : up[r.target])
                changed |= from.insert(anc).second;
        }
    }
    return up;
}

// Feature propositions bound to `object` through omega^U roles plus the
// proposition of each proper superclass. Superclasses come first, then
// feature targets in declaration order.
inline std::vector<Proposition> required_features(const OntologyModel& model,
                                                  const std::string& object) {
    if (!model.has_entity(object)) throw UndefinedEntity(0, object);
    if (!model.is_input_side(object)) throw NotAnInputEntity(object);

    std::vector<Proposition> out;
    std::set<std::string> seen;
    auto push = [&](const Proposition& p) {
        if (seen.insert(p.name).second) out.push_back(p);
    };

    // Superclass order stays stable: walk isSubClass declarations breadth-first.
    std::vector<std::string> frontier{object};
    std::set<std::string> visited{object};
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto& r : model.roles()) {
            if (r.name != "isSubClass") continue;
            if (std::find(frontier.begin(), frontier.end(), r.source) == frontier.end()) continue;
            if (visited.insert(r.target).second) {
                push(model.prop_of(r.target));
                next.push_back(r.target);
            }
        }
        frontier = std::move(next);
    }

    for (const auto& r : model.feature_roles_of(object))
        push(model.prop_of(r.target));
    return out;
}

// The decision procedure: does the detected entity described by `m`
// instantiate `object`? Closed world: unlisted features are false.
inline bool classify(const OntologyModel& model, const FeatureValuation& m,
                     const std::string& object) {
    for (const auto& p : required_features(model, object))
        if (!m.value(p.name)) return false;
    return true;
}

} // namespace aware
