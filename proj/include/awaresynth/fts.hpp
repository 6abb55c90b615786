#pragma once

// Labelled finite transition systems with an edge-output map, and the
// ten-state car model (five cells, moving or stopping in each).

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "awaresynth/ltl.hpp"

namespace aware {

struct FtsEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::string output;
};

struct UnknownState : std::runtime_error {
    explicit UnknownState(const std::string& n)
        : std::runtime_error("unknown FTS state '" + n + "'") {}
};

struct FtsViolation {
    enum Kind { NonBlocking, OutputTotality, InitSubset, DanglingEdge, DuplicateState } kind;
    std::string detail;
};

class Fts {
public:
    std::size_t add_state(const std::string& name) {
        index_.emplace(name, names_.size());
        names_.push_back(name);
        labels_.emplace_back();
        return names_.size() - 1;
    }

    void mark_init(std::size_t q) { init_.push_back(q); }
    void add_label(std::size_t q, const std::string& prop) { labels_[q].push_back(prop); }
    void add_edge(std::size_t from, std::size_t to, const std::string& output) {
        edges_.push_back({from, to, output});
        out_edges_.clear();
    }

    std::size_t state_count() const { return names_.size(); }
    const std::vector<std::string>& state_names() const { return names_; }
    const std::string& state_name(std::size_t q) const { return names_.at(q); }
    std::size_t state_id(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw UnknownState(name);
        return it->second;
    }
    const std::vector<std::size_t>& init_states() const { return init_; }
    const std::vector<FtsEdge>& edges() const { return edges_; }
    const std::vector<std::string>& labels(std::size_t q) const { return labels_.at(q); }

    bool has_label(std::size_t q, const std::string& prop) const {
        const auto& ls = labels_.at(q);
        return std::find(ls.begin(), ls.end(), prop) != ls.end();
    }

    // All (successor, output) pairs, edge declaration order.
    std::vector<std::pair<std::size_t, std::string>> successors(std::size_t q) const {
        if (q >= names_.size()) throw UnknownState(std::to_string(q));
        std::vector<std::pair<std::size_t, std::string>> out;
        for (const auto& e : edges_)
            if (e.from == q) out.push_back({e.to, e.output});
        return out;
    }

    const std::vector<std::size_t>& out_edge_ids(std::size_t q) const {
        if (out_edges_.empty()) {
            out_edges_.resize(names_.size());
            for (std::size_t i = 0; i < edges_.size(); ++i)
                out_edges_[edges_[i].from].push_back(i);
        }
        return out_edges_.at(q);
    }

    std::set<std::string> label_props() const {
        std::set<std::string> out;
        for (const auto& ls : labels_) out.insert(ls.begin(), ls.end());
        return out;
    }
    std::set<std::string> outputs() const {
        std::set<std::string> out;
        for (const auto& e : edges_) out.insert(e.output);
        return out;
    }

    std::vector<FtsViolation> validate() const {
        std::vector<FtsViolation> v;
        std::set<std::string> seen;
        for (const auto& n : names_)
            if (!seen.insert(n).second)
                v.push_back({FtsViolation::DuplicateState, n});
        for (std::size_t q : init_)
            if (q >= names_.size())
                v.push_back({FtsViolation::InitSubset, std::to_string(q)});
        for (const auto& e : edges_) {
            if (e.from >= names_.size() || e.to >= names_.size()) {
                v.push_back({FtsViolation::DanglingEdge,
                             std::to_string(e.from) + "->" + std::to_string(e.to)});
                continue;
            }
            if (e.output.empty())
                v.push_back({FtsViolation::OutputTotality,
                             names_[e.from] + "->" + names_[e.to]});
        }
        for (std::size_t q = 0; q < names_.size(); ++q) {
            bool has_out = false;
            for (const auto& e : edges_)
                if (e.from == q) { has_out = true; break; }
            if (!has_out) v.push_back({FtsViolation::NonBlocking, names_[q]});
        }
        return v;
    }

private:
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::size_t> init_;
    std::vector<FtsEdge> edges_;
    std::vector<std::vector<std::string>> labels_;
    mutable std::vector<std::vector<std::size_t>> out_edges_;
};

// ---------------------------------------------------------------------------
// Car model. Locations count distance to the sign; indices decrease toward
// location 0 and wrap to 4 for the next lap. Hard stop exists only as the
// S0 self-loop, so a stop requested at location 0 cannot be honored -- that
// case must surface as an infeasible behaviour, not be blocked by the graph.

inline constexpr int kCarCells = 5;

inline Fts build_car_fts() {
    Fts fts;
    // M4..M0 get ids 0..4, S4..S0 ids 5..9; the move-first numbering also
    // serves as the deterministic tie-break order downstream.
    for (int i = kCarCells - 1; i >= 0; --i) fts.add_state("M" + std::to_string(i));
    for (int i = kCarCells - 1; i >= 0; --i) fts.add_state("S" + std::to_string(i));

    auto m = [&](int i) { return fts.state_id("M" + std::to_string(i)); };
    auto s = [&](int i) { return fts.state_id("S" + std::to_string(i)); };

    for (int i = 0; i < kCarCells; ++i) {
        fts.add_label(m(i), "loc" + std::to_string(i));
        fts.add_label(m(i), "moving");
        fts.add_label(s(i), "loc" + std::to_string(i));
        fts.add_label(s(i), "stopping");
    }

    for (int i = kCarCells - 1; i >= 1; --i) fts.add_edge(m(i), m(i - 1), "move");
    fts.add_edge(m(0), m(kCarCells - 1), "move");               // drive-through, lap wrap
    for (int i = kCarCells - 1; i >= 1; --i) fts.add_edge(m(i), s(i - 1), "slowDown");
    for (int i = kCarCells - 1; i >= 1; --i) fts.add_edge(s(i), s(i - 1), "slowDown");
    fts.add_edge(s(0), s(0), "halt");                           // hard stop at the sign
    fts.add_edge(s(0), m(kCarCells - 1), "move");               // resume, next lap
    for (int i = kCarCells - 1; i >= 1; --i) fts.add_edge(s(i), m(i - 1), "move");

    fts.mark_init(m(kCarCells - 1));
    return fts;
}

inline int car_location(const Fts& fts, std::size_t q) {
    for (const auto& l : fts.labels(q))
        if (l.rfind("loc", 0) == 0) return std::stoi(l.substr(3));
    throw std::logic_error("state without a location label");
}

inline bool car_moving(const Fts& fts, std::size_t q) { return fts.has_label(q, "moving"); }

// ---------------------------------------------------------------------------
// Line-based serialization: state / init / trans / label records.

inline std::string dump_fts(const Fts& fts) {
    std::ostringstream out;
    for (const auto& n : fts.state_names()) out << "state " << n << "\n";
    for (std::size_t q : fts.init_states()) out << "init " << fts.state_name(q) << "\n";
    for (std::size_t q = 0; q < fts.state_count(); ++q)
        for (const auto& l : fts.labels(q)) out << "label " << fts.state_name(q) << " " << l << "\n";
    for (const auto& e : fts.edges())
        out << "trans " << fts.state_name(e.from) << " " << fts.state_name(e.to)
            << " " << e.output << "\n";
    return out.str();
}

inline Fts parse_fts(const std::string& text) {
    Fts fts;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto word = [&]() {
            std::string w;
            if (!(ls >> w))
                throw std::runtime_error("fts line " + std::to_string(lineno) + ": missing field");
            return w;
        };
        if (kw == "state") fts.add_state(word());
        else if (kw == "init") fts.mark_init(fts.state_id(word()));
        else if (kw == "label") { std::size_t q = fts.state_id(word()); fts.add_label(q, word()); }
        else if (kw == "trans") {
            std::size_t from = fts.state_id(word());
            std::size_t to = fts.state_id(word());
            fts.add_edge(from, to, word());
        } else throw std::runtime_error("fts line " + std::to_string(lineno) +
                                        ": unknown record '" + kw + "'");
    }
    return fts;
}

} // namespace aware
