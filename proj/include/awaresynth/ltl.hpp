#pragma once

// LTL abstract syntax, concrete-text parser/printer, Boolean evaluation,
// and the GR(1)-partitioned specification container.

#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aware {

// ---------------------------------------------------------------------------
// Propositions

enum class PropKind { Input, Output, Auxiliary };

struct Proposition {
    std::string name;
    PropKind kind = PropKind::Input;

    friend bool operator==(const Proposition& a, const Proposition& b) {
        return a.name == b.name && a.kind == b.kind;
    }
    friend bool operator<(const Proposition& a, const Proposition& b) {
        return a.name < b.name;
    }
};

inline bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto tail = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    if (!head(s[0])) return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!tail(s[i])) return false;
    return true;
}

// A specification's proposition universe. Names are unique across kinds.
class Universe {
public:
    const Proposition& declare(const std::string& name, PropKind kind) {
        if (!valid_identifier(name))
            throw std::invalid_argument("invalid proposition name: '" + name + "'");
        auto it = index_.find(name);
        if (it != index_.end()) {
            if (props_[it->second].kind != kind)
                throw std::invalid_argument("proposition '" + name + "' redeclared with different kind");
            return props_[it->second];
        }
        index_.emplace(name, props_.size());
        props_.push_back(Proposition{name, kind});
        return props_.back();
    }

    const Proposition* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &props_[it->second];
    }

    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    const std::vector<Proposition>& all() const { return props_; }

    std::vector<Proposition> of_kind(PropKind k) const {
        std::vector<Proposition> out;
        for (const auto& p : props_)
            if (p.kind == k) out.push_back(p);
        return out;
    }

private:
    std::vector<Proposition> props_;
    std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Formulas

enum class Op {
    True, False, Atom,
    Not, And, Or, Implies,
    Next, Until, Eventually, Always
};

inline bool is_temporal(Op op) {
    return op == Op::Next || op == Op::Until || op == Op::Eventually || op == Op::Always;
}
inline bool is_unary(Op op) {
    return op == Op::Not || op == Op::Next || op == Op::Eventually || op == Op::Always;
}
inline bool is_binary(Op op) {
    return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until;
}

// Immutable AST node; formulas are cheap handles sharing subtrees.
class Formula {
public:
    Formula() : Formula(constant(true)) {}

    static Formula constant(bool value) {
        return Formula(std::make_shared<Node>(Node{value ? Op::True : Op::False, {}, {}, {}}));
    }
    static Formula atom(Proposition p) {
        auto n = std::make_shared<Node>(Node{Op::Atom, std::move(p), {}, {}});
        return Formula(std::move(n));
    }
    static Formula unary(Op op, Formula arg) {
        if (!is_unary(op)) throw std::logic_error("unary() with binary op");
        auto n = std::make_shared<Node>(Node{op, {}, std::make_shared<Formula>(std::move(arg)), {}});
        return Formula(std::move(n));
    }
    static Formula binary(Op op, Formula lhs, Formula rhs) {
        if (!is_binary(op)) throw std::logic_error("binary() with unary op");
        auto n = std::make_shared<Node>(Node{op, {},
                                             std::make_shared<Formula>(std::move(lhs)),
                                             std::make_shared<Formula>(std::move(rhs))});
        return Formula(std::move(n));
    }

    Op op() const { return node_->op; }
    const Proposition& prop() const { return node_->prop; }
    const Formula& lhs() const { return *node_->lhs; }
    const Formula& rhs() const { return *node_->rhs; }

    bool is_boolean() const {
        switch (op()) {
            case Op::True: case Op::False: case Op::Atom: return true;
            case Op::Not: return lhs().is_boolean();
            case Op::And: case Op::Or: case Op::Implies:
                return lhs().is_boolean() && rhs().is_boolean();
            default: return false;
        }
    }

    void collect_atoms(std::set<std::string>& out) const {
        switch (op()) {
            case Op::Atom: out.insert(prop().name); return;
            case Op::True: case Op::False: return;
            default:
                if (node_->lhs) lhs().collect_atoms(out);
                if (node_->rhs) rhs().collect_atoms(out);
        }
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) return true;
        if (a.op() != b.op()) return false;
        switch (a.op()) {
            case Op::True: case Op::False: return true;
            case Op::Atom: return a.prop() == b.prop();
            default:
                if (static_cast<bool>(a.node_->lhs) != static_cast<bool>(b.node_->lhs)) return false;
                if (static_cast<bool>(a.node_->rhs) != static_cast<bool>(b.node_->rhs)) return false;
                if (a.node_->lhs && !(a.lhs() == b.lhs())) return false;
                if (a.node_->rhs && !(a.rhs() == b.rhs())) return false;
                return true;
        }
    }
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
    struct Node {
        Op op;
        Proposition prop;
        std::shared_ptr<Formula> lhs, rhs;
    };
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

inline Formula f_true() { return Formula::constant(true); }
inline Formula f_false() { return Formula::constant(false); }
inline Formula f_atom(Proposition p) { return Formula::atom(std::move(p)); }
inline Formula f_not(Formula a) { return Formula::unary(Op::Not, std::move(a)); }
inline Formula f_and(Formula a, Formula b) { return Formula::binary(Op::And, std::move(a), std::move(b)); }
inline Formula f_or(Formula a, Formula b) { return Formula::binary(Op::Or, std::move(a), std::move(b)); }
inline Formula f_implies(Formula a, Formula b) { return Formula::binary(Op::Implies, std::move(a), std::move(b)); }
inline Formula f_next(Formula a) { return Formula::unary(Op::Next, std::move(a)); }
inline Formula f_until(Formula a, Formula b) { return Formula::binary(Op::Until, std::move(a), std::move(b)); }
inline Formula f_eventually(Formula a) { return Formula::unary(Op::Eventually, std::move(a)); }
inline Formula f_always(Formula a) { return Formula::unary(Op::Always, std::move(a)); }

// Conjunction of a list; empty list is true.
inline Formula f_conj(const std::vector<Formula>& fs) {
    if (fs.empty()) return f_true();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = f_and(acc, fs[i]);
    return acc;
}

// Derived operators rewritten to the Boolean/Next/Until core.
inline Formula normalize(const Formula& f) {
    switch (f.op()) {
        case Op::True: case Op::False: case Op::Atom: return f;
        case Op::Not: return f_not(normalize(f.lhs()));
        case Op::And: return f_and(normalize(f.lhs()), normalize(f.rhs()));
        case Op::Or:  return f_not(f_and(f_not(normalize(f.lhs())), f_not(normalize(f.rhs()))));
        case Op::Implies:
            return f_not(f_and(normalize(f.lhs()), f_not(normalize(f.rhs()))));
        case Op::Next: return f_next(normalize(f.lhs()));
        case Op::Until: return f_until(normalize(f.lhs()), normalize(f.rhs()));
        case Op::Eventually: return f_until(f_true(), normalize(f.lhs()));
        case Op::Always:
            return f_not(f_until(f_true(), f_not(normalize(f.lhs()))));
    }
    throw std::logic_error("normalize: bad op");
}

// ---------------------------------------------------------------------------
// Canonical printer. Minimal parentheses under the precedence
//   ! X F G  >  U  >  &  >  |  >  ->
// with U, &, | left-associative and -> right-associative.

namespace detail {

inline int precedence(Op op) {
    switch (op) {
        case Op::True: case Op::False: case Op::Atom: return 6;
        case Op::Not: case Op::Next: case Op::Eventually: case Op::Always: return 5;
        case Op::Until: return 4;
        case Op::And: return 3;
        case Op::Or: return 2;
        case Op::Implies: return 1;
    }
    return 0;
}

inline const char* op_token(Op op) {
    switch (op) {
        case Op::Not: return "!";
        case Op::Next: return "X";
        case Op::Eventually: return "F";
        case Op::Always: return "G";
        case Op::Until: return "U";
        case Op::And: return "&";
        case Op::Or: return "|";
        case Op::Implies: return "->";
        default: return "";
    }
}

inline void print_into(const Formula& f, int min_prec, std::string& out) {
    const int p = precedence(f.op());
    const bool parens = p < min_prec;
    if (parens) out += '(';
    switch (f.op()) {
        case Op::True: out += "true"; break;
        case Op::False: out += "false"; break;
        case Op::Atom: out += f.prop().name; break;
        case Op::Not:
            out += '!';
            print_into(f.lhs(), 5, out);
            break;
        case Op::Next: case Op::Eventually: case Op::Always:
            out += op_token(f.op());
            out += ' ';
            print_into(f.lhs(), 5, out);
            break;
        case Op::Until:
            print_into(f.lhs(), 4, out);
            out += " U ";
            print_into(f.rhs(), 5, out);
            break;
        case Op::And:
            print_into(f.lhs(), 3, out);
            out += " & ";
            print_into(f.rhs(), 4, out);
            break;
        case Op::Or:
            print_into(f.lhs(), 2, out);
            out += " | ";
            print_into(f.rhs(), 3, out);
            break;
        case Op::Implies:
            print_into(f.lhs(), 2, out);
            out += " -> ";
            print_into(f.rhs(), 1, out);
            break;
    }
    if (parens) out += ')';
}

} // namespace detail

inline std::string to_string(const Formula& f) {
    std::string out;
    detail::print_into(f, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parser

struct SyntaxError : std::runtime_error {
    std::size_t position;
    std::vector<std::string> expected;
    SyntaxError(std::size_t pos, std::vector<std::string> exp, const std::string& found)
        : std::runtime_error(make_message(pos, exp, found)),
          position(pos), expected(std::move(exp)) {}

    static std::string make_message(std::size_t pos, const std::vector<std::string>& exp,
                                    const std::string& found) {
        std::ostringstream os;
        os << "syntax error at position " << pos << ": expected ";
        for (std::size_t i = 0; i < exp.size(); ++i)
            os << (i ? " | " : "") << exp[i];
        os << ", found " << found;
        return os.str();
    }
};

struct UnknownProposition : std::runtime_error {
    std::string name;
    explicit UnknownProposition(std::string n)
        : std::runtime_error("unknown proposition '" + n + "'"), name(std::move(n)) {}
};

namespace detail {

struct Token {
    enum Kind { Ident, True, False, LParen, RParen, NotT, AndT, OrT, ImpliesT,
                NextT, EventuallyT, AlwaysT, UntilT, End } kind;
    std::string text;
    std::size_t pos;
};

inline std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        std::size_t start = i;
        if (c == '(') { out.push_back({Token::LParen, "(", start}); ++i; continue; }
        if (c == ')') { out.push_back({Token::RParen, ")", start}); ++i; continue; }
        if (c == '!') { out.push_back({Token::NotT, "!", start}); ++i; continue; }
        if (c == '&') { out.push_back({Token::AndT, "&", start}); ++i; continue; }
        if (c == '|') { out.push_back({Token::OrT, "|", start}); ++i; continue; }
        if (c == '-') {
            if (i + 1 < n && text[i + 1] == '>') { out.push_back({Token::ImpliesT, "->", start}); i += 2; continue; }
            throw SyntaxError(start, {"'->'"}, std::string("'-") + (i + 1 < n ? std::string(1, text[i + 1]) : "") + "'");
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            std::string word = text.substr(i, j - i);
            i = j;
            if (word == "true") out.push_back({Token::True, word, start});
            else if (word == "false") out.push_back({Token::False, word, start});
            else if (word == "X") out.push_back({Token::NextT, word, start});
            else if (word == "F") out.push_back({Token::EventuallyT, word, start});
            else if (word == "G") out.push_back({Token::AlwaysT, word, start});
            else if (word == "U") out.push_back({Token::UntilT, word, start});
            else out.push_back({Token::Ident, word, start});
            continue;
        }
        throw SyntaxError(start, {"formula"}, "'" + std::string(1, c) + "'");
    }
    out.push_back({Token::End, "<end>", n});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const Universe& uni) : toks_(std::move(toks)), uni_(uni) {}

    Formula parse() {
        Formula f = parse_implies();
        if (cur().kind != Token::End)
            throw SyntaxError(cur().pos, {"operator", "end of input"}, quoted(cur()));
        return f;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    void advance() { ++pos_; }

    static std::string quoted(const Token& t) { return "'" + t.text + "'"; }

    Formula parse_implies() {
        Formula lhs = parse_or();
        if (cur().kind == Token::ImpliesT) {
            advance();
            return f_implies(std::move(lhs), parse_implies());  // right-assoc
        }
        return lhs;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (cur().kind == Token::OrT) {
            advance();
            f = f_or(std::move(f), parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_until();
        while (cur().kind == Token::AndT) {
            advance();
            f = f_and(std::move(f), parse_until());
        }
        return f;
    }

    Formula parse_until() {
        Formula f = parse_unary();
        while (cur().kind == Token::UntilT) {
            advance();
            f = f_until(std::move(f), parse_unary());
        }
        return f;
    }

    Formula parse_unary() {
        switch (cur().kind) {
            case Token::NotT: advance(); return f_not(parse_unary());
            case Token::NextT: advance(); return f_next(parse_unary());
            case Token::EventuallyT: advance(); return f_eventually(parse_unary());
            case Token::AlwaysT: advance(); return f_always(parse_unary());
            default: return parse_primary();
        }
    }

    Formula parse_primary() {
        switch (cur().kind) {
            case Token::True: advance(); return f_true();
            case Token::False: advance(); return f_false();
            case Token::LParen: {
                advance();
                Formula f = parse_implies();
                if (cur().kind != Token::RParen)
                    throw SyntaxError(cur().pos, {"')'"}, quoted(cur()));
                advance();
                return f;
            }
            case Token::Ident: {
                const Proposition* p = uni_.find(cur().text);
                if (!p) throw UnknownProposition(cur().text);
                advance();
                return f_atom(*p);
            }
            default:
                throw SyntaxError(cur().pos, {"'true'", "'false'", "identifier", "'!'", "'('", "'X'", "'F'", "'G'"},
                                  quoted(cur()));
        }
    }

    std::vector<Token> toks_;
    const Universe& uni_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Formula parse_ltl(const std::string& text, const Universe& universe) {
    return detail::Parser(detail::tokenize(text), universe).parse();
}

// ---------------------------------------------------------------------------
// Boolean evaluation

struct TemporalOperatorPresent : std::runtime_error {
    TemporalOperatorPresent() : std::runtime_error("formula contains a temporal operator") {}
};

struct MissingAtomValuation : std::runtime_error {
    explicit MissingAtomValuation(const std::string& name)
        : std::runtime_error("no valuation for atom '" + name + "'") {}
};

inline bool eval_boolean(const Formula& f, const std::map<std::string, bool>& valuation) {
    switch (f.op()) {
        case Op::True: return true;
        case Op::False: return false;
        case Op::Atom: {
            auto it = valuation.find(f.prop().name);
            if (it == valuation.end()) throw MissingAtomValuation(f.prop().name);
            return it->second;
        }
        case Op::Not: return !eval_boolean(f.lhs(), valuation);
        case Op::And: return eval_boolean(f.lhs(), valuation) && eval_boolean(f.rhs(), valuation);
        case Op::Or: return eval_boolean(f.lhs(), valuation) || eval_boolean(f.rhs(), valuation);
        case Op::Implies: return !eval_boolean(f.lhs(), valuation) || eval_boolean(f.rhs(), valuation);
        default: throw TemporalOperatorPresent();
    }
}

// ---------------------------------------------------------------------------
// GR(1) specification container

enum class Side { Env, Sys };

struct NotInGr1Fragment : std::runtime_error {
    Formula formula;
    std::string reason;
    NotInGr1Fragment(Formula f, std::string r)
        : std::runtime_error("not in the GR(1) fragment: " + to_string(f) + " (" + r + ")"),
          formula(std::move(f)), reason(std::move(r)) {}
};

struct Gr1Spec {
    Formula env_init = f_true();
    Formula sys_init = f_true();
    std::vector<Formula> env_safety;
    std::vector<Formula> sys_safety;
    std::vector<Formula> env_liveness;   // Boolean cores, implicitly under G F
    std::vector<Formula> sys_liveness;
    std::vector<Proposition> env_vars;
    std::vector<Proposition> sys_vars;
};

namespace detail {

// Safety bodies: Boolean combinations where Next applies only to a pure
// Boolean subformula and no other temporal operator appears.
inline bool safety_shape_ok(const Formula& f, std::string& why) {
    switch (f.op()) {
        case Op::True: case Op::False: case Op::Atom: return true;
        case Op::Not: case Op::And: case Op::Or: case Op::Implies: {
            if (!safety_shape_ok(f.lhs(), why)) return false;
            if (is_binary(f.op()) && !safety_shape_ok(f.rhs(), why)) return false;
            return true;
        }
        case Op::Next:
            if (!f.lhs().is_boolean()) { why = "nested temporal operator under X"; return false; }
            return true;
        case Op::Until: why = "U inside a safety body"; return false;
        case Op::Eventually: why = "F inside a safety body"; return false;
        case Op::Always: why = "nested G"; return false;
    }
    return false;
}

} // namespace detail

inline Gr1Spec partition_gr1(const std::vector<std::pair<Side, Formula>>& formulas,
                             const Universe& universe) {
    Gr1Spec spec;
    bool have_env_init = false, have_sys_init = false;
    for (const auto& [side, f] : formulas) {
        const bool env = side == Side::Env;
        if (f.is_boolean()) {
            Formula& slot = env ? spec.env_init : spec.sys_init;
            bool& have = env ? have_env_init : have_sys_init;
            slot = have ? f_and(slot, f) : f;
            have = true;
            continue;
        }
        if (f.op() == Op::Always) {
            const Formula& body = f.lhs();
            if (body.op() == Op::Eventually) {
                if (!body.lhs().is_boolean())
                    throw NotInGr1Fragment(f, "liveness core is not purely Boolean");
                (env ? spec.env_liveness : spec.sys_liveness).push_back(body.lhs());
                continue;
            }
            std::string why;
            if (!detail::safety_shape_ok(body, why))
                throw NotInGr1Fragment(f, why);
            (env ? spec.env_safety : spec.sys_safety).push_back(body);
            continue;
        }
        throw NotInGr1Fragment(f, "top-level shape is not Boolean, G(..) or G F(..)");
    }
    spec.env_vars = universe.of_kind(PropKind::Input);
    for (const auto& p : universe.all())
        if (p.kind != PropKind::Input) spec.sys_vars.push_back(p);
    return spec;
}

// ---------------------------------------------------------------------------
// Spec files: one formula per line, `env:` / `sys:` prefix, `#` comments.

struct SpecLine {
    Side side;
    Formula formula;
};

inline std::vector<SpecLine> read_spec_lines(const std::string& text, const Universe& universe) {
    std::vector<SpecLine> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string body = line.substr(b, e - b + 1);
        Side side;
        if (body.rfind("env:", 0) == 0) { side = Side::Env; body = body.substr(4); }
        else if (body.rfind("sys:", 0) == 0) { side = Side::Sys; body = body.substr(4); }
        else throw std::runtime_error("spec line " + std::to_string(lineno) +
                                      ": expected 'env:' or 'sys:' prefix");
        out.push_back({side, parse_ltl(body, universe)});
    }
    return out;
}

inline std::string write_spec_lines(const std::vector<SpecLine>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l.side == Side::Env ? "env: " : "sys: ";
        out += to_string(l.formula);
        out += '\n';
    }
    return out;
}

} // namespace aware
