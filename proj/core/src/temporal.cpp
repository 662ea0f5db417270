#include "csm/temporal.hpp"

#include "csm/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <utility>

namespace csm {

void Designator::normalize() {
    std::sort(parts.begin(), parts.end());
}

std::string Designator::to_string() const {
    std::string out = "<";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += ',';
        out += parts[i].first + "." + parts[i].second;
    }
    out += '>';
    return out;
}

StateTuple resolve_designator(const Designator& d, const SystemInfo& info) {
    if (d.parts.size() != info.automaton_names.size())
        throw ResolveError("designator " + d.to_string() + " names " +
                           std::to_string(d.parts.size()) + " automata, system has " +
                           std::to_string(info.automaton_names.size()));
    StateTuple t(info.automaton_names.size());
    std::vector<char> seen(t.size(), 0);
    for (const auto& [aut, state] : d.parts) {
        auto ai = info.automaton_index(aut);
        if (!ai)
            throw ResolveError("unknown automaton '" + aut + "' in " + d.to_string());
        if (seen[*ai])
            throw ResolveError("automaton '" + aut + "' repeated in " + d.to_string());
        seen[*ai] = 1;
        auto si = info.state_index(*ai, state);
        if (!si)
            throw ResolveError("unknown state '" + state + "' of automaton '" + aut + "' in " +
                               d.to_string());
        t[*ai] = *si;
    }
    return t;
}

Designator designator_of(const SystemInfo& info, const StateTuple& t) {
    Designator d;
    for (std::size_t i = 0; i < t.size(); ++i)
        d.parts.emplace_back(info.automaton_names[i], info.state_names[i].at(t[i]));
    d.normalize();
    return d;
}

AtomicProp AtomicProp::make_signal(std::string name) {
    AtomicProp p;
    p.kind = Kind::Signal;
    p.signal = std::move(name);
    return p;
}

AtomicProp AtomicProp::make_in_state(Designator d) {
    AtomicProp p;
    p.kind = Kind::InState;
    p.state = std::move(d);
    return p;
}

AtomicProp AtomicProp::make_in_set(std::vector<Designator> ds) {
    AtomicProp p;
    p.kind = Kind::InSet;
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    p.members = std::move(ds);
    return p;
}

AtomicProp AtomicProp::make_in_proj(std::string automaton, std::string component) {
    AtomicProp p;
    p.kind = Kind::InProj;
    p.automaton = std::move(automaton);
    p.component = std::move(component);
    return p;
}

std::string AtomicProp::to_string() const {
    switch (kind) {
    case Kind::Signal:
        return signal;
    case Kind::InState:
        return "in " + state.to_string();
    case Kind::InSet: {
        std::string out = "in { ";
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i)
                out += ", ";
            out += members[i].to_string();
        }
        return out + " }";
    }
    case Kind::InProj:
        return "in " + automaton + "." + component;
    }
    return "?";
}

std::string StateRef::to_string() const {
    return is_var() ? var : des.to_string();
}

std::string QuantRange::to_string() const {
    switch (kind) {
    case Kind::Explicit: {
        std::string out = "{ ";
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i)
                out += ", ";
            out += members[i].to_string();
        }
        return out + " }";
    }
    case Kind::All:
        return "all";
    case Kind::Proj:
        return "proj " + automaton + "." + component;
    case Kind::Future:
        return "FUT(" + future_of.to_string() + ")";
    }
    return "?";
}

struct TemporalFormula::Node {
    TOp op = TOp::Atom;
    AtomicProp prop;
    std::string name;       // InVar/Quant variable, AXa automaton
    bool forall = false;    // Quant
    QuantRange range;       // Quant
    StateRef ref;           // At
    TemporalFormula a, b;
};

TemporalFormula TemporalFormula::atom(AtomicProp p) {
    auto n = std::make_shared<Node>();
    n->op = TOp::Atom;
    n->prop = std::move(p);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::constant(bool value) {
    auto n = std::make_shared<Node>();
    n->op = value ? TOp::ConstTrue : TOp::ConstFalse;
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::in_var(std::string var) {
    auto n = std::make_shared<Node>();
    n->op = TOp::InVar;
    n->name = std::move(var);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::negation(TemporalFormula f) {
    auto n = std::make_shared<Node>();
    n->op = TOp::Not;
    n->a = std::move(f);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::conjunction(TemporalFormula a, TemporalFormula b) {
    auto n = std::make_shared<Node>();
    n->op = TOp::And;
    n->a = std::move(a);
    n->b = std::move(b);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::disjunction(TemporalFormula a, TemporalFormula b) {
    auto n = std::make_shared<Node>();
    n->op = TOp::Or;
    n->a = std::move(a);
    n->b = std::move(b);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::implication(TemporalFormula a, TemporalFormula b) {
    auto n = std::make_shared<Node>();
    n->op = TOp::Implies;
    n->a = std::move(a);
    n->b = std::move(b);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::always(TemporalFormula f) {
    auto n = std::make_shared<Node>();
    n->op = TOp::AG;
    n->a = std::move(f);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::eventually(TemporalFormula f) {
    auto n = std::make_shared<Node>();
    n->op = TOp::AF;
    n->a = std::move(f);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::next(TemporalFormula f) {
    auto n = std::make_shared<Node>();
    n->op = TOp::AX;
    n->a = std::move(f);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::weak_until(TemporalFormula a, TemporalFormula b) {
    auto n = std::make_shared<Node>();
    n->op = TOp::AW;
    n->a = std::move(a);
    n->b = std::move(b);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::next_in(std::string automaton, TemporalFormula f) {
    auto n = std::make_shared<Node>();
    n->op = TOp::AXa;
    n->name = std::move(automaton);
    n->a = std::move(f);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::quantified(bool forall, std::string var, QuantRange range,
                                            TemporalFormula body) {
    auto n = std::make_shared<Node>();
    n->op = TOp::Quant;
    n->forall = forall;
    n->name = std::move(var);
    n->range = std::move(range);
    n->a = std::move(body);
    return TemporalFormula(std::move(n));
}

TemporalFormula TemporalFormula::at(StateRef ref, TemporalFormula f) {
    auto n = std::make_shared<Node>();
    n->op = TOp::At;
    n->ref = std::move(ref);
    n->a = std::move(f);
    return TemporalFormula(std::move(n));
}

TOp TemporalFormula::op() const { return node_->op; }
const AtomicProp& TemporalFormula::prop() const { return node_->prop; }
const std::string& TemporalFormula::var() const { return node_->name; }
const std::string& TemporalFormula::automaton() const { return node_->name; }
bool TemporalFormula::is_forall() const { return node_->forall; }
const QuantRange& TemporalFormula::range() const { return node_->range; }
const StateRef& TemporalFormula::at_ref() const { return node_->ref; }
TemporalFormula TemporalFormula::lhs() const { return node_->a; }
TemporalFormula TemporalFormula::rhs() const { return node_->b; }

bool TemporalFormula::operator==(const TemporalFormula& other) const {
    if (node_ == other.node_)
        return true;
    if (!node_ || !other.node_)
        return false;
    if (node_->op != other.node_->op)
        return false;
    switch (node_->op) {
    case TOp::Atom:
        return node_->prop == other.node_->prop;
    case TOp::ConstTrue:
    case TOp::ConstFalse:
        return true;
    case TOp::InVar:
        return node_->name == other.node_->name;
    case TOp::Not:
    case TOp::AG:
    case TOp::AF:
    case TOp::AX:
        return node_->a == other.node_->a;
    case TOp::AXa:
        return node_->name == other.node_->name && node_->a == other.node_->a;
    case TOp::And:
    case TOp::Or:
    case TOp::Implies:
    case TOp::AW:
        return node_->a == other.node_->a && node_->b == other.node_->b;
    case TOp::Quant:
        return node_->forall == other.node_->forall && node_->name == other.node_->name &&
               node_->range == other.node_->range && node_->a == other.node_->a;
    case TOp::At:
        return node_->ref == other.node_->ref && node_->a == other.node_->a;
    }
    return false;
}

namespace {

// Printing precedence: quant/at-body 0, -> 1, | 2, & 3, prefix 4, leaf 5.
int prec_of(TOp op) {
    switch (op) {
    case TOp::Quant:
        return 0;
    case TOp::Implies:
        return 1;
    case TOp::Or:
        return 2;
    case TOp::And:
        return 3;
    case TOp::Not:
    case TOp::AG:
    case TOp::AF:
    case TOp::AX:
    case TOp::AXa:
    case TOp::At:
        return 4;
    default:
        return 5;
    }
}

void print(const TemporalFormula& f, int parent, std::string& out) {
    int prec = prec_of(f.op());
    bool parens = prec < parent;
    if (parens)
        out += '(';
    switch (f.op()) {
    case TOp::Atom:
        out += f.prop().to_string();
        break;
    case TOp::ConstTrue:
        out += '1';
        break;
    case TOp::ConstFalse:
        out += '0';
        break;
    case TOp::InVar:
        out += "in " + f.var();
        break;
    case TOp::Not:
        out += '!';
        print(f.lhs(), prec, out);
        break;
    case TOp::And:
        print(f.lhs(), prec, out);
        out += " & ";
        print(f.rhs(), prec + 1, out);
        break;
    case TOp::Or:
        print(f.lhs(), prec, out);
        out += " | ";
        print(f.rhs(), prec + 1, out);
        break;
    case TOp::Implies:
        print(f.lhs(), prec + 1, out);
        out += " -> ";
        print(f.rhs(), prec, out);
        break;
    case TOp::AG:
        out += "AG ";
        print(f.lhs(), prec, out);
        break;
    case TOp::AF:
        out += "AF ";
        print(f.lhs(), prec, out);
        break;
    case TOp::AX:
        out += "AX ";
        print(f.lhs(), prec, out);
        break;
    case TOp::AXa:
        out += "AX@" + f.automaton() + " ";
        print(f.lhs(), prec, out);
        break;
    case TOp::AW: {
        out += "A[ ";
        print(f.lhs(), 0, out);
        out += " W ";
        print(f.rhs(), 0, out);
        out += " ]";
        break;
    }
    case TOp::Quant:
        out += f.is_forall() ? "forall " : "exists ";
        out += f.var() + " in " + f.range().to_string() + ": ";
        print(f.lhs(), 0, out);
        break;
    case TOp::At:
        out += "@" + f.at_ref().to_string() + " ";
        print(f.lhs(), prec, out);
        break;
    }
    if (parens)
        out += ')';
}

} // namespace

std::string TemporalFormula::to_string() const {
    std::string out;
    print(*this, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
    enum class Kind { Ident, Symbol, End } kind = Kind::End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    bool accept_symbol(std::string_view s) {
        if (current_.kind == Token::Kind::Symbol && current_.text == s) {
            advance();
            return true;
        }
        return false;
    }

    bool accept_ident(std::string_view s) {
        if (current_.kind == Token::Kind::Ident && current_.text == s) {
            advance();
            return true;
        }
        return false;
    }

    void expect_symbol(std::string_view s) {
        if (!accept_symbol(s))
            throw ParseError("expected '" + std::string(s) + "'", current_.pos);
    }

    std::string expect_ident() {
        if (current_.kind != Token::Kind::Ident)
            throw ParseError("expected identifier", current_.pos);
        return take().text;
    }

private:
    void advance() {
        for (;;) {
            while (pos_ < text_.size() &&
                   std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '#') { // comment to end of line
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
                continue;
            }
            break;
        }
        current_.pos = pos_;
        if (pos_ >= text_.size()) {
            current_ = Token{Token::Kind::End, "", pos_};
            return;
        }
        char c = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            current_ = Token{Token::Kind::Ident, std::string(text_.substr(start, pos_ - start)),
                             start};
            return;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            current_ = Token{Token::Kind::Symbol, "->", pos_};
            pos_ += 2;
            return;
        }
        static constexpr std::string_view singles = "(){}<>,.:@!&|[]";
        if (singles.find(c) != std::string_view::npos) {
            current_ = Token{Token::Kind::Symbol, std::string(1, c), pos_};
            ++pos_;
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    Token current_;
};

bool is_keyword(const std::string& s) {
    static const std::set<std::string> kw = {"AG", "AF", "AX", "A",    "W",     "forall",
                                             "exists", "in", "all", "proj", "FUT"};
    return kw.count(s) > 0;
}

class TemporalParser {
public:
    explicit TemporalParser(std::string_view text) : lex_(text) {}

    TemporalFormula parse() {
        TemporalFormula f = formula();
        if (lex_.peek().kind != Token::Kind::End)
            throw ParseError("unexpected trailing input", lex_.peek().pos);
        return f;
    }

private:
    Lexer lex_;
    std::vector<std::string> bound_;

    bool is_bound(const std::string& v) const {
        return std::find(bound_.begin(), bound_.end(), v) != bound_.end();
    }

    Designator designator() {
        lex_.expect_symbol("<");
        Designator d;
        do {
            std::string aut = lex_.expect_ident();
            lex_.expect_symbol(".");
            std::string st = lex_.expect_ident();
            d.parts.emplace_back(std::move(aut), std::move(st));
        } while (lex_.accept_symbol(","));
        lex_.expect_symbol(">");
        d.normalize();
        return d;
    }

    QuantRange quant_range() {
        QuantRange r;
        if (lex_.accept_ident("all")) {
            r.kind = QuantRange::Kind::All;
        } else if (lex_.accept_ident("proj")) {
            r.kind = QuantRange::Kind::Proj;
            r.automaton = lex_.expect_ident();
            lex_.expect_symbol(".");
            r.component = lex_.expect_ident();
        } else if (lex_.accept_ident("FUT")) {
            r.kind = QuantRange::Kind::Future;
            lex_.expect_symbol("(");
            r.future_of = designator();
            lex_.expect_symbol(")");
        } else if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "{") {
            lex_.take();
            r.kind = QuantRange::Kind::Explicit;
            do {
                r.members.push_back(designator());
            } while (lex_.accept_symbol(","));
            lex_.expect_symbol("}");
            std::sort(r.members.begin(), r.members.end());
        } else {
            throw ParseError("expected quantifier range", lex_.peek().pos);
        }
        return r;
    }

    TemporalFormula formula() {
        if (lex_.peek().kind == Token::Kind::Ident &&
            (lex_.peek().text == "forall" || lex_.peek().text == "exists")) {
            bool forall = lex_.take().text == "forall";
            std::string var = lex_.expect_ident();
            if (is_keyword(var))
                throw ParseError("'" + var + "' cannot be a variable name", lex_.peek().pos);
            if (!lex_.accept_ident("in"))
                throw ParseError("expected 'in' after quantifier variable", lex_.peek().pos);
            QuantRange range = quant_range();
            lex_.expect_symbol(":");
            bound_.push_back(var);
            TemporalFormula body = formula();
            bound_.pop_back();
            return TemporalFormula::quantified(forall, var, std::move(range), std::move(body));
        }
        return implies();
    }

    TemporalFormula implies() {
        TemporalFormula a = disjunct();
        if (lex_.accept_symbol("->"))
            return TemporalFormula::implication(std::move(a), implies());
        return a;
    }

    TemporalFormula disjunct() {
        TemporalFormula a = conjunct();
        while (lex_.accept_symbol("|"))
            a = TemporalFormula::disjunction(std::move(a), conjunct());
        return a;
    }

    TemporalFormula conjunct() {
        TemporalFormula a = unary();
        while (lex_.accept_symbol("&"))
            a = TemporalFormula::conjunction(std::move(a), unary());
        return a;
    }

    TemporalFormula unary() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Symbol) {
            if (t.text == "!") {
                lex_.take();
                return TemporalFormula::negation(unary());
            }
            if (t.text == "@") {
                lex_.take();
                StateRef ref;
                if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "<") {
                    ref.des = designator();
                } else {
                    ref.var = lex_.expect_ident();
                    if (!is_bound(ref.var))
                        throw ParseError("unbound variable '" + ref.var + "'", t.pos);
                }
                return TemporalFormula::at(std::move(ref), unary());
            }
        }
        if (t.kind == Token::Kind::Ident) {
            if (t.text == "AG") {
                lex_.take();
                return TemporalFormula::always(unary());
            }
            if (t.text == "AF") {
                lex_.take();
                return TemporalFormula::eventually(unary());
            }
            if (t.text == "AX") {
                lex_.take();
                if (lex_.accept_symbol("@")) {
                    std::string aut = lex_.expect_ident();
                    return TemporalFormula::next_in(std::move(aut), unary());
                }
                return TemporalFormula::next(unary());
            }
            if (t.text == "A") {
                lex_.take();
                lex_.expect_symbol("[");
                TemporalFormula a = formula();
                if (!lex_.accept_ident("W"))
                    throw ParseError("expected 'W' in A[ f W g ]", lex_.peek().pos);
                TemporalFormula b = formula();
                lex_.expect_symbol("]");
                return TemporalFormula::weak_until(std::move(a), std::move(b));
            }
        }
        return primary();
    }

    TemporalFormula primary() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Symbol && t.text == "(") {
            lex_.take();
            TemporalFormula f = formula();
            lex_.expect_symbol(")");
            return f;
        }
        if (t.kind == Token::Kind::Ident && t.text == "in") {
            lex_.take();
            if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "<")
                return TemporalFormula::atom(AtomicProp::make_in_state(designator()));
            if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "{") {
                lex_.take();
                std::vector<Designator> ds;
                do {
                    ds.push_back(designator());
                } while (lex_.accept_symbol(","));
                lex_.expect_symbol("}");
                return TemporalFormula::atom(AtomicProp::make_in_set(std::move(ds)));
            }
            std::string name = lex_.expect_ident();
            if (lex_.accept_symbol(".")) {
                std::string st = lex_.expect_ident();
                return TemporalFormula::atom(AtomicProp::make_in_proj(std::move(name), std::move(st)));
            }
            if (!is_bound(name))
                throw ParseError("unbound variable '" + name + "' after 'in'", t.pos);
            return TemporalFormula::in_var(std::move(name));
        }
        if (t.kind == Token::Kind::Ident) {
            if (is_keyword(t.text))
                throw ParseError("unexpected keyword '" + t.text + "'", t.pos);
            std::string name = lex_.take().text;
            if (name == "1")
                return TemporalFormula::constant(true);
            if (name == "0")
                return TemporalFormula::constant(false);
            return TemporalFormula::atom(AtomicProp::make_signal(std::move(name)));
        }
        throw ParseError("expected formula", t.pos);
    }
};

} // namespace

TemporalFormula parse_temporal(std::string_view text) {
    return TemporalParser(text).parse();
}

// ---------------------------------------------------------------------------
// Atom collection, substitution, completion

namespace {

void collect_walk(const TemporalFormula& f, std::map<std::string, QuantRange>& ranges,
                  std::set<AtomicProp>& out) {
    switch (f.op()) {
    case TOp::Atom:
        out.insert(f.prop());
        return;
    case TOp::ConstTrue:
    case TOp::ConstFalse:
        return;
    case TOp::InVar: {
        auto it = ranges.find(f.var());
        if (it != ranges.end() && it->second.kind == QuantRange::Kind::Explicit)
            for (const Designator& d : it->second.members)
                out.insert(AtomicProp::make_in_state(d));
        return;
    }
    case TOp::Not:
    case TOp::AG:
    case TOp::AF:
    case TOp::AX:
    case TOp::AXa:
        collect_walk(f.lhs(), ranges, out);
        return;
    case TOp::And:
    case TOp::Or:
    case TOp::Implies:
    case TOp::AW:
        collect_walk(f.lhs(), ranges, out);
        collect_walk(f.rhs(), ranges, out);
        return;
    case TOp::Quant: {
        auto saved = ranges.find(f.var()) != ranges.end()
                         ? std::optional<QuantRange>(ranges[f.var()])
                         : std::nullopt;
        ranges[f.var()] = f.range();
        collect_walk(f.lhs(), ranges, out);
        if (saved)
            ranges[f.var()] = *saved;
        else
            ranges.erase(f.var());
        return;
    }
    case TOp::At:
        collect_walk(f.lhs(), ranges, out);
        return;
    }
}

} // namespace

std::vector<AtomicProp> collect_atoms(const TemporalFormula& f) {
    std::map<std::string, QuantRange> ranges;
    std::set<AtomicProp> atoms;
    collect_walk(f, ranges, atoms);
    return {atoms.begin(), atoms.end()};
}

TemporalFormula substitute(const TemporalFormula& f, const std::string& var,
                           const Designator& d) {
    switch (f.op()) {
    case TOp::Atom:
    case TOp::ConstTrue:
    case TOp::ConstFalse:
        return f;
    case TOp::InVar:
        if (f.var() == var)
            return TemporalFormula::atom(AtomicProp::make_in_state(d));
        return f;
    case TOp::Not:
        return TemporalFormula::negation(substitute(f.lhs(), var, d));
    case TOp::And:
        return TemporalFormula::conjunction(substitute(f.lhs(), var, d),
                                            substitute(f.rhs(), var, d));
    case TOp::Or:
        return TemporalFormula::disjunction(substitute(f.lhs(), var, d),
                                            substitute(f.rhs(), var, d));
    case TOp::Implies:
        return TemporalFormula::implication(substitute(f.lhs(), var, d),
                                            substitute(f.rhs(), var, d));
    case TOp::AG:
        return TemporalFormula::always(substitute(f.lhs(), var, d));
    case TOp::AF:
        return TemporalFormula::eventually(substitute(f.lhs(), var, d));
    case TOp::AX:
        return TemporalFormula::next(substitute(f.lhs(), var, d));
    case TOp::AW:
        return TemporalFormula::weak_until(substitute(f.lhs(), var, d),
                                           substitute(f.rhs(), var, d));
    case TOp::AXa:
        return TemporalFormula::next_in(f.automaton(), substitute(f.lhs(), var, d));
    case TOp::Quant:
        if (f.var() == var) // shadowed
            return f;
        return TemporalFormula::quantified(f.is_forall(), f.var(), f.range(),
                                           substitute(f.lhs(), var, d));
    case TOp::At: {
        StateRef ref = f.at_ref();
        if (ref.is_var() && ref.var == var) {
            ref.var.clear();
            ref.des = d;
        }
        return TemporalFormula::at(std::move(ref), substitute(f.lhs(), var, d));
    }
    }
    return f;
}

bool PropSet::has_atom(const AtomicProp& p) const {
    return std::binary_search(atoms.begin(), atoms.end(), p);
}

namespace {

// Evaluation position of a subformula while completing the atom set:
// the initial state, a concrete designator, a quantified variable, or
// unknown because a temporal operator intervened.
struct Anchor {
    enum class Kind { Initial, Des, Var, None } kind = Kind::Initial;
    Designator des;
    std::string var;

    Anchor() = default;
    explicit Anchor(Kind k) : kind(k) {}
};

struct Completion {
    const SystemInfo& info;
    const Graph* g; // null for the on-line, graph-free variant
    StateTuple initial;
    std::set<AtomicProp> atoms;
    std::set<Designator> protect;
    bool allowed = true;
    std::map<std::string, QuantRange> ranges;

    Completion(const SystemInfo& system_info, const Graph* graph, StateTuple init)
        : info(system_info), g(graph), initial(std::move(init)) {}

    std::vector<Designator> range_members(const QuantRange& r) {
        switch (r.kind) {
        case QuantRange::Kind::Explicit: {
            for (const Designator& d : r.members)
                resolve_designator(d, info); // validate names
            return r.members;
        }
        case QuantRange::Kind::All: {
            if (!g)
                throw ResolveError("range 'all' needs a built graph");
            std::vector<Designator> out;
            for (const auto& s : g->states)
                out.push_back(designator_of(info, s.components));
            return out;
        }
        case QuantRange::Kind::Proj: {
            auto ai = info.automaton_index(r.automaton);
            if (!ai)
                throw ResolveError("unknown automaton '" + r.automaton + "' in range");
            auto si = info.state_index(*ai, r.component);
            if (!si)
                throw ResolveError("unknown state '" + r.component + "' of automaton '" +
                                   r.automaton + "' in range");
            if (!g)
                throw ResolveError("range 'proj' needs a built graph");
            std::vector<Designator> out;
            for (const auto& s : g->states)
                if (s.components[*ai] == *si)
                    out.push_back(designator_of(info, s.components));
            return out;
        }
        case QuantRange::Kind::Future:
            return {};
        }
        return {};
    }

    // The concrete states an anchored next-step operator refers to, or
    // nullopt when the reference cannot be found statically.
    std::optional<std::vector<Designator>> anchor_states(const Anchor& anchor) {
        switch (anchor.kind) {
        case Anchor::Kind::Initial:
            return std::vector<Designator>{designator_of(info, initial)};
        case Anchor::Kind::Des:
            resolve_designator(anchor.des, info);
            return std::vector<Designator>{anchor.des};
        case Anchor::Kind::Var: {
            auto it = ranges.find(anchor.var);
            if (it == ranges.end() || !it->second.is_static())
                return std::nullopt;
            return range_members(it->second);
        }
        case Anchor::Kind::None:
            return std::nullopt;
        }
        return std::nullopt;
    }

    void add_proj_atom(const std::string& automaton, const Designator& d) {
        auto ai = info.automaton_index(automaton);
        if (!ai)
            throw ResolveError("unknown automaton '" + automaton + "'");
        StateTuple t = resolve_designator(d, info);
        atoms.insert(AtomicProp::make_in_proj(automaton, info.state_names[*ai].at(t[*ai])));
    }

    void walk(const TemporalFormula& f, Anchor anchor) {
        switch (f.op()) {
        case TOp::Atom:
            atoms.insert(f.prop());
            return;
        case TOp::ConstTrue:
        case TOp::ConstFalse:
            return;
        case TOp::InVar: {
            auto it = ranges.find(f.var());
            if (it != ranges.end() && it->second.is_static())
                for (const Designator& d : range_members(it->second))
                    atoms.insert(AtomicProp::make_in_state(d));
            return;
        }
        case TOp::Not:
            walk(f.lhs(), anchor);
            return;
        case TOp::And:
        case TOp::Or:
        case TOp::Implies:
            walk(f.lhs(), anchor);
            walk(f.rhs(), anchor);
            return;
        case TOp::AG:
        case TOp::AF:
            walk(f.lhs(), Anchor{Anchor::Kind::None});
            return;
        case TOp::AW:
            walk(f.lhs(), Anchor{Anchor::Kind::None});
            walk(f.rhs(), Anchor{Anchor::Kind::None});
            return;
        case TOp::AX: {
            auto refs = anchor_states(anchor);
            if (!refs)
                allowed = false;
            else
                for (const Designator& d : *refs)
                    atoms.insert(AtomicProp::make_in_state(d));
            walk(f.lhs(), Anchor{Anchor::Kind::None});
            return;
        }
        case TOp::AXa: {
            auto refs = anchor_states(anchor);
            if (!refs) {
                // Reference not static: cover every projection of the automaton.
                auto ai = info.automaton_index(f.automaton());
                if (!ai)
                    throw ResolveError("unknown automaton '" + f.automaton() + "'");
                for (const std::string& st : info.state_names[*ai])
                    atoms.insert(AtomicProp::make_in_proj(f.automaton(), st));
            } else {
                for (const Designator& d : *refs)
                    add_proj_atom(f.automaton(), d);
            }
            walk(f.lhs(), Anchor{Anchor::Kind::None});
            return;
        }
        case TOp::Quant: {
            if (!f.range().is_static()) {
                allowed = false;
            } else {
                for (const Designator& d : range_members(f.range()))
                    protect.insert(d);
            }
            auto saved = ranges.find(f.var()) != ranges.end()
                             ? std::optional<QuantRange>(ranges[f.var()])
                             : std::nullopt;
            ranges[f.var()] = f.range();
            walk(f.lhs(), anchor);
            if (saved)
                ranges[f.var()] = *saved;
            else
                ranges.erase(f.var());
            return;
        }
        case TOp::At: {
            Anchor next;
            if (f.at_ref().is_var()) {
                next.kind = Anchor::Kind::Var;
                next.var = f.at_ref().var;
            } else {
                resolve_designator(f.at_ref().des, info);
                next.kind = Anchor::Kind::Des;
                next.des = f.at_ref().des;
                protect.insert(f.at_ref().des);
            }
            walk(f.lhs(), next);
            return;
        }
        }
    }

    PropSet finish() {
        PropSet out;
        out.atoms.assign(atoms.begin(), atoms.end());
        out.reduction_allowed = allowed;
        out.protected_states.assign(protect.begin(), protect.end());
        return out;
    }
};

} // namespace

PropSet complete_props(const TemporalFormula& f, const Graph& g) {
    Completion c{*g.info, &g, g.states[g.initial].components};
    c.walk(f, Anchor{Anchor::Kind::Initial});
    return c.finish();
}

PropSet complete_props_online(const TemporalFormula& f, const SystemInfo& info,
                              const StateTuple& initial) {
    Completion c{info, nullptr, initial};
    c.walk(f, Anchor{Anchor::Kind::Initial});
    return c.finish();
}

} // namespace csm
