#include "csm/bool_formula.hpp"

#include "csm/errors.hpp"

#include <cctype>
#include <utility>
#include <vector>

namespace csm {

struct BoolFormula::Node {
    BoolOp op;
    SignalId signal = 0;
    BoolFormula left;
    BoolFormula right;
};

BoolFormula BoolFormula::atom(SignalId s) {
    auto n = std::make_shared<Node>();
    n->op = BoolOp::Atom;
    n->signal = s;
    return BoolFormula(std::move(n));
}

BoolFormula BoolFormula::constant(bool value) {
    auto n = std::make_shared<Node>();
    n->op = value ? BoolOp::True : BoolOp::False;
    return BoolFormula(std::move(n));
}

BoolFormula BoolFormula::negation(BoolFormula f) {
    auto n = std::make_shared<Node>();
    n->op = BoolOp::Not;
    n->left = std::move(f);
    return BoolFormula(std::move(n));
}

BoolFormula BoolFormula::conjunction(BoolFormula a, BoolFormula b) {
    auto n = std::make_shared<Node>();
    n->op = BoolOp::And;
    n->left = std::move(a);
    n->right = std::move(b);
    return BoolFormula(std::move(n));
}

BoolFormula BoolFormula::disjunction(BoolFormula a, BoolFormula b) {
    auto n = std::make_shared<Node>();
    n->op = BoolOp::Or;
    n->left = std::move(a);
    n->right = std::move(b);
    return BoolFormula(std::move(n));
}

BoolOp BoolFormula::op() const { return node_->op; }
SignalId BoolFormula::signal() const { return node_->signal; }
BoolFormula BoolFormula::lhs() const { return node_->left; }
BoolFormula BoolFormula::rhs() const { return node_->right; }

bool BoolFormula::operator==(const BoolFormula& other) const {
    if (node_ == other.node_)
        return true;
    if (!node_ || !other.node_)
        return false;
    if (node_->op != other.node_->op)
        return false;
    switch (node_->op) {
    case BoolOp::Atom:
        return node_->signal == other.node_->signal;
    case BoolOp::True:
    case BoolOp::False:
        return true;
    case BoolOp::Not:
        return node_->left == other.node_->left;
    case BoolOp::And:
    case BoolOp::Or:
        return node_->left == other.node_->left && node_->right == other.node_->right;
    }
    return false;
}

namespace {

struct GuardParser {
    std::string_view text;
    std::size_t pos = 0;
    const SignalTable& alphabet;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start)
            throw ParseError("expected identifier or constant", start);
        return std::string(text.substr(start, pos - start));
    }

    BoolFormula parse_or() {
        BoolFormula f = parse_and();
        while (accept('|'))
            f = BoolFormula::disjunction(std::move(f), parse_and());
        return f;
    }

    BoolFormula parse_and() {
        BoolFormula f = parse_not();
        while (accept('&'))
            f = BoolFormula::conjunction(std::move(f), parse_not());
        return f;
    }

    BoolFormula parse_not() {
        if (accept('!'))
            return BoolFormula::negation(parse_not());
        return parse_primary();
    }

    BoolFormula parse_primary() {
        if (accept('(')) {
            BoolFormula f = parse_or();
            if (!accept(')'))
                throw ParseError("expected ')'", pos);
            return f;
        }
        std::size_t start = pos;
        std::string id = identifier();
        if (id == "1")
            return BoolFormula::constant(true);
        if (id == "0")
            return BoolFormula::constant(false);
        auto sig = alphabet.find(id);
        if (!sig)
            throw ResolveError("unknown signal '" + id + "'");
        (void)start;
        return BoolFormula::atom(*sig);
    }
};

} // namespace

BoolFormula parse_bool_formula(std::string_view text, const SignalTable& alphabet) {
    GuardParser p{text, 0, alphabet};
    if (p.at_end())
        throw ParseError("empty formula", 0);
    BoolFormula f = p.parse_or();
    if (!p.at_end())
        throw ParseError("unexpected trailing input", p.pos);
    return f;
}

bool eval(const BoolFormula& f, const SignalSet& active) {
    switch (f.op()) {
    case BoolOp::Atom:
        return active.test(f.signal());
    case BoolOp::True:
        return true;
    case BoolOp::False:
        return false;
    case BoolOp::Not:
        return !eval(f.lhs(), active);
    case BoolOp::And:
        return eval(f.lhs(), active) && eval(f.rhs(), active);
    case BoolOp::Or:
        return eval(f.lhs(), active) || eval(f.rhs(), active);
    }
    return false;
}

namespace {
void collect_support(const BoolFormula& f, SignalSet& out) {
    switch (f.op()) {
    case BoolOp::Atom:
        out.set(f.signal());
        return;
    case BoolOp::True:
    case BoolOp::False:
        return;
    case BoolOp::Not:
        collect_support(f.lhs(), out);
        return;
    case BoolOp::And:
    case BoolOp::Or:
        collect_support(f.lhs(), out);
        collect_support(f.rhs(), out);
        return;
    }
}
} // namespace

SignalSet support(const BoolFormula& f, std::size_t alphabet_size) {
    SignalSet out(alphabet_size);
    collect_support(f, out);
    return out;
}

bool is_tautology(const BoolFormula& f, std::size_t alphabet_size) {
    SignalSet sup = support(f, alphabet_size);
    std::vector<SignalId> vars;
    for (SignalId i = 0; i < sup.size(); ++i)
        if (sup.test(i))
            vars.push_back(i);
    if (vars.size() > kTautologySupportCap)
        throw LimitError("tautology check supports at most " +
                         std::to_string(kTautologySupportCap) +
                         " distinct signals, formula uses " +
                         std::to_string(vars.size()));
    SignalSet active(alphabet_size);
    const std::uint64_t combos = std::uint64_t{1} << vars.size();
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            active.set(vars[i], (mask >> i) & 1);
        if (!eval(f, active))
            return false;
    }
    return true;
}

namespace {
// Precedence levels for printing: | = 1, & = 2, ! = 3, leaf = 4.
int precedence(BoolOp op) {
    switch (op) {
    case BoolOp::Or:
        return 1;
    case BoolOp::And:
        return 2;
    case BoolOp::Not:
        return 3;
    default:
        return 4;
    }
}

void print(const BoolFormula& f, const SignalTable& alphabet, int parent_prec,
           std::string& out) {
    int prec = precedence(f.op());
    bool parens = prec < parent_prec;
    if (parens)
        out += '(';
    switch (f.op()) {
    case BoolOp::Atom:
        out += alphabet.name(f.signal());
        break;
    case BoolOp::True:
        out += '1';
        break;
    case BoolOp::False:
        out += '0';
        break;
    case BoolOp::Not:
        out += '!';
        print(f.lhs(), alphabet, prec + 1, out);
        break;
    case BoolOp::And:
        print(f.lhs(), alphabet, prec, out);
        out += " & ";
        print(f.rhs(), alphabet, prec + 1, out);
        break;
    case BoolOp::Or:
        print(f.lhs(), alphabet, prec, out);
        out += " | ";
        print(f.rhs(), alphabet, prec + 1, out);
        break;
    }
    if (parens)
        out += ')';
}
} // namespace

std::string to_string(const BoolFormula& f, const SignalTable& alphabet) {
    std::string out;
    print(f, alphabet, 0, out);
    return out;
}

} // namespace csm
