#pragma once

#include "csm/signal.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace csm {

enum class BoolOp : std::uint8_t { Atom, True, False, Not, And, Or };

/// Immutable boolean guard formula over a signal alphabet. Nodes are
/// reference-counted and shared; copies are cheap and safe to read from
/// multiple threads.
class BoolFormula {
public:
    BoolFormula() = default;

    static BoolFormula atom(SignalId s);
    static BoolFormula constant(bool value);
    static BoolFormula negation(BoolFormula f);
    static BoolFormula conjunction(BoolFormula a, BoolFormula b);
    static BoolFormula disjunction(BoolFormula a, BoolFormula b);

    bool empty() const noexcept { return node_ == nullptr; }
    BoolOp op() const;

    /// Atom payload; valid only when op() == BoolOp::Atom.
    SignalId signal() const;

    /// Operand accessors; lhs for Not/And/Or, rhs for And/Or.
    BoolFormula lhs() const;
    BoolFormula rhs() const;

    /// Structural equality.
    bool operator==(const BoolFormula& other) const;

private:
    struct Node;
    explicit BoolFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Parses the guard surface syntax: identifiers, `1`, `0`, `!`, `&`, `|`
/// and parentheses, with precedence ! > & > |. Every identifier must be
/// interned in `alphabet` already.
///
/// Throws ParseError on malformed input and ResolveError for identifiers
/// missing from the alphabet.
BoolFormula parse_bool_formula(std::string_view text, const SignalTable& alphabet);

/// Standard boolean semantics; Atom(s) is true iff bit s is set in `active`.
bool eval(const BoolFormula& f, const SignalSet& active);

/// Signals appearing as atoms, as a bitset over the alphabet.
SignalSet support(const BoolFormula& f, std::size_t alphabet_size);

/// True iff the formula holds under every assignment of its support
/// signals (enumeration). Throws LimitError if the support exceeds
/// kTautologySupportCap signals.
bool is_tautology(const BoolFormula& f, std::size_t alphabet_size);

inline constexpr std::size_t kTautologySupportCap = 24;

/// Renders with minimal parentheses; parse(to_string(f)) == f.
std::string to_string(const BoolFormula& f, const SignalTable& alphabet);

} // namespace csm
