#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csm {

/// Syntax error carrying a character offset into the source text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
          pos_(pos) {}

    std::size_t position() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

/// A name (signal, automaton, state, designator, variable) failed to resolve.
class ResolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured size limit was exceeded (state cap, tautology support cap).
class LimitError : public std::runtime_error {
public:
    LimitError(const std::string& msg, std::size_t states_seen = 0,
               std::size_t arcs_seen = 0)
        : std::runtime_error(msg), states_(states_seen), arcs_(arcs_seen) {}

    /// Partial statistics gathered before the limit hit.
    std::size_t states_seen() const noexcept { return states_; }
    std::size_t arcs_seen() const noexcept { return arcs_; }

private:
    std::size_t states_ = 0;
    std::size_t arcs_ = 0;
};

} // namespace csm
