#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace csm {

/// Dense index of an interned signal name.
using SignalId = std::uint32_t;

/// A set of signals, one bit per interned id. All sets belonging to one
/// system are sized to that system's alphabet.
using SignalSet = boost::dynamic_bitset<>;

/// Interns signal names into dense indices. Once a system is parsed the
/// table is frozen and acts as the system's alphabet.
class SignalTable {
public:
    /// Returns the id of `name`, interning it if new.
    SignalId intern(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end())
            return it->second;
        SignalId id = static_cast<SignalId>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    std::optional<SignalId> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    const std::string& name(SignalId id) const { return names_.at(id); }

    std::size_t size() const noexcept { return names_.size(); }

    SignalSet empty_set() const { return SignalSet(names_.size()); }

    /// Names of the set bits, in id order.
    std::vector<std::string> names_of(const SignalSet& set) const {
        std::vector<std::string> out;
        for (SignalId i = 0; i < set.size(); ++i)
            if (set.test(i))
                out.push_back(names_.at(i));
        return out;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, SignalId> index_;
};

/// Identifier check shared by all parsers: nonempty, letters/digits/underscore.
inline bool is_identifier(const std::string& s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

} // namespace csm
