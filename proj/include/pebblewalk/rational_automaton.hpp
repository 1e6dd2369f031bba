#pragma once

#include "pebblewalk/automaton.hpp"

#include <string>
#include <vector>

namespace pw {

/// Nondeterministic automaton with exact rational transition probabilities.
/// Each transition performs a move (with carry mask) and switches state;
/// terminal states have no transitions and idle once reached.
struct RationalBranch {
    Rational prob;
    Move move;
    std::vector<std::uint8_t> carry;
    std::string target;
};

struct RationalState {
    std::string name;
    bool terminal = false;
    std::vector<RationalBranch> branches;
};

struct RationalAutomaton {
    std::size_t dimension = 0;
    std::size_t pebble_count = 0;
    std::string initial;
    std::vector<RationalState> states;

    void validate() const;
    const RationalState* find(const std::string& name) const;
};

/// Compile a rational automaton into a fair-coin robot automaton. Every
/// choice point becomes a balanced coin tree over the random bit (depth 2q
/// for common denominator q; the minimal even depth when q is a power of
/// two), with surplus leaves routed back through one extra cancel pair.
/// Unreachable states are pruned. The returned automaton carries one
/// GadgetRecord per choice point so exact branch probabilities can be
/// verified by absorption_probabilities.
RobotAutomaton compile_rational(const RationalAutomaton& ra);

}  // namespace pw
