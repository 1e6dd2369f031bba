#pragma once

#include "pebblewalk/automaton.hpp"

#include <map>
#include <vector>

namespace pw {

/// Exact first-passage probabilities of a coin-driven region of an
/// automaton: starting from `start`, the probability of first leaving the
/// region through each exit state, solved in exact rational arithmetic by
/// sparse state elimination.
///
/// Transitions inside the region are resolved with the non-coin observation
/// bits pinned to `context_bits` (default: no pebble coincidence, no flag),
/// the configuration a gadget sees while its balance moves oscillate around
/// one cell. Throws Errc::trapped_states, naming the trapped set, if some
/// region state cannot reach any exit.
std::map<StateId, Rational> absorption_probabilities(const RobotAutomaton& a, StateId start,
                                                     const std::vector<StateId>& region,
                                                     const std::vector<StateId>& exits,
                                                     std::uint32_t context_bits = 0);

/// Convenience overload for a compiled choice gadget: absorption from the
/// gadget root over its tree, with the branch commit states as exits.
std::map<StateId, Rational> absorption_probabilities(const RobotAutomaton& a,
                                                     const GadgetRecord& gadget);

}  // namespace pw
