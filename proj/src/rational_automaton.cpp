#include "pebblewalk/rational_automaton.hpp"

#include "pebblewalk/builder.hpp"

#include <map>

namespace pw {

const RationalState* RationalAutomaton::find(const std::string& name) const {
    for (const auto& s : states) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

void RationalAutomaton::validate() const {
    require(dimension >= 1, Errc::validation, "rational automaton dimension must be >= 1");
    require(!states.empty(), Errc::validation, "rational automaton has no states");
    require(find(initial) != nullptr, Errc::validation, "initial state '" + initial + "' not found");
    std::map<std::string, int> seen;
    for (const auto& s : states) {
        if (++seen[s.name] > 1) fail(Errc::validation, "duplicate state name '" + s.name + "'");
    }
    for (const auto& s : states) {
        if (s.terminal) {
            require(s.branches.empty(), Errc::validation,
                    "terminal state '" + s.name + "' must have no transitions");
            continue;
        }
        require(!s.branches.empty(), Errc::validation,
                "state '" + s.name + "' has no transitions and is not terminal");
        Rational sum = 0;
        for (const auto& b : s.branches) {
            if (b.prob <= 0) {
                fail(Errc::validation, "state '" + s.name + "': transition probability must be positive");
            }
            sum += b.prob;
            if (!find(b.target)) {
                fail(Errc::validation, "state '" + s.name + "': unknown target '" + b.target + "'");
            }
            if (!b.move.is_zero() && static_cast<std::size_t>(b.move.axis) >= dimension) {
                fail(Errc::validation, "state '" + s.name + "': move axis exceeds dimension");
            }
            if (!b.carry.empty() && b.carry.size() != pebble_count) {
                fail(Errc::validation, "state '" + s.name + "': carry mask width mismatch");
            }
        }
        if (sum != 1) {
            fail(Errc::validation,
                 "state '" + s.name + "': transition probabilities sum to " + rational_str(sum) +
                     ", expected 1");
        }
    }
}

RobotAutomaton compile_rational(const RationalAutomaton& ra) {
    ra.validate();
    AutomatonBuilder b(ra.dimension, ra.pebble_count);
    std::map<std::string, StateId> id_of;
    for (const auto& s : ra.states) id_of[s.name] = b.declare(s.name);
    for (const auto& s : ra.states) {
        if (s.terminal) {
            b.reactive(id_of[s.name], Move::zero(), {}, {AutomatonBuilder::to(id_of[s.name])});
            continue;
        }
        std::vector<AutomatonBuilder::Branch> branches;
        for (const auto& t : s.branches) {
            AutomatonBuilder::Branch br;
            br.prob = t.prob;
            br.move = t.move;
            br.carry = t.carry;
            br.rules = {AutomatonBuilder::to(id_of[t.target])};
            branches.push_back(std::move(br));
        }
        b.choice(id_of[s.name], std::move(branches));
    }
    b.set_initial(id_of[ra.initial]);
    RobotAutomaton out = b.build();
    out.prune_unreachable();
    return out;
}

}  // namespace pw
