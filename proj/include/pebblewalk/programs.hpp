#pragma once

#include "pebblewalk/automaton.hpp"

#include <string>
#include <vector>

namespace pw {

/// A ready-to-run traversal program: automaton plus its flag set.
struct ProgramDescriptor {
    std::string name;
    std::size_t dimension;
    std::size_t pebble_count;
    FlagSet flags;
    RobotAutomaton automaton;
};

/// Z^2 walker: one 4-way choice gadget emitting the simple random walk.
ProgramDescriptor build_z2();

/// Z^4 pebble program: wander in the (e1,e2)-plane away from the pebble
/// until stepping back onto it, then relocate the pebble one uniform step in
/// the (e3,e4)-plane; repeat.
ProgramDescriptor build_z4();

/// Z^6 pebble+flag program: (e1,e2) excursions that latch flag sightings;
/// a flag-free return relocates the pebble in (e3,e4), a flagged excursion
/// relocates it in (e1,e2) and then (e3,e4); every relocation is followed by
/// an (e5,e6) excursion back to the pebble.
ProgramDescriptor build_z6();

/// Z^8 extension of the Z^6 program with the flag plane spanned by e7,e8:
/// each real-move arrival on a flag cell inserts one uniform 5-way move over
/// {+e7,-e7,+e8,-e8,stay}, the stay realized as +e7 then -e7.
ProgramDescriptor build_z8();

const std::vector<std::string>& program_names();
ProgramDescriptor build_program(const std::string& name);

}  // namespace pw
