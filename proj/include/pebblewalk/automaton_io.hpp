#pragma once

#include "pebblewalk/automaton.hpp"
#include "pebblewalk/rational_automaton.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pw {

/// Parsed automaton description file. State records are either deterministic
/// (move + observation-pattern routing) or rational (probability-weighted
/// transition lists); loading a file with rational records goes through the
/// coin-tree compiler.
struct AutFile {
    std::size_t dimension = 0;
    std::size_t pebbles = 0;
    std::string start;

    struct DetState {
        std::string name;
        Move move;
        std::vector<std::uint8_t> carry;
        StateRole role = StateRole::policy;
        std::vector<std::pair<std::string, std::string>> rules;  // (pattern, target), later wins
        int line = 0;
    };
    struct RatState {
        std::string name;
        bool terminal = false;
        std::vector<RationalBranch> branches;
        int line = 0;
    };

    std::vector<DetState> det;
    std::vector<RatState> rat;

    // Optional flag-set header: "flagset none" (default), "flagset point
    // <coords>", or "flagset base <coords>" followed by "flagbasis <coords>"
    // lines spanning the subspace.
    enum class Flags { none, point, span };
    Flags flag_kind = Flags::none;
    std::vector<std::int64_t> flag_base;
    std::vector<std::vector<std::int64_t>> flag_basis;

    bool pure_rational() const { return det.empty() && !rat.empty(); }
};

AutFile parse_aut(std::istream& in, const std::string& source_name = "<stream>");
AutFile parse_aut_file(const std::string& path);

/// Realize the file as a robot automaton (rational records are compiled).
RobotAutomaton to_robot(const AutFile& f);

/// Reinterpret a pure-rational file; throws if deterministic records exist.
RationalAutomaton to_rational(const AutFile& f);

FlagSet to_flagset(const AutFile& f);

void write_aut(std::ostream& out, const RobotAutomaton& a, const FlagSet* flags = nullptr);
void write_aut(std::ostream& out, const RationalAutomaton& a);
void write_aut_file(const std::string& path, const RobotAutomaton& a, const FlagSet* flags = nullptr);

}  // namespace pw
