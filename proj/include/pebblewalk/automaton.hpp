#pragma once

#include "pebblewalk/core.hpp"
#include "pebblewalk/lattice.hpp"
#include "pebblewalk/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pw {

/// Observation vector w of length n+2, packed little-endian: bit i-1 holds
/// observation bit i. Bits 1..n are pebble coincidences, bit n+1 flag
/// membership, bit n+2 the coin bit.
struct Observation {
    std::uint32_t bits = 0;
    std::uint32_t n = 0;  // pebble count

    static Observation from_index(std::uint32_t n, std::uint32_t index) { return Observation{index, n}; }

    bool pebble(std::uint32_t i) const { return (bits >> (i - 1)) & 1u; }  // 1-based
    bool flag() const { return (bits >> n) & 1u; }
    bool coin() const { return (bits >> (n + 1)) & 1u; }
    std::uint32_t index() const { return bits; }
    std::uint32_t length() const { return n + 2; }

    std::string str() const;  // "101" with observation bit 1 leftmost
};

/// How a state participates in a program: a real policy move, a balance
/// move inside a coin-flip gadget, or a gadget leaf committing a branch.
enum class StateRole : std::uint8_t { policy, tree, commit };

const char* role_name(StateRole r);
StateRole role_parse(const std::string& s);

using StateId = std::uint32_t;

struct AutomatonState {
    std::string name;
    Move move;
    std::vector<std::uint8_t> carry;  // n bits; carry[i]=1 moves pebble i when co-located
    std::vector<StateId> next;        // dense table of size 2^{n+2}, indexed by Observation::index()
    StateRole role = StateRole::policy;
};

/// Bookkeeping for one compiled choice gadget: the balanced coin tree that
/// realizes a rational k-way choice from fair bits.
struct GadgetRecord {
    std::string name;                        // the choice point's state name
    StateId root = 0;
    std::vector<StateId> states;             // root, tree nodes, restart leaf/relay
    std::vector<StateId> commits;            // first commit state per branch, in branch order
    std::vector<Rational> branch_probs;      // intended branch probabilities
    std::vector<std::uint64_t> slot_counts;  // leaf slots allocated per branch
    std::uint64_t restart_slots = 0;
    int depth = 0;                           // tree depth t (0 = degenerate single branch)
};

/// The robot automaton R = (Q, q0, delta, xi) with per-state moves and a
/// dense observation-indexed transition table.
class RobotAutomaton {
public:
    std::size_t dimension = 0;
    std::size_t pebble_count = 0;
    StateId initial = 0;
    std::vector<AutomatonState> states;
    std::vector<GadgetRecord> gadgets;  // construction metadata, not behavior

    std::uint32_t table_size() const { return 1u << (pebble_count + 2); }

    std::optional<StateId> find_state(const std::string& name) const;
    const AutomatonState& state(StateId id) const { return states.at(id); }

    /// Totality, table sizes, carry widths, move axes. Throws Errc::validation.
    void validate() const;

    /// Drop states unreachable from the initial state. Behavior-preserving.
    void prune_unreachable();

    const GadgetRecord* find_gadget(const std::string& name) const;
};

/// System state (a, s_1..s_n, k, q).
struct SystemState {
    Point robot;
    std::vector<Point> pebbles;
    std::uint64_t step = 1;  // index of the coin bit the next move consumes
    StateId state = 0;

    static SystemState initial(const RobotAutomaton& a);
};

/// Observation of a configuration: pebble coincidences and flag membership
/// are read from the state as given (the step function passes the post-move
/// configuration), the coin bit is supplied by the caller.
Observation observe(const SystemState& sys, const FlagSet& flags, int random_bit);

/// One move: apply the state's move to the robot, carry co-located pebbles
/// whose carry bit is set, observe the post-move configuration with the next
/// coin bit, then switch state. Total on all inputs.
SystemState step(const SystemState& sys, const RobotAutomaton& a, const FlagSet& flags, BitSource& bits);

struct StepLogEntry {
    std::uint64_t step;
    StateId state;        // state that made the move
    Point position;       // post-move robot position
    Observation observed; // post-move observation
};

struct RunOptions {
    std::uint64_t max_steps = 0;
    bool track_visited = true;
    bool per_step_log = false;
    bool pebble_trail = false;                 // record (step, move) per pebble displacement
    std::uint64_t stop_after_lattice_moves = 0;  // 0 = no limit; counts policy/commit moves
    std::uint64_t stop_after_pebble_moves = 0;   // 0 = no limit
    bool stop_on_origin_return = false;          // stop at the first non-balance arrival at the origin
    // Coverage probe: when radius >= 0, visited cells within the L1 ball are
    // counted at each checkpoint step (sorted ascending).
    std::int64_t coverage_radius = -1;
    std::vector<std::uint64_t> checkpoints;
};

struct CoverageSample {
    std::uint64_t step;
    std::uint64_t covered;  // distinct ball cells visited so far
};

struct Trajectory {
    std::uint64_t steps_taken = 0;
    std::uint64_t lattice_moves = 0;  // moves made by policy/commit states
    std::uint64_t pebble_moves = 0;   // steps in which some pebble moved
    std::uint64_t flag_hits = 0;      // steps whose post-move cell is a flag cell
    std::uint64_t origin_return_step = 0;  // first non-balance arrival at the origin, 0 = none
    SystemState final_state;
    std::unordered_set<Point, PointHash> visited;  // includes the origin
    std::vector<std::uint64_t> state_visits;       // per state id, counting moves made
    std::map<Move, std::uint64_t> pebble_move_histogram;       // pebble 0 displacement counts
    std::vector<std::pair<std::uint64_t, Move>> pebble_trail;  // (step, move) for pebble 0
    std::vector<CoverageSample> coverage;
    std::vector<StepLogEntry> log;
};

/// Deterministic simulation: a pure function of (automaton, flags, options,
/// bit stream). The visited set includes the start cell; a zero budget
/// returns the length-1 trajectory.
Trajectory run(const RobotAutomaton& a, const FlagSet& flags, const RunOptions& opt, BitSource& bits);

}  // namespace pw
