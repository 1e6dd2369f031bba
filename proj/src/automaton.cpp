#include "pebblewalk/automaton.hpp"

#include <algorithm>
#include <deque>

namespace pw {

std::string Observation::str() const {
    std::string s;
    for (std::uint32_t i = 0; i < n + 2; ++i) s += ((bits >> i) & 1u) ? '1' : '0';
    return s;
}

const char* role_name(StateRole r) {
    switch (r) {
        case StateRole::policy: return "policy";
        case StateRole::tree: return "tree";
        case StateRole::commit: return "commit";
    }
    return "policy";
}

StateRole role_parse(const std::string& s) {
    if (s == "policy") return StateRole::policy;
    if (s == "tree") return StateRole::tree;
    if (s == "commit") return StateRole::commit;
    fail(Errc::parse, "unknown state role '" + s + "'");
}

std::optional<StateId> RobotAutomaton::find_state(const std::string& name) const {
    for (StateId i = 0; i < states.size(); ++i) {
        if (states[i].name == name) return i;
    }
    return std::nullopt;
}

const GadgetRecord* RobotAutomaton::find_gadget(const std::string& name) const {
    for (const auto& g : gadgets) {
        if (g.name == name) return &g;
    }
    return nullptr;
}

void RobotAutomaton::validate() const {
    require(dimension >= 1, Errc::validation, "automaton dimension must be >= 1");
    require(!states.empty(), Errc::validation, "automaton has no states");
    require(initial < states.size(), Errc::validation, "initial state out of range");
    const std::uint32_t tsize = table_size();
    for (const auto& s : states) {
        if (s.carry.size() != pebble_count) {
            fail(Errc::validation, "state '" + s.name + "': carry mask has wrong width");
        }
        if (s.next.size() != tsize) {
            fail(Errc::validation, "state '" + s.name + "': transition table must have " +
                                       std::to_string(tsize) + " entries");
        }
        for (StateId t : s.next) {
            if (t >= states.size()) {
                fail(Errc::validation, "state '" + s.name + "': transition to unknown state id");
            }
        }
        if (!s.move.is_zero() && static_cast<std::size_t>(s.move.axis) >= dimension) {
            fail(Errc::validation, "state '" + s.name + "': move axis exceeds dimension");
        }
    }
}

void RobotAutomaton::prune_unreachable() {
    std::vector<char> seen(states.size(), 0);
    std::deque<StateId> queue{initial};
    seen[initial] = 1;
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (StateId t : states[s].next) {
            if (!seen[t]) {
                seen[t] = 1;
                queue.push_back(t);
            }
        }
    }
    std::vector<StateId> remap(states.size(), 0);
    std::vector<AutomatonState> kept;
    kept.reserve(states.size());
    for (StateId i = 0; i < states.size(); ++i) {
        if (seen[i]) {
            remap[i] = static_cast<StateId>(kept.size());
            kept.push_back(std::move(states[i]));
        }
    }
    for (auto& s : kept) {
        for (auto& t : s.next) t = remap[t];
    }
    initial = remap[initial];
    // Gadget metadata for fully pruned regions is dropped; partially kept
    // gadgets keep their surviving states.
    std::vector<GadgetRecord> gkept;
    for (auto& g : gadgets) {
        if (!seen[g.root]) continue;
        GadgetRecord ng = g;
        ng.root = remap[g.root];
        ng.states.clear();
        for (StateId s : g.states) {
            if (seen[s]) ng.states.push_back(remap[s]);
        }
        for (auto& c : ng.commits) c = remap[c];
        gkept.push_back(std::move(ng));
    }
    gadgets = std::move(gkept);
    states = std::move(kept);
}

SystemState SystemState::initial(const RobotAutomaton& a) {
    SystemState s;
    s.robot = Point::origin(a.dimension);
    s.pebbles.assign(a.pebble_count, Point::origin(a.dimension));
    s.step = 1;
    s.state = a.initial;
    return s;
}

Observation observe(const SystemState& sys, const FlagSet& flags, int random_bit) {
    const std::uint32_t n = static_cast<std::uint32_t>(sys.pebbles.size());
    std::uint32_t bits = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (sys.pebbles[i] == sys.robot) bits |= 1u << i;
    }
    if (flags.contains(sys.robot)) bits |= 1u << n;
    if (random_bit) bits |= 1u << (n + 1);
    return Observation{bits, n};
}

SystemState step(const SystemState& sys, const RobotAutomaton& a, const FlagSet& flags, BitSource& bits) {
    const AutomatonState& st = a.states[sys.state];
    SystemState out = sys;
    // Carry applies to pebbles standing on the robot's pre-move cell.
    for (std::size_t i = 0; i < out.pebbles.size(); ++i) {
        if (st.carry[i] && out.pebbles[i] == sys.robot) st.move.apply(out.pebbles[i]);
    }
    st.move.apply(out.robot);
    const Observation w = observe(out, flags, bits.next_bit());
    out.state = st.next[w.index()];
    out.step = sys.step + 1;
    return out;
}

Trajectory run(const RobotAutomaton& a, const FlagSet& flags, const RunOptions& opt, BitSource& bits) {
    if (flags.dim() != a.dimension) fail(Errc::dimension_mismatch, "flag set dimension mismatch");
    Trajectory traj;
    traj.state_visits.assign(a.states.size(), 0);
    SystemState sys = SystemState::initial(a);
    if (opt.track_visited) traj.visited.insert(sys.robot);

    // Coverage probe over the L1 ball of the given radius.
    std::unordered_map<Point, char, PointHash> ball_seen;
    std::uint64_t covered = 0;
    auto probe = [&](const Point& p) {
        if (opt.coverage_radius < 0) return;
        if (l1_norm(p) > opt.coverage_radius) return;
        char& fl = ball_seen[p];
        if (!fl) {
            fl = 1;
            ++covered;
        }
    };
    probe(sys.robot);
    std::size_t next_checkpoint = 0;
    auto emit_checkpoints = [&](std::uint64_t now) {
        while (next_checkpoint < opt.checkpoints.size() && opt.checkpoints[next_checkpoint] <= now) {
            traj.coverage.push_back({opt.checkpoints[next_checkpoint], covered});
            ++next_checkpoint;
        }
    };
    emit_checkpoints(0);

    for (std::uint64_t k = 0; k < opt.max_steps; ++k) {
        const StateId moving = sys.state;
        const AutomatonState& st = a.states[moving];
        // Inline move application; a pebble moves exactly when its carry bit
        // is set and it stands on the robot's pre-move cell.
        bool pebble_moved = false;
        for (std::size_t i = 0; i < sys.pebbles.size(); ++i) {
            if (st.carry[i] && sys.pebbles[i] == sys.robot) {
                st.move.apply(sys.pebbles[i]);
                pebble_moved = true;
                if (i == 0) {
                    ++traj.pebble_move_histogram[st.move];
                    if (opt.pebble_trail) traj.pebble_trail.emplace_back(traj.steps_taken + 1, st.move);
                }
            }
        }
        st.move.apply(sys.robot);
        const Observation w = observe(sys, flags, bits.next_bit());
        sys.state = st.next[w.index()];
        ++sys.step;
        ++traj.steps_taken;
        ++traj.state_visits[moving];
        if (st.role != StateRole::tree) ++traj.lattice_moves;
        if (pebble_moved) ++traj.pebble_moves;
        if (w.flag()) ++traj.flag_hits;
        if (opt.track_visited) traj.visited.insert(sys.robot);
        probe(sys.robot);
        emit_checkpoints(traj.steps_taken);
        if (opt.per_step_log) traj.log.push_back({traj.steps_taken, moving, sys.robot, w});
        if (opt.stop_after_lattice_moves && traj.lattice_moves >= opt.stop_after_lattice_moves) break;
        if (opt.stop_after_pebble_moves && traj.pebble_moves >= opt.stop_after_pebble_moves) break;
        if (opt.stop_on_origin_return && st.role != StateRole::tree &&
            l1_norm(sys.robot) == 0) {
            traj.origin_return_step = traj.steps_taken;
            break;
        }
    }
    traj.final_state = std::move(sys);
    return traj;
}

}  // namespace pw
