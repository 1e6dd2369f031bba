#include "pebblewalk/builder.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <algorithm>
#include <map>

namespace pw {

namespace {

constexpr StateId kUnset = static_cast<StateId>(-1);

Move cancel_move(int axis, int depth) {
    return Move::along(axis, (depth % 2 == 0) ? +1 : -1);
}

}  // namespace

struct AutomatonBuilder::Layout {
    std::uint64_t common_den = 1;
    std::vector<std::uint64_t> slots_per_branch;
    int depth = 0;
    std::uint64_t slots = 1;
    std::uint64_t restart_slots = 0;
    int axis = 0;
};

AutomatonBuilder::AutomatonBuilder(std::size_t dimension, std::size_t pebble_count) {
    require(dimension >= 1, Errc::validation, "dimension must be >= 1");
    a_.dimension = dimension;
    a_.pebble_count = pebble_count;
}

StateId AutomatonBuilder::declare(const std::string& name) {
    if (a_.find_state(name)) fail(Errc::validation, "duplicate state name '" + name + "'");
    AutomatonState s;
    s.name = name;
    a_.states.push_back(std::move(s));
    defined_.push_back(0);
    return static_cast<StateId>(a_.states.size() - 1);
}

StateId AutomatonBuilder::new_state(const std::string& name, Move move,
                                    std::vector<std::uint8_t> carry, StateRole role) {
    StateId id = declare(name);
    AutomatonState& s = a_.states[id];
    s.move = move;
    if (carry.empty()) carry.assign(a_.pebble_count, 0);
    require(carry.size() == a_.pebble_count, Errc::validation,
            "state '" + name + "': carry mask width mismatch");
    s.carry = std::move(carry);
    s.role = role;
    return id;
}

void AutomatonBuilder::set_rules(StateId id, const std::vector<Rule>& rules) {
    AutomatonState& s = a_.states[id];
    const std::uint32_t tsize = a_.table_size();
    const std::uint32_t n = static_cast<std::uint32_t>(a_.pebble_count);
    s.next.assign(tsize, kUnset);
    for (std::uint32_t obs = 0; obs < tsize; ++obs) {
        for (const Rule& r : rules) {
            bool ok = true;
            for (std::size_t i = 0; i < r.pebble.size() && ok; ++i) {
                if (r.pebble[i] >= 0 && ((obs >> i) & 1u) != static_cast<std::uint32_t>(r.pebble[i]))
                    ok = false;
            }
            if (ok && r.flag >= 0 && ((obs >> n) & 1u) != static_cast<std::uint32_t>(r.flag)) ok = false;
            if (ok && r.coin >= 0 && ((obs >> (n + 1)) & 1u) != static_cast<std::uint32_t>(r.coin)) ok = false;
            if (ok) s.next[obs] = r.target;
        }
        if (s.next[obs] == kUnset) {
            fail(Errc::validation, "state '" + s.name + "': no routing rule covers observation " +
                                       Observation::from_index(n, obs).str());
        }
    }
    defined_[id] = 1;
}

void AutomatonBuilder::reactive(StateId id, Move move, std::vector<std::uint8_t> carry,
                                std::vector<Rule> rules, StateRole role) {
    require(id < a_.states.size() && !defined_[id], Errc::validation, "state already defined");
    AutomatonState& s = a_.states[id];
    s.move = move;
    if (carry.empty()) carry.assign(a_.pebble_count, 0);
    require(carry.size() == a_.pebble_count, Errc::validation,
            "state '" + s.name + "': carry mask width mismatch");
    s.carry = std::move(carry);
    s.role = role;
    set_rules(id, rules);
}

AutomatonBuilder::Layout AutomatonBuilder::layout_of(const std::string& name,
                                                     const std::vector<Branch>& branches) const {
    require(!branches.empty(), Errc::validation, "choice '" + name + "' has no branches");
    Rational sum = 0;
    BigInt den = 1;
    for (const auto& b : branches) {
        if (b.prob <= 0) fail(Errc::validation, "choice '" + name + "': branch probability must be positive");
        sum += b.prob;
        den = boost::integer::lcm(den, BigInt(denominator(b.prob)));
    }
    if (sum != 1) fail(Errc::validation, "choice '" + name + "': branch probabilities must sum to 1");

    Layout l;
    if (branches.size() == 1) return l;  // degenerate, no tree

    const bool dyadic = (den & (den - 1)) == 0;
    int log2q = 0;
    for (BigInt v = den; v > 1; v >>= 1) ++log2q;
    if (dyadic) {
        l.depth = std::max(2, log2q + (log2q & 1));
    } else {
        if (den > 31) {
            fail(Errc::resource, "choice '" + name + "': common denominator " + den.str() +
                                     " needs a coin tree of depth " + BigInt(2 * den).str() +
                                     "; denominators above 31 are not supported");
        }
        l.depth = 2 * static_cast<int>(den);
    }
    l.common_den = static_cast<std::uint64_t>(den);
    l.slots = 1ull << l.depth;
    const std::uint64_t scale = dyadic ? l.slots / l.common_den : 1;
    std::uint64_t used = 0;
    for (const auto& b : branches) {
        BigInt numer = BigInt(numerator(b.prob)) * (den / BigInt(denominator(b.prob)));
        std::uint64_t a = numer.convert_to<std::uint64_t>() * scale;
        l.slots_per_branch.push_back(a);
        used += a;
    }
    l.restart_slots = l.slots - used;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        if (!branches[i].move.is_zero()) {
            l.axis = branches[i].move.axis;
            break;
        }
    }
    return l;
}

StateId AutomatonBuilder::commit_chain(const std::string& prefix, const Branch& branch,
                                       std::size_t index, GadgetRecord& record) {
    const std::string label = branch.label.empty() ? "b" + std::to_string(index + 1) : branch.label;
    StateId first = new_state(prefix + ".go." + label, branch.move, branch.carry, StateRole::commit);
    if (branch.has_follow) {
        StateId second = new_state(prefix + ".go." + label + ".2", branch.follow_move,
                                   branch.follow_carry, StateRole::commit);
        set_rules(first, {to(second)});
        set_rules(second, branch.rules);
    } else {
        set_rules(first, branch.rules);
    }
    record.commits.push_back(first);
    return first;
}

void AutomatonBuilder::choice(StateId id, std::vector<Branch> branches) {
    expand(id, branches, id, branches);
}

void AutomatonBuilder::choice_pair(StateId clean, std::vector<Branch> clean_branches, StateId seen,
                                   std::vector<Branch> seen_branches) {
    require(clean != seen, Errc::validation, "choice_pair needs two distinct states");
    require(clean_branches.size() == seen_branches.size(), Errc::validation,
            "twin choices must have the same branch count");
    for (std::size_t i = 0; i < clean_branches.size(); ++i) {
        if (clean_branches[i].prob != seen_branches[i].prob ||
            clean_branches[i].move != seen_branches[i].move) {
            fail(Errc::validation, "twin choices must agree on branch probabilities and moves");
        }
    }
    expand(clean, clean_branches, seen, seen_branches);
}

void AutomatonBuilder::expand(StateId clean, const std::vector<Branch>& cb, StateId seen,
                              const std::vector<Branch>& sb) {
    require(clean < a_.states.size() && !defined_[clean], Errc::validation, "state already defined");
    const bool twinned = clean != seen;
    if (twinned) require(!defined_[seen], Errc::validation, "state already defined");

    const Layout l = layout_of(a_.states[clean].name, cb);

    GadgetRecord grec_c;
    grec_c.name = a_.states[clean].name;
    grec_c.root = clean;
    grec_c.depth = l.depth;
    grec_c.slot_counts = l.slots_per_branch;
    grec_c.restart_slots = l.restart_slots;
    for (const auto& b : cb) grec_c.branch_probs.push_back(b.prob);
    GadgetRecord grec_s = grec_c;
    grec_s.name = a_.states[seen].name;
    grec_s.root = seen;

    if (cb.size() == 1) {
        // Single-branch choice: the state itself commits the move.
        const Branch& b = cb[0];
        const std::string base_name = a_.states[clean].name;
        StateId tail = clean;
        a_.states[clean].move = b.move;
        a_.states[clean].carry = b.carry.empty() ? std::vector<std::uint8_t>(a_.pebble_count, 0) : b.carry;
        a_.states[clean].role = StateRole::commit;
        if (b.has_follow) {
            StateId second = new_state(base_name + ".2", b.follow_move, b.follow_carry,
                                       StateRole::commit);
            set_rules(second, b.rules);
            set_rules(tail, {to(second)});
        } else {
            set_rules(tail, b.rules);
        }
        grec_c.commits = {clean};
        grec_c.slot_counts = {1};
        a_.gadgets.push_back(std::move(grec_c));
        require(!twinned, Errc::validation, "twin choices need at least two branches");
        return;
    }

    // By value: new_state() reallocates the state vector.
    const std::string cname = a_.states[clean].name;
    const std::string sname = a_.states[seen].name;

    // Commit chains and restart pair per side.
    std::vector<StateId> commit_c, commit_s;
    for (std::size_t i = 0; i < cb.size(); ++i) commit_c.push_back(commit_chain(cname, cb[i], i, grec_c));
    if (twinned) {
        for (std::size_t i = 0; i < sb.size(); ++i) commit_s.push_back(commit_chain(sname, sb[i], i, grec_s));
    } else {
        commit_s = commit_c;
    }

    StateId retry_c = kUnset, relay_c = kUnset, retry_s = kUnset, relay_s = kUnset;
    if (l.restart_slots > 0) {
        retry_c = new_state(cname + ".retry", cancel_move(l.axis, 0), {}, StateRole::tree);
        relay_c = new_state(cname + ".retry2", cancel_move(l.axis, 1), {}, StateRole::tree);
        grec_c.states.push_back(retry_c);
        grec_c.states.push_back(relay_c);
        if (twinned) {
            retry_s = new_state(sname + ".retry", cancel_move(l.axis, 0), {}, StateRole::tree);
            relay_s = new_state(sname + ".retry2", cancel_move(l.axis, 1), {}, StateRole::tree);
            grec_s.states.push_back(retry_s);
            grec_s.states.push_back(relay_s);
            set_rules(retry_c, {when(-1, 0, relay_c), when(-1, 1, relay_s)});
            set_rules(relay_c, {when(-1, 0, clean), when(-1, 1, seen)});
            set_rules(retry_s, {to(relay_s)});
            set_rules(relay_s, {to(seen)});
        } else {
            set_rules(retry_c, {to(relay_c)});
            set_rules(relay_c, {to(clean)});
        }
        retry_s = twinned ? retry_s : retry_c;
    }

    // Slot -> outcome: branches first, restart slots last.
    std::vector<std::uint64_t> bounds;  // cumulative slot boundaries per branch
    std::uint64_t acc = 0;
    for (std::uint64_t v : l.slots_per_branch) {
        acc += v;
        bounds.push_back(acc);
    }
    auto outcome_of = [&](std::uint64_t slot) -> std::size_t {
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(bounds.begin(), bounds.end(), slot) - bounds.begin());
        return i;  // == branches.size() for restart
    };
    auto leaf_pair = [&](std::size_t outcome) -> std::pair<StateId, StateId> {
        if (outcome < commit_c.size()) return {commit_c[outcome], commit_s[outcome]};
        return {retry_c, retry_s};
    };

    // Shared-subtree expansion; memo key = (depth, outcome) for pure ranges.
    std::map<std::pair<int, std::size_t>, std::pair<StateId, StateId>> memo;
    int mixed_counter = 0;
    auto node_pair = [&](auto&& self, int depth, std::uint64_t lo,
                         std::uint64_t hi) -> std::pair<StateId, StateId> {
        if (depth == l.depth) return leaf_pair(outcome_of(lo));
        const std::size_t first = outcome_of(lo), last = outcome_of(hi - 1);
        if (first == last) {
            auto key = std::make_pair(depth, first);
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            const std::uint64_t mid = lo + (hi - lo) / 2;
            auto child = self(self, depth + 1, lo, mid);
            std::string tag = ".d" + std::to_string(depth) + "." +
                              (first < cb.size() ? "b" + std::to_string(first + 1) : "r");
            StateId nc = new_state(cname + tag, cancel_move(l.axis, depth), {}, StateRole::tree);
            grec_c.states.push_back(nc);
            StateId ns = nc;
            if (twinned) {
                ns = new_state(sname + tag, cancel_move(l.axis, depth), {}, StateRole::tree);
                grec_s.states.push_back(ns);
                set_rules(nc, {when(-1, 0, child.first), when(-1, 1, child.second)});
                set_rules(ns, {to(child.second)});
            } else {
                set_rules(nc, {to(child.first)});
            }
            memo.emplace(key, std::make_pair(nc, ns));
            return {nc, ns};
        }
        const std::uint64_t mid = lo + (hi - lo) / 2;
        auto left = self(self, depth + 1, lo, mid);
        auto right = self(self, depth + 1, mid, hi);
        std::string tag = ".d" + std::to_string(depth) + ".m" + std::to_string(mixed_counter++);
        StateId nc = new_state(cname + tag, cancel_move(l.axis, depth), {}, StateRole::tree);
        grec_c.states.push_back(nc);
        StateId ns = nc;
        if (twinned) {
            ns = new_state(sname + tag, cancel_move(l.axis, depth), {}, StateRole::tree);
            grec_s.states.push_back(ns);
            set_rules(nc, {Rule{{}, 0, 0, left.first}, Rule{{}, 0, 1, right.first},
                           Rule{{}, 1, 0, left.second}, Rule{{}, 1, 1, right.second}});
            set_rules(ns, {when_coin(0, left.second), when_coin(1, right.second)});
        } else {
            set_rules(nc, {when_coin(0, left.first), when_coin(1, right.first)});
        }
        return {nc, ns};
    };

    const std::uint64_t mid = l.slots / 2;
    auto left = node_pair(node_pair, 1, 0, mid);
    auto right = node_pair(node_pair, 1, mid, l.slots);

    // The declared choice states are the depth-0 roots.
    a_.states[clean].move = cancel_move(l.axis, 0);
    a_.states[clean].carry.assign(a_.pebble_count, 0);
    a_.states[clean].role = StateRole::tree;
    grec_c.states.insert(grec_c.states.begin(), clean);
    if (twinned) {
        a_.states[seen].move = cancel_move(l.axis, 0);
        a_.states[seen].carry.assign(a_.pebble_count, 0);
        a_.states[seen].role = StateRole::tree;
        grec_s.states.insert(grec_s.states.begin(), seen);
        set_rules(clean, {Rule{{}, 0, 0, left.first}, Rule{{}, 0, 1, right.first},
                          Rule{{}, 1, 0, left.second}, Rule{{}, 1, 1, right.second}});
        set_rules(seen, {when_coin(0, left.second), when_coin(1, right.second)});
    } else {
        set_rules(clean, {when_coin(0, left.first), when_coin(1, right.first)});
    }

    a_.gadgets.push_back(std::move(grec_c));
    if (twinned) a_.gadgets.push_back(std::move(grec_s));
}

void AutomatonBuilder::set_initial(StateId id) {
    require(id < a_.states.size(), Errc::validation, "initial state out of range");
    a_.initial = id;
    initial_set_ = true;
}

RobotAutomaton AutomatonBuilder::build() {
    require(initial_set_, Errc::validation, "initial state not set");
    for (StateId i = 0; i < a_.states.size(); ++i) {
        if (!defined_[i]) {
            fail(Errc::validation, "state '" + a_.states[i].name + "' declared but never defined");
        }
    }
    a_.validate();
    return std::move(a_);
}

}  // namespace pw
