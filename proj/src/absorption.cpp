#include "pebblewalk/absorption.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace pw {

namespace {

struct Chain {
    // row[s] = outgoing probability mass per target, targets in region or outside
    std::unordered_map<StateId, std::unordered_map<StateId, Rational>> rows;
    std::unordered_map<StateId, std::unordered_set<StateId>> preds;  // region predecessors
};

}  // namespace

std::map<StateId, Rational> absorption_probabilities(const RobotAutomaton& a, StateId start,
                                                     const std::vector<StateId>& region,
                                                     const std::vector<StateId>& exits,
                                                     std::uint32_t context_bits) {
    std::unordered_set<StateId> in_region(region.begin(), region.end());
    std::unordered_set<StateId> exit_set(exits.begin(), exits.end());
    require(in_region.count(start) != 0, Errc::validation, "start state must be in the region");
    for (StateId e : exits) {
        if (in_region.count(e)) {
            fail(Errc::validation, "exit state '" + a.states[e].name + "' is inside the region");
        }
    }

    const std::uint32_t coin_bit = 1u << (a.pebble_count + 1);
    const std::uint32_t ctx = context_bits & ~coin_bit;
    auto successor = [&](StateId s, int coin) {
        return a.states[s].next[ctx | (coin ? coin_bit : 0u)];
    };

    // Every region state must reach an exit; otherwise report the trapped set.
    {
        // Reverse reachability from exits over region edges.
        std::unordered_map<StateId, std::vector<StateId>> rpred;
        for (StateId s : region) {
            for (int c = 0; c < 2; ++c) rpred[successor(s, c)].push_back(s);
        }
        std::unordered_set<StateId> alive;
        std::deque<StateId> queue;
        for (StateId s : region) {
            for (int c = 0; c < 2; ++c) {
                StateId t = successor(s, c);
                if (!in_region.count(t) && !alive.count(s)) {
                    alive.insert(s);
                    queue.push_back(s);
                }
            }
        }
        while (!queue.empty()) {
            StateId s = queue.front();
            queue.pop_front();
            for (StateId p : rpred[s]) {
                if (in_region.count(p) && !alive.count(p)) {
                    alive.insert(p);
                    queue.push_back(p);
                }
            }
        }
        if (alive.size() != in_region.size()) {
            std::string names;
            for (StateId s : region) {
                if (!alive.count(s)) {
                    if (!names.empty()) names += ", ";
                    names += a.states[s].name;
                }
            }
            fail(Errc::trapped_states, "region states cannot reach any exit: " + names);
        }
    }

    Chain ch;
    const Rational half(1, 2);
    for (StateId s : region) {
        auto& row = ch.rows[s];
        for (int c = 0; c < 2; ++c) row[successor(s, c)] += half;
        for (auto& [t, p] : row) {
            if (in_region.count(t)) ch.preds[t].insert(s);
        }
    }

    // Eliminate region states deepest-first (reverse of the given order);
    // for compiled gadgets this order splices trees leaf-to-root with no
    // fill-in beyond the exit columns.
    for (auto it = region.rbegin(); it != region.rend(); ++it) {
        const StateId s = *it;
        if (s == start) continue;
        auto row = std::move(ch.rows[s]);
        ch.rows.erase(s);
        auto self = row.find(s);
        if (self != row.end()) {
            Rational keep = 1 - self->second;
            require(keep > 0, Errc::trapped_states,
                    "state '" + a.states[s].name + "' loops with probability 1");
            row.erase(self);
            for (auto& [t, p] : row) p /= keep;
        }
        auto pit = ch.preds.find(s);
        if (pit == ch.preds.end()) continue;
        for (StateId p : pit->second) {
            if (p == s) continue;
            auto prow = ch.rows.find(p);
            if (prow == ch.rows.end()) continue;
            auto edge = prow->second.find(s);
            if (edge == prow->second.end()) continue;
            const Rational w = edge->second;
            prow->second.erase(edge);
            for (const auto& [t, v] : row) {
                prow->second[t] += w * v;
                if (in_region.count(t)) ch.preds[t].insert(p);
            }
        }
        ch.preds.erase(pit);
    }

    auto& srow = ch.rows[start];
    auto self = srow.find(start);
    if (self != srow.end()) {
        Rational keep = 1 - self->second;
        require(keep > 0, Errc::trapped_states, "start state never leaves the region");
        srow.erase(start);
        for (auto& [t, p] : srow) p /= keep;
    }

    std::map<StateId, Rational> result;
    for (StateId e : exits) result[e] = 0;
    Rational total = 0;
    for (const auto& [t, p] : srow) {
        if (!exit_set.count(t)) {
            fail(Errc::validation,
                 "region leaks to state '" + a.states[t].name + "' which is not a listed exit");
        }
        result[t] = p;
        total += p;
    }
    require(total == 1, Errc::validation, "absorption probabilities do not sum to 1");
    return result;
}

std::map<StateId, Rational> absorption_probabilities(const RobotAutomaton& a,
                                                     const GadgetRecord& gadget) {
    if (gadget.depth == 0) {
        // Degenerate single-branch gadget: the root itself commits.
        std::map<StateId, Rational> r;
        for (StateId c : gadget.commits) r[c] = 1;
        return r;
    }
    return absorption_probabilities(a, gadget.root, gadget.states, gadget.commits);
}

}  // namespace pw
