#pragma once

#include "pebblewalk/automaton.hpp"

#include <map>
#include <string>
#include <vector>

namespace pw {

/// Assembles robot automata from reactive states and rational choice points.
///
/// A choice point with branch probabilities p'_i/q becomes a balanced binary
/// coin tree: depth t = 2q for non-dyadic q (smallest even t with 2^t >= q
/// when q is a power of two), whose 2^t leaf slots are allocated
/// contiguously to the branches and, for non-dyadic q, to restart slots that
/// route back to the choice point through one extra cancel pair. Tree moves
/// alternate +e/-e along a single axis so every choice-to-commit path and
/// every restart cycle has zero net displacement. Structurally identical
/// subtrees are shared per depth, so state count grows with t, not 2^t.
class AutomatonBuilder {
public:
    AutomatonBuilder(std::size_t dimension, std::size_t pebble_count);

    /// Observation-pattern routing rule; -1 entries are wildcards. Rules are
    /// applied in order, later rules override earlier ones.
    struct Rule {
        std::vector<int> pebble;  // per-pebble constraint, empty = all wildcard
        int flag = -1;
        int coin = -1;
        StateId target = 0;
    };

    static Rule to(StateId target) { return Rule{{}, -1, -1, target}; }
    static Rule when(int pebble1, int flag, StateId target) {
        Rule r{{}, flag, -1, target};
        if (pebble1 >= 0) r.pebble = {pebble1};
        return r;
    }
    static Rule when_coin(int coin, StateId target) { return Rule{{}, -1, coin, target}; }

    struct Branch {
        Rational prob;
        Move move;
        std::vector<std::uint8_t> carry;
        std::vector<Rule> rules;
        bool has_follow = false;  // commit as a two-move pair (e.g. +e then -e)
        Move follow_move;
        std::vector<std::uint8_t> follow_carry;
        std::string label;
    };

    StateId declare(const std::string& name);

    void reactive(StateId id, Move move, std::vector<std::uint8_t> carry, std::vector<Rule> rules,
                  StateRole role = StateRole::policy);

    void choice(StateId id, std::vector<Branch> branches);

    /// Twin choice gadgets for excursions that latch flag sightings: both
    /// expand to trees of identical shape, and every step of the clean tree
    /// reroutes to the corresponding node of the seen tree when the flag bit
    /// is observed. Branch probabilities and moves must match pairwise.
    void choice_pair(StateId clean, std::vector<Branch> clean_branches, StateId seen,
                     std::vector<Branch> seen_branches);

    void set_initial(StateId id);

    RobotAutomaton build();

private:
    struct Layout;

    StateId new_state(const std::string& name, Move move, std::vector<std::uint8_t> carry,
                      StateRole role);
    void set_rules(StateId id, const std::vector<Rule>& rules);
    Layout layout_of(const std::string& name, const std::vector<Branch>& branches) const;
    StateId commit_chain(const std::string& prefix, const Branch& branch, std::size_t index,
                         GadgetRecord& record);
    void expand(StateId clean, const std::vector<Branch>& cb, StateId seen,
                const std::vector<Branch>& sb);  // seen == clean for untwinned gadgets

    RobotAutomaton a_;
    std::vector<char> defined_;
    bool initial_set_ = false;
};

}  // namespace pw
