#include "pebblewalk/programs.hpp"

#include "pebblewalk/builder.hpp"

namespace pw {

namespace {

using Branch = AutomatonBuilder::Branch;
using Rule = AutomatonBuilder::Rule;

std::vector<Branch> uniform_plane(int axis_a, int axis_b, std::uint8_t carry_bit,
                                  std::vector<Rule> rules, std::size_t pebbles) {
    std::vector<Branch> out;
    std::vector<std::uint8_t> carry(pebbles, carry_bit);
    for (int axis : {axis_a, axis_b}) {
        for (int sign : {+1, -1}) {
            Branch b;
            b.prob = Rational(1, 4);
            b.move = Move::along(axis, sign);
            b.carry = carry;
            b.rules = rules;
            out.push_back(std::move(b));
        }
    }
    return out;
}

}  // namespace

ProgramDescriptor build_z2() {
    AutomatonBuilder b(2, 0);
    const StateId walk = b.declare("walk");
    b.choice(walk, uniform_plane(0, 1, 0, {AutomatonBuilder::to(walk)}, 0));
    b.set_initial(walk);
    return {"z2", 2, 0, FlagSet::none(2), b.build()};
}

ProgramDescriptor build_z4() {
    AutomatonBuilder b(4, 1);
    const StateId away = b.declare("away12");
    const StateId carry = b.declare("carry34");
    // Wander without the pebble until the coincidence bit fires post-move.
    b.choice(away, uniform_plane(0, 1, 0,
                                 {AutomatonBuilder::to(away), AutomatonBuilder::when(1, -1, carry)}, 1));
    // One pebble relocation, then wander again.
    b.choice(carry, uniform_plane(2, 3, 1, {AutomatonBuilder::to(away)}, 1));
    b.set_initial(away);
    return {"z4", 4, 1, FlagSet::none(4), b.build()};
}

namespace {

ProgramDescriptor build_flag_program(bool extend_z8) {
    const std::size_t k = extend_z8 ? 8 : 6;
    AutomatonBuilder b(k, 1);
    const StateId ex_clean = b.declare("ex12.clean");
    const StateId ex_seen = b.declare("ex12.seen");
    const StateId reloc12 = b.declare("reloc12");
    const StateId reloc34 = b.declare("reloc34");
    const StateId ex56 = b.declare("ex56");

    // In the Z^8 extension every flag-bit transition detours through a
    // 5-way (e7,e8) choice gadget parameterized by its continuation.
    StateId f_seen = ex_seen, f_reloc12 = reloc12, f_reloc34 = reloc34, f_ex56 = ex56,
            f_clean = ex_clean;
    if (extend_z8) {
        f_seen = b.declare("flag5.ex12seen");
        f_reloc12 = b.declare("flag5.reloc12");
        f_reloc34 = b.declare("flag5.reloc34");
        f_ex56 = b.declare("flag5.ex56");
        f_clean = b.declare("flag5.ex12clean");
    }

    // Excursion in (e1,e2), twinned: the seen tree is entered the moment any
    // step of the excursion observes the flag bit, and the latch clears on
    // pebble contact.
    const std::vector<Rule> clean_rules = {
        AutomatonBuilder::to(ex_clean),
        AutomatonBuilder::when(0, 1, f_seen),
        AutomatonBuilder::when(1, 0, reloc34),
        AutomatonBuilder::when(1, 1, f_reloc12),
    };
    const std::vector<Rule> seen_rules = {
        AutomatonBuilder::to(ex_seen),
        AutomatonBuilder::when(0, 1, f_seen),
        AutomatonBuilder::when(1, 0, reloc12),
        AutomatonBuilder::when(1, 1, f_reloc12),
    };
    b.choice_pair(ex_clean, uniform_plane(0, 1, 0, clean_rules, 1), ex_seen,
                  uniform_plane(0, 1, 0, seen_rules, 1));

    b.choice(reloc12, uniform_plane(0, 1, 1,
                                    {AutomatonBuilder::to(reloc34),
                                     AutomatonBuilder::when(-1, 1, f_reloc34)},
                                    1));
    b.choice(reloc34, uniform_plane(2, 3, 1,
                                    {AutomatonBuilder::to(ex56), AutomatonBuilder::when(-1, 1, f_ex56)},
                                    1));
    b.choice(ex56, uniform_plane(4, 5, 0,
                                 {AutomatonBuilder::to(ex56), AutomatonBuilder::when(0, 1, f_ex56),
                                  AutomatonBuilder::when(1, 0, ex_clean),
                                  AutomatonBuilder::when(1, 1, f_clean)},
                                 1));

    if (extend_z8) {
        const std::pair<StateId, StateId> gadgets[] = {
            {f_seen, ex_seen},   {f_reloc12, reloc12}, {f_reloc34, reloc34},
            {f_ex56, ex56},      {f_clean, ex_clean},
        };
        for (const auto& [gadget, cont] : gadgets) {
            std::vector<Branch> branches;
            const std::vector<std::uint8_t> carry(1, 1);
            for (Move mv : {Move::along(6, +1), Move::along(6, -1), Move::along(7, +1),
                            Move::along(7, -1)}) {
                Branch br;
                br.prob = Rational(1, 5);
                br.move = mv;
                br.carry = carry;
                br.rules = {AutomatonBuilder::to(cont)};
                branches.push_back(std::move(br));
            }
            Branch stay;
            stay.prob = Rational(1, 5);
            stay.move = Move::along(6, +1);
            stay.carry = carry;
            stay.has_follow = true;
            stay.follow_move = Move::along(6, -1);
            stay.follow_carry = carry;
            stay.rules = {AutomatonBuilder::to(cont)};
            stay.label = "stay";
            branches.push_back(std::move(stay));
            b.choice(gadget, std::move(branches));
        }
    }

    b.set_initial(ex_clean);

    FlagSet flags = extend_z8
                        ? FlagSet::subspace(AffineSubspace(
                              Point::origin(8), {{0, 0, 0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 0, 0, 1}}))
                        : FlagSet::subspace(AffineSubspace::point(Point::origin(6)));
    return {extend_z8 ? "z8" : "z6", k, 1, std::move(flags), b.build()};
}

}  // namespace

ProgramDescriptor build_z6() { return build_flag_program(false); }

ProgramDescriptor build_z8() { return build_flag_program(true); }

const std::vector<std::string>& program_names() {
    static const std::vector<std::string> names = {"z2", "z4", "z6", "z8"};
    return names;
}

ProgramDescriptor build_program(const std::string& name) {
    if (name == "z2") return build_z2();
    if (name == "z4") return build_z4();
    if (name == "z6") return build_z6();
    if (name == "z8") return build_z8();
    fail(Errc::usage, "unknown program '" + name + "' (expected z2, z4, z6 or z8)");
}

}  // namespace pw
