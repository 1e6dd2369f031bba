#include "pebblewalk/automaton_io.hpp"

#include "pebblewalk/builder.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace pw {

namespace {

struct Cursor {
    std::string source;
    int line = 0;
};

[[noreturn]] void parse_fail(const Cursor& c, int column, const std::string& msg) {
    throw Error(Errc::parse, c.source + ":" + std::to_string(c.line) + ":" + std::to_string(column) +
                                 ": " + msg,
                c.line, column);
}

struct Tokens {
    std::vector<std::string> words;
    std::vector<int> columns;  // 1-based start column per word
};

Tokens split(const std::string& line) {
    Tokens t;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') break;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        t.words.push_back(line.substr(i, j - i));
        t.columns.push_back(static_cast<int>(i) + 1);
        i = j;
    }
    return t;
}

std::uint64_t parse_uint(const Cursor& c, const Tokens& t, std::size_t idx) {
    const std::string& w = t.words[idx];
    std::uint64_t v = 0;
    for (char ch : w) {
        if (ch < '0' || ch > '9') parse_fail(c, t.columns[idx], "expected a number, got '" + w + "'");
        v = v * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    return v;
}

Rational parse_rational(const Cursor& c, const Tokens& t, std::size_t idx) {
    const std::string& w = t.words[idx];
    auto slash = w.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(w));
        return Rational(BigInt(w.substr(0, slash)), BigInt(w.substr(slash + 1)));
    } catch (const std::exception&) {
        parse_fail(c, t.columns[idx], "bad rational '" + w + "'");
    }
}

std::vector<std::uint8_t> parse_carry(const Cursor& c, const Tokens& t, std::size_t idx,
                                      std::size_t pebbles) {
    const std::string& w = t.words[idx];
    if (w == "-") {
        if (pebbles != 0) parse_fail(c, t.columns[idx], "carry '-' but automaton has pebbles");
        return {};
    }
    if (w.size() != pebbles) {
        parse_fail(c, t.columns[idx],
                   "carry mask must have " + std::to_string(pebbles) + " bits");
    }
    std::vector<std::uint8_t> out;
    for (char ch : w) {
        if (ch != '0' && ch != '1') parse_fail(c, t.columns[idx], "carry mask digits must be 0/1");
        out.push_back(ch == '1');
    }
    return out;
}

Move parse_move(const Cursor& c, const Tokens& t, std::size_t idx) {
    try {
        return Move::parse(t.words[idx]);
    } catch (const Error& e) {
        parse_fail(c, t.columns[idx], e.what());
    }
}

std::string carry_str(const std::vector<std::uint8_t>& carry) {
    if (carry.empty()) return "-";
    std::string s;
    for (auto b : carry) s += b ? '1' : '0';
    return s;
}

}  // namespace

AutFile parse_aut(std::istream& in, const std::string& source_name) {
    AutFile f;
    Cursor cur{source_name, 0};
    std::string line;
    bool header_seen = false, dim_seen = false, peb_seen = false;
    AutFile::DetState* det = nullptr;
    AutFile::RatState* rat = nullptr;

    while (std::getline(in, line)) {
        ++cur.line;
        Tokens t = split(line);
        if (t.words.empty()) continue;
        const std::string& kw = t.words[0];
        auto need = [&](std::size_t count, const char* usage) {
            if (t.words.size() != count) parse_fail(cur, t.columns[0], std::string("usage: ") + usage);
        };
        if (kw == "automaton") {
            need(2, "automaton v1");
            if (t.words[1] != "v1") parse_fail(cur, t.columns[1], "unsupported version '" + t.words[1] + "'");
            header_seen = true;
        } else if (kw == "dimension") {
            need(2, "dimension <k>");
            f.dimension = parse_uint(cur, t, 1);
            if (f.dimension < 1) parse_fail(cur, t.columns[1], "dimension must be >= 1");
            dim_seen = true;
        } else if (kw == "pebbles") {
            need(2, "pebbles <n>");
            f.pebbles = parse_uint(cur, t, 1);
            peb_seen = true;
        } else if (kw == "start") {
            need(2, "start <state>");
            f.start = t.words[1];
        } else if (kw == "flagset") {
            if (!dim_seen) parse_fail(cur, t.columns[0], "flagset before dimension header");
            if (t.words.size() == 2 && t.words[1] == "none") {
                f.flag_kind = AutFile::Flags::none;
            } else if (t.words.size() == f.dimension + 2 &&
                       (t.words[1] == "point" || t.words[1] == "base")) {
                f.flag_kind = t.words[1] == "point" ? AutFile::Flags::point : AutFile::Flags::span;
                f.flag_base.clear();
                for (std::size_t i = 2; i < t.words.size(); ++i) {
                    try {
                        f.flag_base.push_back(std::stoll(t.words[i]));
                    } catch (const std::exception&) {
                        parse_fail(cur, t.columns[i], "bad coordinate '" + t.words[i] + "'");
                    }
                }
            } else {
                parse_fail(cur, t.columns[0], "usage: flagset none | point <coords> | base <coords>");
            }
        } else if (kw == "flagbasis") {
            if (f.flag_kind != AutFile::Flags::span)
                parse_fail(cur, t.columns[0], "flagbasis requires a preceding 'flagset base' line");
            if (t.words.size() != f.dimension + 1)
                parse_fail(cur, t.columns[0], "flagbasis needs one coordinate per dimension");
            std::vector<std::int64_t> v;
            for (std::size_t i = 1; i < t.words.size(); ++i) {
                try {
                    v.push_back(std::stoll(t.words[i]));
                } catch (const std::exception&) {
                    parse_fail(cur, t.columns[i], "bad coordinate '" + t.words[i] + "'");
                }
            }
            f.flag_basis.push_back(std::move(v));
        } else if (kw == "state") {
            if (!dim_seen || !peb_seen) parse_fail(cur, t.columns[0], "state before dimension/pebbles header");
            // state <name> move <mv> carry <mask> [role <role>]
            if ((t.words.size() != 6 && t.words.size() != 8) || t.words[2] != "move" ||
                t.words[4] != "carry") {
                parse_fail(cur, t.columns[0], "usage: state <name> move <mv> carry <mask> [role <r>]");
            }
            AutFile::DetState s;
            s.name = t.words[1];
            s.move = parse_move(cur, t, 3);
            s.carry = parse_carry(cur, t, 5, f.pebbles);
            if (t.words.size() == 8) {
                if (t.words[6] != "role") parse_fail(cur, t.columns[6], "expected 'role'");
                try {
                    s.role = role_parse(t.words[7]);
                } catch (const Error& e) {
                    parse_fail(cur, t.columns[7], e.what());
                }
            }
            s.line = cur.line;
            f.det.push_back(std::move(s));
            det = &f.det.back();
            rat = nullptr;
        } else if (kw == "next") {
            if (!det) parse_fail(cur, t.columns[0], "'next' outside a deterministic state record");
            need(3, "next <pattern> <target>");
            const std::string& pat = t.words[1];
            if (pat.size() != f.pebbles + 2) {
                parse_fail(cur, t.columns[1],
                           "pattern must have " + std::to_string(f.pebbles + 2) + " bits");
            }
            for (char ch : pat) {
                if (ch != '0' && ch != '1' && ch != '*')
                    parse_fail(cur, t.columns[1], "pattern digits must be 0, 1 or *");
            }
            det->rules.emplace_back(pat, t.words[2]);
        } else if (kw == "rational") {
            if (!dim_seen || !peb_seen)
                parse_fail(cur, t.columns[0], "rational before dimension/pebbles header");
            if (t.words.size() != 2 && !(t.words.size() == 3 && t.words[2] == "terminal"))
                parse_fail(cur, t.columns[0], "usage: rational <name> [terminal]");
            AutFile::RatState s;
            s.name = t.words[1];
            s.terminal = t.words.size() == 3;
            s.line = cur.line;
            f.rat.push_back(std::move(s));
            rat = &f.rat.back();
            det = nullptr;
        } else if (kw == "branch") {
            if (!rat) parse_fail(cur, t.columns[0], "'branch' outside a rational state record");
            need(8, "branch <p/q> move <mv> carry <mask> next <target>");
            if (t.words[2] != "move" || t.words[4] != "carry" || t.words[6] != "next")
                parse_fail(cur, t.columns[0], "usage: branch <p/q> move <mv> carry <mask> next <target>");
            RationalBranch br;
            br.prob = parse_rational(cur, t, 1);
            br.move = parse_move(cur, t, 3);
            br.carry = parse_carry(cur, t, 5, f.pebbles);
            br.target = t.words[7];
            rat->branches.push_back(std::move(br));
        } else {
            parse_fail(cur, t.columns[0], "unknown keyword '" + kw + "'");
        }
    }
    cur.line += 1;
    if (!header_seen) parse_fail(cur, 1, "missing 'automaton v1' header");
    if (!dim_seen || !peb_seen) parse_fail(cur, 1, "missing dimension/pebbles header");
    if (f.start.empty()) parse_fail(cur, 1, "missing 'start' line");
    if (f.det.empty() && f.rat.empty()) parse_fail(cur, 1, "no state records");
    return f;
}

AutFile parse_aut_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open '" + path + "'");
    return parse_aut(in, path);
}

RobotAutomaton to_robot(const AutFile& f) {
    AutomatonBuilder b(f.dimension, f.pebbles);
    std::map<std::string, StateId> id_of;
    for (const auto& s : f.det) id_of[s.name] = b.declare(s.name);
    for (const auto& s : f.rat) id_of[s.name] = b.declare(s.name);

    auto lookup = [&](const std::string& name, int line) {
        auto it = id_of.find(name);
        if (it == id_of.end()) {
            throw Error(Errc::parse, "unknown target state '" + name + "' (record at line " +
                                         std::to_string(line) + ")",
                        line, 1);
        }
        return it->second;
    };

    for (const auto& s : f.det) {
        std::vector<AutomatonBuilder::Rule> rules;
        for (const auto& [pat, target] : s.rules) {
            AutomatonBuilder::Rule r;
            for (std::size_t i = 0; i < f.pebbles; ++i) {
                r.pebble.push_back(pat[i] == '*' ? -1 : pat[i] - '0');
            }
            r.flag = pat[f.pebbles] == '*' ? -1 : pat[f.pebbles] - '0';
            r.coin = pat[f.pebbles + 1] == '*' ? -1 : pat[f.pebbles + 1] - '0';
            r.target = lookup(target, s.line);
            rules.push_back(std::move(r));
        }
        try {
            b.reactive(id_of[s.name], s.move, s.carry, std::move(rules), s.role);
        } catch (const Error& e) {
            if (e.code == Errc::parse) throw;
            throw Error(Errc::parse, std::string(e.what()) + " (record at line " +
                                         std::to_string(s.line) + ")",
                        s.line, 1);
        }
    }
    for (const auto& s : f.rat) {
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
            br.rules = {AutomatonBuilder::to(lookup(t.target, s.line))};
            branches.push_back(std::move(br));
        }
        try {
            b.choice(id_of[s.name], std::move(branches));
        } catch (const Error& e) {
            if (e.code == Errc::parse) throw;
            throw Error(Errc::parse, std::string(e.what()) + " (record at line " +
                                         std::to_string(s.line) + ")",
                        s.line, 1);
        }
    }
    auto it = id_of.find(f.start);
    if (it == id_of.end()) {
        throw Error(Errc::parse, "start state '" + f.start + "' has no record", 1, 1);
    }
    b.set_initial(it->second);
    return b.build();
}

RationalAutomaton to_rational(const AutFile& f) {
    if (!f.pure_rational()) {
        fail(Errc::validation, "file mixes deterministic records; not a pure rational automaton");
    }
    RationalAutomaton ra;
    ra.dimension = f.dimension;
    ra.pebble_count = f.pebbles;
    ra.initial = f.start;
    for (const auto& s : f.rat) {
        RationalState rs;
        rs.name = s.name;
        rs.terminal = s.terminal;
        rs.branches = s.branches;
        ra.states.push_back(std::move(rs));
    }
    ra.validate();
    return ra;
}

FlagSet to_flagset(const AutFile& f) {
    switch (f.flag_kind) {
        case AutFile::Flags::none:
            return FlagSet::none(f.dimension);
        case AutFile::Flags::point:
            return FlagSet::subspace(AffineSubspace::point(Point(f.flag_base)));
        case AutFile::Flags::span:
            return FlagSet::subspace(AffineSubspace(Point(f.flag_base), f.flag_basis));
    }
    return FlagSet::none(f.dimension);
}

static void write_flags(std::ostream& out, const FlagSet& flags) {
    if (flags.empty()) {
        out << "flagset none\n";
        return;
    }
    const AffineSubspace& s = *flags.space();
    if (s.basis().empty()) {
        out << "flagset point";
        for (std::int64_t c : s.base().coords()) out << ' ' << c;
        out << "\n";
        return;
    }
    out << "flagset base";
    for (std::int64_t c : s.base().coords()) out << ' ' << c;
    out << "\n";
    for (const auto& v : s.basis()) {
        out << "flagbasis";
        for (std::int64_t c : v) out << ' ' << c;
        out << "\n";
    }
}

void write_aut(std::ostream& out, const RobotAutomaton& a, const FlagSet* flags) {
    out << "automaton v1\n";
    out << "dimension " << a.dimension << "\n";
    out << "pebbles " << a.pebble_count << "\n";
    out << "start " << a.states[a.initial].name << "\n";
    if (flags) write_flags(out, *flags);
    const std::uint32_t tsize = a.table_size();
    const std::uint32_t n = static_cast<std::uint32_t>(a.pebble_count);
    for (const auto& s : a.states) {
        out << "state " << s.name << " move " << s.move.str() << " carry " << carry_str(s.carry)
            << " role " << role_name(s.role) << "\n";
        for (std::uint32_t obs = 0; obs < tsize; ++obs) {
            out << "  next " << Observation::from_index(n, obs).str() << " "
                << a.states[s.next[obs]].name << "\n";
        }
    }
}

void write_aut(std::ostream& out, const RationalAutomaton& a) {
    out << "automaton v1\n";
    out << "dimension " << a.dimension << "\n";
    out << "pebbles " << a.pebble_count << "\n";
    out << "start " << a.initial << "\n";
    for (const auto& s : a.states) {
        out << "rational " << s.name << (s.terminal ? " terminal" : "") << "\n";
        for (const auto& b : s.branches) {
            out << "  branch " << rational_str(b.prob) << " move " << b.move.str() << " carry "
                << carry_str(b.carry) << " next " << b.target << "\n";
        }
    }
}

void write_aut_file(const std::string& path, const RobotAutomaton& a, const FlagSet* flags) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write '" + path + "'");
    write_aut(out, a, flags);
}

}  // namespace pw
