// Acceptance suite: ten criteria, one pass/fail line each. Exact criteria
// use big-rational equality; statistical criteria use pre-registered
// thresholds (chi-square p > 0.001 or 3-sigma) with fixed seeds.

#include "pebblewalk/absorption.hpp"
#include "pebblewalk/harness.hpp"
#include "pebblewalk/rational_automaton.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

using namespace pw;

namespace {

int failures = 0;

void criterion(const char* id, const char* what, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
        body();
    } catch (const std::exception& e) {
        error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (error.empty()) {
        std::printf("[PASS] %s  %s  (%.1fs)\n", id, what, secs);
    } else {
        ++failures;
        std::printf("[FAIL] %s  %s  (%.1fs): %s\n", id, what, secs, error.c_str());
    }
    std::fflush(stdout);
}

void expect(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

// Coin-path displacement audit for one compiled gadget.
void expect_zero_net_displacement(const RobotAutomaton& a, const GadgetRecord& g) {
    if (g.depth == 0) return;
    const std::set<StateId> commits(g.commits.begin(), g.commits.end());
    std::set<std::string> seen;
    const std::uint32_t coin_bit = 1u << (a.pebble_count + 1);
    auto walk = [&](auto&& self, StateId s, Point disp, bool started) -> void {
        if (commits.count(s)) {
            expect(l1_norm(disp) == 0, "gadget " + g.name + " commits displaced");
            return;
        }
        if (started && s == g.root) {
            expect(l1_norm(disp) == 0, "gadget " + g.name + " restart cycle displaced");
            return;
        }
        if (!seen.insert(std::to_string(s) + ":" + disp.str()).second) return;
        Point after = disp;
        a.states[s].move.apply(after);
        self(self, a.states[s].next[0], after, true);
        self(self, a.states[s].next[coin_bit], after, true);
    };
    walk(walk, g.root, Point(a.dimension), false);
}

double chi_square_p(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs) {
    return chi_square_gof(counts, probs).p_value;
}

void c1_origin_return_oracle() {
    expect(z3_origin_return_exact(2) == Rational(1, 6), "P(Y_2=0) != 1/6");
    expect(z3_origin_return_exact(4) == Rational(5, 72), "P(Y_4=0) != 5/72");
    const WalkSpec w = WalkSpec::simple(3);
    for (std::uint64_t n = 0; n <= 30; ++n) {
        const auto grid = dp_step_distribution(w, n, static_cast<std::int64_t>(n));
        expect(grid.mass(Point::origin(3)) == z3_origin_return_exact(n),
               "closed form and DP disagree at n=" + std::to_string(n));
    }
}

void c2_bound_chain() {
    expect(z3_origin_return_exact(2) == z3_upper_bound(1), "no equality at n=1");
    for (std::uint64_t n = 1; n <= 200; ++n) {
        expect(z3_origin_return_exact(2 * n) <= z3_upper_bound(n),
               "bound chain fails at n=" + std::to_string(n));
    }
}

void c3_stirling_ratio() {
    const double ratio = z3_upper_bound(200).convert_to<double>() / stirling_asymptotic(200);
    expect(ratio >= 0.95 && ratio <= 1.05,
           "ratio at n=200 is " + std::to_string(ratio));
}

void c4_max_multinomial() {
    for (std::uint64_t n = 0; n <= 12; ++n) {
        BigInt fact_n = 1;
        for (std::uint64_t v = 2; v <= n; ++v) fact_n *= v;
        BigInt best = 0;
        for (std::uint64_t i = 0; i <= n; ++i) {
            for (std::uint64_t j = 0; i + j <= n; ++j) {
                const std::uint64_t l = n - i - j;
                BigInt d = 1;
                for (std::uint64_t v = 2; v <= i; ++v) d *= v;
                for (std::uint64_t v = 2; v <= j; ++v) d *= v;
                for (std::uint64_t v = 2; v <= l; ++v) d *= v;
                best = std::max(best, BigInt(fact_n / d));
            }
        }
        expect(max_multinomial(n) == best, "C_n mismatch at n=" + std::to_string(n));
        // the maximizer uses parts that pairwise differ by at most one
        std::uint64_t parts[3] = {n / 3, n / 3, n / 3};
        for (std::uint64_t r = 0; r < n % 3; ++r) ++parts[r];
        BigInt d = 1;
        for (int pi = 0; pi < 3; ++pi) {
            for (std::uint64_t v = 2; v <= parts[pi]; ++v) d *= v;
        }
        expect(fact_n / d == best, "balanced parts are not maximal at n=" + std::to_string(n));
        expect(parts[0] - parts[2] <= 1, "parts differ by more than one");
    }
}

void c5_shifted_bound() {
    const BallIndex ball(3, 4);
    for (std::uint64_t n = 1; n <= 12; ++n) {
        for (std::size_t i = 0; i < ball.size(); ++i) {
            expect(shifted_bound_check(n, ball.point_at(i)),
                   "shifted bound fails at n=" + std::to_string(n) + " x=" +
                       ball.point_at(i).str());
        }
    }
}

void c6_mixture_identity() {
    const MixtureSpec fixtures[] = {
        MixtureSpec(WalkSpec::simple(3), WalkSpec::stay(3), Rational(1, 2)),
        MixtureSpec(WalkSpec::simple(2), WalkSpec::simple(2), Rational(1, 3)),
        MixtureSpec(WalkSpec::simple(1), WalkSpec::stay(1), Rational(2, 5)),
    };
    for (const auto& m : fixtures) {
        for (std::uint64_t n = 0; n <= 12; ++n) {
            const auto lhs = mixture_distribution(m, n, static_cast<std::int64_t>(n));
            const auto rhs =
                dp_step_distribution(one_step_mixture(m), n, static_cast<std::int64_t>(n));
            expect(lhs == rhs, "double sum != one-step mix at n=" + std::to_string(n));
        }
    }
    // decay evidence: mass(origin) * n^1.5 non-increasing on 10..20
    const MixtureSpec lazy(WalkSpec::simple(3), WalkSpec::stay(3), Rational(1, 2));
    double prev = 1e100;
    for (std::uint64_t n = 10; n <= 20; ++n) {
        const auto g = mixture_distribution(lazy, n, 0);
        const double scaled =
            g.mass(Point(3)).convert_to<double>() * std::pow(static_cast<double>(n), 1.5);
        expect(scaled <= prev, "scaled origin mass increased at n=" + std::to_string(n));
        prev = scaled;
    }
}

void c7_lemma1_roundtrip() {
    std::mt19937 gen(20240809);
    std::uniform_int_distribution<int> den_dist(2, 8), count_dist(2, 5);
    for (int iter = 0; iter < 20; ++iter) {
        const int den = den_dist(gen);
        const int branches = std::min(count_dist(gen), den);
        std::vector<int> parts(branches, 1);
        for (int rest = den - branches; rest > 0; --rest) {
            parts[std::uniform_int_distribution<int>(0, branches - 1)(gen)] += 1;
        }
        RationalAutomaton ra;
        ra.dimension = 2;
        ra.pebble_count = 0;
        ra.initial = "c";
        RationalState c;
        c.name = "c";
        for (int i = 0; i < branches; ++i) {
            RationalBranch b;
            b.prob = Rational(parts[i], den);
            b.move = Move::along(i % 2, (i / 2) % 2 ? -1 : +1);
            b.target = "t" + std::to_string(i);
            c.branches.push_back(std::move(b));
        }
        ra.states.push_back(std::move(c));
        for (int i = 0; i < branches; ++i) {
            RationalState t;
            t.name = "t" + std::to_string(i);
            t.terminal = true;
            ra.states.push_back(std::move(t));
        }
        const RobotAutomaton a = compile_rational(ra);
        const GadgetRecord* g = a.find_gadget("c");
        expect(g != nullptr, "gadget record missing");
        const auto absorbed = absorption_probabilities(a, *g);
        for (int i = 0; i < branches; ++i) {
            expect(absorbed.at(g->commits[i]) == Rational(parts[i], den),
                   "absorption mismatch in distribution " + std::to_string(iter));
        }
        expect_zero_net_displacement(a, *g);
    }
}

void c8_program_fidelity() {
    // z2 position law at lattice step 8, 1e5 seeded trials
    {
        CompareConfig cfg;
        cfg.target = "z2";
        cfg.checkpoint = 8;
        cfg.trials = 100000;
        cfg.seed = {1001, "flag"};
        const Json rep = distribution_experiment(cfg);
        const double p = rep["results"]["chi_square"]["p_value"].get<double>();
        expect(p > 0.001, "z2 law chi-square p=" + std::to_string(p));
    }
    // z4 pebble increments uniform over the four carried directions
    {
        const ProgramDescriptor z4 = build_z4();
        std::map<Move, std::uint64_t> hist;
        std::uint64_t events = 0;
        for (std::uint64_t t = 0; events < 10000 && t < 20000; ++t) {
            RunOptions opt;
            opt.max_steps = 30000;
            opt.track_visited = false;
            RngStream rng(trial_seed(2002, t));
            const Trajectory traj = run(z4.automaton, z4.flags, opt, rng);
            for (const auto& [mv, c] : traj.pebble_move_histogram) {
                hist[mv] += c;
                events += c;
            }
        }
        expect(events >= 10000, "not enough pebble-move events");
        std::vector<std::uint64_t> counts;
        for (const auto& [mv, c] : hist) {
            expect(mv.axis == 2 || mv.axis == 3, "pebble moved outside (e3,e4)");
            counts.push_back(c);
        }
        expect(counts.size() == 4, "missing pebble directions");
        const double p = chi_square_p(counts, {0.25, 0.25, 0.25, 0.25});
        expect(p > 0.001, "z4 pebble uniformity p=" + std::to_string(p));
    }
    // z8 flag-cell 5-way choice: exact absorption and empirical uniformity
    {
        const ProgramDescriptor z8 = build_z8();
        std::vector<const GadgetRecord*> gadgets;
        for (const auto& g : z8.automaton.gadgets) {
            if (g.name.rfind("flag5.", 0) == 0) gadgets.push_back(&g);
        }
        expect(gadgets.size() == 5, "expected five 5-way gadgets");
        for (const auto* g : gadgets) {
            const auto probs = absorption_probabilities(z8.automaton, *g);
            for (StateId cstate : g->commits) {
                expect(probs.at(cstate) == Rational(1, 5), "5-way absorption not 1/5");
            }
            expect_zero_net_displacement(z8.automaton, *g);
        }
        std::vector<std::uint64_t> outcome(5, 0);
        std::uint64_t events = 0;
        for (std::uint64_t t = 0; events < 100000 && t < 200000; ++t) {
            RunOptions opt;
            opt.max_steps = 20000;
            opt.track_visited = false;
            RngStream rng(trial_seed(3003, t));
            const Trajectory traj = run(z8.automaton, z8.flags, opt, rng);
            for (const auto* g : gadgets) {
                for (std::size_t b = 0; b < g->commits.size(); ++b) {
                    outcome[b] += traj.state_visits[g->commits[b]];
                    events += traj.state_visits[g->commits[b]];
                }
            }
        }
        expect(events >= 100000, "not enough flag events: " + std::to_string(events));
        const double p = chi_square_p(outcome, {0.2, 0.2, 0.2, 0.2, 0.2});
        expect(p > 0.001, "z8 5-way uniformity p=" + std::to_string(p));
    }
}

void c9_recurrence_evidence() {
    const auto z1 = classify_recurrence(WalkSpec::simple(1), 200);
    expect(z1.verdict == RecurrenceVerdict::recurrent_evidence, "Z^1 verdict");
    expect(std::abs(z1.alpha - 0.5) <= 0.1, "Z^1 alpha=" + std::to_string(z1.alpha));
    const auto z2 = classify_recurrence(WalkSpec::simple(2), 200);
    expect(z2.verdict == RecurrenceVerdict::recurrent_evidence, "Z^2 verdict");
    expect(std::abs(z2.alpha - 1.0) <= 0.1, "Z^2 alpha=" + std::to_string(z2.alpha));
    const auto z3 = classify_recurrence(WalkSpec::simple(3), 200);
    expect(z3.verdict == RecurrenceVerdict::transient_evidence, "Z^3 verdict");
    expect(std::abs(z3.alpha - 1.5) <= 0.1, "Z^3 alpha=" + std::to_string(z3.alpha));

    // Z^3 returns plateau between budgets 1e4 and 1e6 and stay above the
    // exact partial-sum lower bound.
    ReturnConfig small;
    small.target = "simple-z3";
    small.budget = 10000;
    small.trials = 10000;
    small.seed = {4004, "flag"};
    const Json rs = return_experiment(small);
    ReturnConfig big = small;
    big.budget = 1000000;
    const Json rb = return_experiment(big);
    const double fs = rs["results"]["return_frequency"].get<double>();
    const double fb = rb["results"]["return_frequency"].get<double>();
    expect(fb - fs < 0.05, "no plateau: " + std::to_string(fs) + " -> " + std::to_string(fb));
    const double bound = rs["results"]["exact"]["return_probability_lower_bound"].get<double>();
    expect(fs > bound, "small-budget frequency under the exact lower bound");
    expect(fb > bound, "large-budget frequency under the exact lower bound");
}

void c10_cli_determinism() {
    const char* cli = std::getenv("PEBBLEWALK_CLI");
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        expect(static_cast<bool>(f), "missing output file " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    if (cli && *cli) {
        const std::string base = "/tmp/pw_accept";
        const std::vector<std::string> invocations = {
            std::string(cli) + " simulate z2 --budget 2000 --seed 99 --out ",
            std::string(cli) + " coverage z4 --radius 2 --budget 5000 --trials 20 --seed 7 --out ",
            std::string(cli) + " analyze classify --walk simple-z3 --horizon 100 --out ",
        };
        for (std::size_t i = 0; i < invocations.size(); ++i) {
            const std::string f1 = base + std::to_string(i) + "_a.json";
            const std::string f2 = base + std::to_string(i) + "_b.json";
            expect(std::system((invocations[i] + f1 + " >/dev/null").c_str()) == 0, "CLI run failed");
            expect(std::system((invocations[i] + f2 + " >/dev/null").c_str()) == 0, "CLI run failed");
            expect(slurp(f1) == slurp(f2), "reports differ for: " + invocations[i]);
        }
    } else {
        // No CLI path in the environment: check in-process report bytes.
        CoverageConfig cfg;
        cfg.program = "z4";
        cfg.radius = 2;
        cfg.budget = 5000;
        cfg.trials = 20;
        cfg.seed = {7, "flag"};
        expect(coverage_experiment(cfg).dump(2) == coverage_experiment(cfg).dump(2),
               "in-process reports differ");
    }
}

}  // namespace

int main() {
    criterion("C1", "z3 origin-return closed form == exact DP, n <= 30", c1_origin_return_oracle);
    criterion("C2", "bound chain P(Y_2n=0) <= 2^-2n C(2n,n) C_n 3^-n, n <= 200", c2_bound_chain);
    criterion("C3", "bound / Stirling asymptotic in [0.95, 1.05] at n=200", c3_stirling_ratio);
    criterion("C4", "C_n equals brute force, balanced parts, n <= 12", c4_max_multinomial);
    criterion("C5", "shifted bound holds for all |x|_1 <= 4, n <= 12", c5_shifted_bound);
    criterion("C6", "mixture double sum == one-step mix; n^1.5 decay scan", c6_mixture_identity);
    criterion("C7", "compile->absorption round-trip exact on 20 random choices", c7_lemma1_roundtrip);
    criterion("C8", "program fidelity: z2 law, z4 pebble, z8 5-way", c8_program_fidelity);
    criterion("C9", "recurrence evidence Z^1/Z^2/Z^3 and Z^3 return plateau", c9_recurrence_evidence);
    criterion("C10", "byte-identical reports for identical configs", c10_cli_determinism);
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
