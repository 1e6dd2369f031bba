// pebblewalk CLI: simulate maze-robot programs on Z^k, run seeded coverage /
// return / distribution experiments, compute exact walk analytics, and
// compile rational automata to fair-coin automata.

#include "pebblewalk/absorption.hpp"
#include "pebblewalk/automaton_io.hpp"
#include "pebblewalk/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using pw::Json;

struct OutputOpts {
    std::string out;
    std::string format = "json";
};

void add_output(CLI::App* cmd, OutputOpts& o) {
    cmd->add_option("--out", o.out, "write the report to this path (default: stdout)");
    cmd->add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
}

void emit(const Json& report, const OutputOpts& o) {
    std::string payload;
    if (o.format == "csv") {
        payload = pw::report_to_csv(report);
    } else {
        payload = report.dump(2);
        payload += '\n';
    }
    if (o.out.empty()) {
        std::cout << payload;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) pw::fail(pw::Errc::io, "cannot write '" + o.out + "'");
        f << payload;
    }
}

std::optional<std::uint64_t> seed_flag;

pw::SeedChoice seed_choice() { return pw::resolve_master_seed(seed_flag); }

pw::Point parse_point(const std::string& text) {
    std::vector<std::int64_t> coords;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (cur.empty()) pw::fail(pw::Errc::usage, "bad point '" + text + "'");
            coords.push_back(std::stoll(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return pw::Point(std::move(coords));
}

pw::WalkSpec walk_arg(const std::string& name) {
    auto w = pw::walk_by_name(name);
    if (!w) pw::fail(pw::Errc::usage, "unknown walk '" + name + "' (expected simple-z<k>)");
    return *w;
}

int exit_code_for(pw::Errc c) {
    switch (c) {
        case pw::Errc::usage:
        case pw::Errc::parse: return 2;
        case pw::Errc::resource: return 3;
        default: return 1;
    }
}

void print_error(const pw::Error& e) {
    Json err{{"error",
              Json{{"code", pw::errc_name(e.code)}, {"message", e.what()}}}};
    if (e.line >= 0) err["error"]["line"] = e.line;
    if (e.column >= 0) err["error"]["column"] = e.column;
    std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pebblewalk: maze-robot simulator and exact random-walk analytics on Z^k"};
    app.require_subcommand(1);
    app.add_option("--seed", seed_flag, "master seed (beats PEBBLEWALK_SEED, beats default)");

    // simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run one seeded trajectory of a program");
    pw::SimulateConfig sim_cfg;
    OutputOpts sim_out;
    sim->add_option("program", sim_cfg.program, "z2|z4|z6|z8 or an automaton file path")->required();
    sim->add_option("--budget", sim_cfg.budget, "automaton step budget");
    sim->add_option("--radius", sim_cfg.coverage_radius, "coverage ball radius");
    sim->add_option("--export-automaton", sim_cfg.export_path, "write the automaton file here");
    add_output(sim, sim_out);
    sim->callback([&] {
        sim_cfg.seed = seed_choice();
        emit(pw::simulate_once(sim_cfg), sim_out);
    });

    // coverage ----------------------------------------------------------
    auto* cov = app.add_subcommand("coverage", "ball-coverage statistics over seeded trials");
    pw::CoverageConfig cov_cfg;
    OutputOpts cov_out;
    cov->add_option("program", cov_cfg.program, "z2|z4|z6|z8")->required();
    cov->add_option("--radius", cov_cfg.radius, "L1 ball radius");
    cov->add_option("--budget", cov_cfg.budget, "automaton step budget per trial");
    cov->add_option("--trials", cov_cfg.trials, "trial count");
    cov->add_flag("--no-trial-rows", [&](std::int64_t) { cov_cfg.per_trial_rows = false; },
                  "omit per-trial rows from the report");
    add_output(cov, cov_out);
    cov->callback([&] {
        cov_cfg.seed = seed_choice();
        emit(pw::coverage_experiment(cov_cfg), cov_out);
    });

    // returns -----------------------------------------------------------
    auto* ret = app.add_subcommand("returns", "first-return-to-origin statistics");
    pw::ReturnConfig ret_cfg;
    OutputOpts ret_out;
    ret->add_option("target", ret_cfg.target, "simple-z<k> or a program name")->required();
    ret->add_option("--budget", ret_cfg.budget, "step budget per trial");
    ret->add_option("--trials", ret_cfg.trials, "trial count");
    ret->add_option("--horizon", ret_cfg.series_horizon, "series horizon for the exact lower bound");
    add_output(ret, ret_out);
    ret->callback([&] {
        ret_cfg.seed = seed_choice();
        emit(pw::return_experiment(ret_cfg), ret_out);
    });

    // compare -----------------------------------------------------------
    auto* cmp = app.add_subcommand("compare", "empirical law vs exact DP (chi-square)");
    pw::CompareConfig cmp_cfg;
    OutputOpts cmp_out;
    cmp->add_option("target", cmp_cfg.target, "z2 (robot law) or z4-pebble (pebble marginal)")
        ->required();
    cmp->add_option("--checkpoint", cmp_cfg.checkpoint, "lattice/pebble move count to compare at");
    cmp->add_option("--trials", cmp_cfg.trials, "trial count");
    cmp->add_option("--step-cap", cmp_cfg.step_cap, "per-trial automaton step cap");
    add_output(cmp, cmp_out);
    cmp->callback([&] {
        cmp_cfg.seed = seed_choice();
        emit(pw::distribution_experiment(cmp_cfg), cmp_out);
    });

    // analyze -----------------------------------------------------------
    auto* ana = app.add_subcommand("analyze", "exact walk computations");
    ana->require_subcommand(1);

    std::uint64_t ana_n = 4;
    std::string ana_walk = "simple-z3";
    std::uint64_t ana_horizon = 200;
    std::string ana_point = "0,0,0";
    std::int64_t ana_radius = -1;
    std::string ana_mode = "rational";
    std::string ana_p = "1/2";
    OutputOpts ana_out;

    auto* a_ret = ana->add_subcommand("z3-return", "exact P(Y_n = 0) for the simple walk on Z^3");
    a_ret->add_option("--n", ana_n, "step count")->required();
    add_output(a_ret, ana_out);
    a_ret->callback([&] {
        const pw::Rational v = pw::z3_origin_return_exact(ana_n);
        std::cout << pw::rational_str(v) << "\n";
        if (!ana_out.out.empty()) {
            Json rep = pw::report_skeleton("analyze.z3-return", Json{{"n", ana_n}});
            rep["results"] = Json{{"value", pw::rational_str(v)},
                                  {"value_float", v.convert_to<double>()},
                                  {"table", Json::array({Json{{"n", ana_n},
                                                              {"value", pw::rational_str(v)}}})}};
            emit(rep, ana_out);
        }
    });

    auto* a_bound = ana->add_subcommand("z3-bound", "closed upper bound on P(Y_2n = 0) and Stirling ratio");
    a_bound->add_option("--n", ana_n, "bound index n")->required();
    add_output(a_bound, ana_out);
    a_bound->callback([&] {
        const pw::Rational b = pw::z3_upper_bound(ana_n);
        const double st = pw::stirling_asymptotic(ana_n);
        const double ratio = b.convert_to<double>() / st;
        std::cout << pw::rational_str(b) << " (stirling " << st << ", ratio " << ratio << ")\n";
        if (!ana_out.out.empty()) {
            Json rep = pw::report_skeleton("analyze.z3-bound", Json{{"n", ana_n}});
            rep["results"] = Json{{"bound", pw::rational_str(b)},
                                  {"bound_float", b.convert_to<double>()},
                                  {"stirling", st},
                                  {"ratio", ratio},
                                  {"table", Json::array({Json{{"n", ana_n},
                                                              {"bound", pw::rational_str(b)},
                                                              {"ratio", ratio}}})}};
            emit(rep, ana_out);
        }
    });

    auto* a_cn = ana->add_subcommand("cn", "maximal trinomial coefficient C_n");
    a_cn->add_option("--n", ana_n, "n")->required();
    a_cn->callback([&] { std::cout << pw::max_multinomial(ana_n).str() << "\n"; });

    auto* a_st = ana->add_subcommand("stirling", "3*sqrt(3)/(2 pi^1.5 n^1.5)");
    a_st->add_option("--n", ana_n, "n")->required();
    a_st->callback([&] { std::cout << pw::stirling_asymptotic(ana_n) << "\n"; });

    auto* a_series = ana->add_subcommand("series", "origin-return series partial sums");
    a_series->add_option("--walk", ana_walk, "simple-z<k>");
    a_series->add_option("--horizon", ana_horizon, "series horizon");
    add_output(a_series, ana_out);
    a_series->callback([&] {
        const auto series = pw::origin_return_series(walk_arg(ana_walk), ana_horizon);
        pw::Rational S = 0;
        Json table = Json::array();
        for (std::size_t n = 0; n < series.size(); ++n) {
            S += series[n];
            if (series[n] != 0) {
                table.push_back(Json{{"n", n},
                                     {"p_origin", pw::rational_str(series[n])},
                                     {"p_origin_float", series[n].convert_to<double>()}});
            }
        }
        std::cout << "S(" << ana_horizon << ") = " << pw::rational_str(S) << " ~ "
                  << S.convert_to<double>() << "\n";
        if (!ana_out.out.empty()) {
            Json rep = pw::report_skeleton("analyze.series",
                                           Json{{"walk", ana_walk}, {"horizon", ana_horizon}});
            rep["results"] = Json{{"partial_sum", pw::rational_str(S)},
                                  {"partial_sum_float", S.convert_to<double>()},
                                  {"table", std::move(table)}};
            emit(rep, ana_out);
        }
    });

    auto* a_cls = ana->add_subcommand("classify", "recurrence/transience evidence");
    a_cls->add_option("--walk", ana_walk, "simple-z<k>");
    a_cls->add_option("--horizon", ana_horizon, "series horizon");
    add_output(a_cls, ana_out);
    a_cls->callback([&] {
        const auto rep = pw::classify_recurrence(walk_arg(ana_walk), ana_horizon);
        std::cout << pw::verdict_name(rep.verdict) << " (alpha " << rep.alpha << ", S "
                  << rep.partial_sum.convert_to<double>() << ")\n";
        if (!ana_out.out.empty()) {
            Json out = pw::report_skeleton("analyze.classify",
                                           Json{{"walk", ana_walk}, {"horizon", ana_horizon}});
            out["results"] = Json{{"verdict", pw::verdict_name(rep.verdict)},
                                  {"alpha", rep.alpha},
                                  {"fit_points", rep.fit_points},
                                  {"stable_fit", rep.stable_fit},
                                  {"partial_sum", pw::rational_str(rep.partial_sum)},
                                  {"partial_sum_float", rep.partial_sum.convert_to<double>()},
                                  {"support_rank", rep.support_rank},
                                  {"table", Json::array({Json{{"walk", ana_walk},
                                                              {"verdict", pw::verdict_name(rep.verdict)},
                                                              {"alpha", rep.alpha}}})}};
            emit(out, ana_out);
        }
    });

    auto* a_sh = ana->add_subcommand("shifted", "shifted-probability bound check on Z^3");
    a_sh->add_option("--n", ana_n, "step count")->required();
    a_sh->add_option("--point", ana_point, "target cell, e.g. 1,0,0");
    a_sh->callback([&] {
        const bool ok = pw::shifted_bound_check(ana_n, parse_point(ana_point));
        std::cout << (ok ? "holds" : "violated") << "\n";
        if (!ok) pw::fail(pw::Errc::validation, "shifted bound violated");
    });

    auto* a_mix = ana->add_subcommand("mixture", "simple-Z^3/stay mixture origin decay");
    a_mix->add_option("--n", ana_n, "step count")->required();
    a_mix->add_option("--p", ana_p, "mixture probability of the simple component");
    add_output(a_mix, ana_out);
    a_mix->callback([&] {
        pw::Rational p;
        const auto slash = ana_p.find('/');
        p = slash == std::string::npos
                ? pw::Rational(pw::BigInt(ana_p))
                : pw::Rational(pw::BigInt(ana_p.substr(0, slash)), pw::BigInt(ana_p.substr(slash + 1)));
        const pw::MixtureSpec mix(pw::WalkSpec::simple(3), pw::WalkSpec::stay(3), p);
        Json table = Json::array();
        for (std::uint64_t n = 1; n <= ana_n; ++n) {
            const auto grid = pw::mixture_distribution(mix, n, 0);
            const pw::Rational at0 = grid.mass(pw::Point(3));
            const double scaled = at0.convert_to<double>() * std::pow(static_cast<double>(n), 1.5);
            table.push_back(Json{{"n", n},
                                 {"mass_origin", pw::rational_str(at0)},
                                 {"mass_origin_scaled_n15", scaled}});
            if (n == ana_n) {
                std::cout << "P(Z_" << n << " = 0) = " << pw::rational_str(at0) << ", * n^1.5 = "
                          << scaled << "\n";
            }
        }
        if (!ana_out.out.empty()) {
            Json rep = pw::report_skeleton("analyze.mixture", Json{{"n", ana_n}, {"p", ana_p}});
            rep["results"] = Json{{"table", std::move(table)}};
            emit(rep, ana_out);
        }
    });

    auto* a_dp = ana->add_subcommand("dp", "n-step law of a walk over an L1 ball (grid file)");
    a_dp->add_option("--walk", ana_walk, "simple-z<k>");
    a_dp->add_option("--n", ana_n, "step count")->required();
    a_dp->add_option("--radius", ana_radius, "ball radius (default: n)");
    a_dp->add_option("--mode", ana_mode, "rational|float")->check(CLI::IsMember({"rational", "float"}));
    a_dp->add_option("--out", ana_out.out, "grid file path (default: stdout)");
    a_dp->callback([&] {
        const auto w = walk_arg(ana_walk);
        const std::int64_t radius = ana_radius >= 0 ? ana_radius : static_cast<std::int64_t>(ana_n);
        const auto grid = pw::dp_step_distribution(
            w, ana_n, radius, ana_mode == "float" ? pw::GridMode::real : pw::GridMode::exact);
        if (ana_out.out.empty()) {
            grid.write(std::cout);
        } else {
            std::ofstream f(ana_out.out, std::ios::binary);
            if (!f) pw::fail(pw::Errc::io, "cannot write '" + ana_out.out + "'");
            grid.write(f);
        }
    });

    // compile -----------------------------------------------------------
    auto* comp = app.add_subcommand("compile", "compile a rational automaton file to fair coins");
    std::string comp_in, comp_out_path;
    bool comp_verify = false;
    OutputOpts comp_out;
    comp->add_option("--in", comp_in, "automaton description file")->required();
    comp->add_option("--compiled-out", comp_out_path, "write the compiled automaton here");
    comp->add_flag("--verify", comp_verify, "check exact branch absorption of every gadget");
    add_output(comp, comp_out);
    comp->callback([&] {
        const pw::AutFile f = pw::parse_aut_file(comp_in);
        pw::RobotAutomaton robot =
            f.pure_rational() ? pw::compile_rational(pw::to_rational(f)) : pw::to_robot(f);
        const pw::FlagSet flags = pw::to_flagset(f);

        Json rep = pw::report_skeleton(
            "compile", Json{{"in", comp_in}, {"verify", comp_verify},
                            {"pure_rational", f.pure_rational()}});
        Json rows = Json::array();
        bool all_exact = true;
        if (comp_verify) {
            for (const auto& g : robot.gadgets) {
                const auto probs = pw::absorption_probabilities(robot, g);
                bool exact = true;
                Json branches = Json::array();
                for (std::size_t i = 0; i < g.commits.size(); ++i) {
                    const pw::Rational& got = probs.at(g.commits[i]);
                    const bool match = got == g.branch_probs[i];
                    exact = exact && match;
                    branches.push_back(Json{{"branch", i},
                                            {"intended", pw::rational_str(g.branch_probs[i])},
                                            {"absorbed", pw::rational_str(got)},
                                            {"exact", match}});
                }
                rows.push_back(Json{{"gadget", g.name},
                                    {"depth", g.depth},
                                    {"restart_slots", g.restart_slots},
                                    {"exact", exact},
                                    {"branches", std::move(branches)}});
                all_exact = all_exact && exact;
            }
        }
        rep["results"] = Json{{"states", robot.states.size()},
                              {"gadgets", robot.gadgets.size()},
                              {"verified", comp_verify},
                              {"all_exact", all_exact},
                              {"table", std::move(rows)}};
        if (!comp_out_path.empty()) pw::write_aut_file(comp_out_path, robot, &flags);
        emit(rep, comp_out);
        if (comp_verify && !all_exact) {
            pw::fail(pw::Errc::validation, "absorption verification failed");
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        Json err{{"error", Json{{"code", "usage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const pw::Error& e) {
        print_error(e);
        return exit_code_for(e.code);
    } catch (const std::exception& e) {
        Json err{{"error", Json{{"code", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
