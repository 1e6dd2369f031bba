#include "pebblewalk/harness.hpp"

#include "pebblewalk/automaton_io.hpp"

#include <boost/integer/common_factor_rt.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace pw {

// ---------------------------------------------------------------------------
// Chi-square

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& expected_probs, double min_expected) {
    require(observed.size() == expected_probs.size(), Errc::validation,
            "chi_square_gof: size mismatch");
    std::uint64_t total = 0;
    for (auto c : observed) total += c;
    ChiSquareResult out;
    double pooled_obs = 0, pooled_exp = 0;
    double stat = 0;
    std::size_t bins = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double exp_count = expected_probs[i] * static_cast<double>(total);
        if (exp_count < min_expected) {
            pooled_obs += static_cast<double>(observed[i]);
            pooled_exp += exp_count;
            ++out.bins_pooled;
            continue;
        }
        const double d = static_cast<double>(observed[i]) - exp_count;
        stat += d * d / exp_count;
        ++bins;
    }
    if (out.bins_pooled > 0 && pooled_exp > 0) {
        const double d = pooled_obs - pooled_exp;
        stat += d * d / pooled_exp;
        ++bins;
    }
    out.bins_used = bins;
    out.statistic = stat;
    if (bins < 2) {
        out.degenerate = true;
        out.df = 0;
        out.p_value = 1.0;
        return out;
    }
    out.df = static_cast<int>(bins) - 1;
    boost::math::chi_squared dist(out.df);
    out.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    return out;
}

Json chi_square_json(const ChiSquareResult& c) {
    return Json{{"statistic", c.statistic}, {"df", c.df},           {"p_value", c.p_value},
                {"bins_used", c.bins_used}, {"bins_pooled", c.bins_pooled},
                {"degenerate", c.degenerate}};
}

// ---------------------------------------------------------------------------
// Sampling

WalkSampler::WalkSampler(const WalkSpec& w) {
    BigInt den = w.weight_denominator();
    require(den <= 0x7fffffff, Errc::resource, "walk weight denominator too large to sample");
    den_ = den.convert_to<std::uint32_t>();
    std::uint32_t acc = 0;
    for (const auto& s : w.steps()) {
        vecs_.push_back(s.vec);
        const BigInt u = BigInt(numerator(s.weight)) * (den / BigInt(denominator(s.weight)));
        acc += u.convert_to<std::uint32_t>();
        cum_.push_back(acc);
    }
    while ((1u << nbits_) < den_) ++nbits_;
}

SeedChoice resolve_master_seed(std::optional<std::uint64_t> explicit_seed) {
    if (explicit_seed) return {*explicit_seed, "flag"};
    if (const char* env = std::getenv("PEBBLEWALK_SEED")) {
        char* end = nullptr;
        const std::uint64_t v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            fail(Errc::usage, "PEBBLEWALK_SEED must be a decimal unsigned integer");
        }
        return {v, "env"};
    }
    return {RngStream::kDefaultSeed, "default"};
}

Json report_skeleton(const std::string& kind, Json config) {
    return Json{{"schema_version", kSchemaVersion},
                {"tool", "pebblewalk"},
                {"version", kToolVersion},
                {"generator", RngStream::kGeneratorId},
                {"kind", kind},
                {"config", std::move(config)}};
}

std::vector<std::uint64_t> decade_checkpoints(std::uint64_t budget) {
    std::vector<std::uint64_t> cps;
    if (budget == 0) return {0};
    for (std::uint64_t c = 1; c < budget && c <= budget / 10 * 10; c *= 10) {
        cps.push_back(c);
        if (c > budget / 10) break;
    }
    if (cps.empty() || cps.back() != budget) cps.push_back(budget);
    return cps;
}

// ---------------------------------------------------------------------------
// Coverage

Json coverage_experiment(const CoverageConfig& cfg) {
    ProgramDescriptor prog = build_program(cfg.program);
    require(cfg.trials >= 1, Errc::validation, "trials must be >= 1");
    const BigInt cells_big = BallIndex::point_count(prog.dimension, cfg.radius);
    if (cells_big * cfg.trials > cfg.cell_trial_cap) {
        fail(Errc::resource, "coverage grid too large: " + cells_big.str() + " cells x " +
                                 std::to_string(cfg.trials) + " trials exceeds cap " +
                                 std::to_string(cfg.cell_trial_cap));
    }
    const std::uint64_t cells = cells_big.convert_to<std::uint64_t>();
    const auto checkpoints = decade_checkpoints(cfg.budget);

    RunOptions opt;
    opt.max_steps = cfg.budget;
    opt.track_visited = false;
    opt.coverage_radius = cfg.radius;
    opt.checkpoints = checkpoints;

    struct Agg {
        double sum = 0;
        double min = 1, max = 0;
        std::uint64_t full = 0;
    };
    std::vector<Agg> agg(checkpoints.size());
    Json trial_rows = Json::array();

    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        RngStream rng(trial_seed(cfg.seed.seed, t));
        const Trajectory traj = run(prog.automaton, prog.flags, opt, rng);
        require(traj.coverage.size() == checkpoints.size(), Errc::validation,
                "coverage probe missed checkpoints");
        Json row;
        if (cfg.per_trial_rows) {
            row["trial"] = t;
            row["coverage"] = Json::array();
        }
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
            const double frac =
                static_cast<double>(traj.coverage[i].covered) / static_cast<double>(cells);
            agg[i].sum += frac;
            agg[i].min = std::min(agg[i].min, frac);
            agg[i].max = std::max(agg[i].max, frac);
            if (traj.coverage[i].covered == cells) ++agg[i].full;
            if (cfg.per_trial_rows) row["coverage"].push_back(frac);
        }
        if (cfg.per_trial_rows) trial_rows.push_back(std::move(row));
    }

    Json table = Json::array();
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        table.push_back(Json{{"checkpoint", checkpoints[i]},
                             {"mean_coverage", agg[i].sum / static_cast<double>(cfg.trials)},
                             {"min_coverage", agg[i].min},
                             {"max_coverage", agg[i].max},
                             {"full_coverage_fraction",
                              static_cast<double>(agg[i].full) / static_cast<double>(cfg.trials)}});
    }

    Json rep = report_skeleton("coverage", Json{{"program", cfg.program},
                                                {"radius", cfg.radius},
                                                {"budget", cfg.budget},
                                                {"trials", cfg.trials},
                                                {"seed", cfg.seed.seed},
                                                {"seed_source", cfg.seed.source}});
    rep["results"] = Json{{"ball_cells", cells}, {"table", std::move(table)}};
    if (cfg.per_trial_rows) rep["results"]["trials"] = std::move(trial_rows);
    return rep;
}

// ---------------------------------------------------------------------------
// Returns

std::optional<WalkSpec> walk_by_name(const std::string& name) {
    if (name.rfind("simple-z", 0) == 0) {
        const std::string tail = name.substr(8);
        if (!tail.empty() && tail.find_first_not_of("0123456789") == std::string::npos) {
            const std::size_t k = std::stoul(tail);
            if (k >= 1 && k <= 16) return WalkSpec::simple(k);
        }
    }
    return std::nullopt;
}

namespace {

struct ReturnStats {
    std::uint64_t returned = 0;
    std::vector<std::uint64_t> cdf_counts;  // per checkpoint
    std::uint64_t sum_return_steps = 0;
};

}  // namespace

Json return_experiment(const ReturnConfig& cfg) {
    require(cfg.trials >= 1, Errc::validation, "trials must be >= 1");
    const auto checkpoints = decade_checkpoints(cfg.budget);
    ReturnStats stats;
    stats.cdf_counts.assign(checkpoints.size(), 0);

    auto record = [&](std::uint64_t first_return) {
        if (first_return == 0) return;
        ++stats.returned;
        stats.sum_return_steps += first_return;
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
            if (first_return <= checkpoints[i]) ++stats.cdf_counts[i];
        }
    };

    std::optional<WalkSpec> walk = walk_by_name(cfg.target);
    std::size_t dimension = 0;
    if (walk) {
        dimension = walk->dimension();
        const WalkSampler sampler(*walk);
        Point pos(walk->dimension());
        const Point origin(walk->dimension());
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            RngStream rng(trial_seed(cfg.seed.seed, t));
            pos = origin;
            std::uint64_t first_return = 0;
            for (std::uint64_t n = 1; n <= cfg.budget; ++n) {
                pos += sampler.step_vec(sampler.sample_index(rng));
                if (pos == origin) {
                    first_return = n;
                    break;
                }
            }
            record(first_return);
        }
    } else {
        ProgramDescriptor prog = build_program(cfg.target);
        dimension = prog.dimension;
        RunOptions opt;
        opt.max_steps = cfg.budget;
        opt.track_visited = false;
        opt.stop_on_origin_return = true;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            RngStream rng(trial_seed(cfg.seed.seed, t));
            const Trajectory traj = run(prog.automaton, prog.flags, opt, rng);
            record(traj.origin_return_step);
        }
    }

    Json table = Json::array();
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        table.push_back(Json{{"budget", checkpoints[i]},
                             {"return_frequency", static_cast<double>(stats.cdf_counts[i]) /
                                                      static_cast<double>(cfg.trials)}});
    }

    Json rep = report_skeleton("returns", Json{{"target", cfg.target},
                                               {"budget", cfg.budget},
                                               {"trials", cfg.trials},
                                               {"seed", cfg.seed.seed},
                                               {"seed_source", cfg.seed.source},
                                               {"series_horizon", cfg.series_horizon}});
    rep["results"] = Json{
        {"returned", stats.returned},
        {"return_frequency", static_cast<double>(stats.returned) / static_cast<double>(cfg.trials)},
        {"mean_return_step", stats.returned
                                 ? static_cast<double>(stats.sum_return_steps) /
                                       static_cast<double>(stats.returned)
                                 : 0.0},
        {"table", std::move(table)}};

    if (walk && walk->is_simple()) {
        // Exact series partial sum S(N) (including the n=0 term) yields the
        // lower bound 1 - 1/S(N) on the true return probability.
        Rational S = 0;
        for (std::uint64_t n = 0; n <= cfg.series_horizon; ++n) {
            S += origin_return_simple_exact(dimension, n);
        }
        const Rational lower = 1 - Rational(1) / S;
        rep["results"]["exact"] =
            Json{{"partial_sum", rational_str(S)},
                 {"partial_sum_float", S.convert_to<double>()},
                 {"return_probability_lower_bound", lower.convert_to<double>()}};
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Distribution comparison

namespace {

Json observed_table(const std::map<Point, std::uint64_t>& counts) {
    Json rows = Json::array();
    for (const auto& [p, c] : counts) {
        Json coords = Json::array();
        for (auto v : p.coords()) coords.push_back(v);
        rows.push_back(Json{{"point", std::move(coords)}, {"count", c}});
    }
    return rows;
}

}  // namespace

Json distribution_experiment(const CompareConfig& cfg) {
    require(cfg.trials >= 1, Errc::validation, "trials must be >= 1");
    const bool pebble_marginal = cfg.target == "z4-pebble";
    require(cfg.target == "z2" || pebble_marginal, Errc::usage,
            "no exact oracle for target '" + cfg.target + "' (expected z2 or z4-pebble)");

    Json rep = report_skeleton("compare", Json{{"target", cfg.target},
                                               {"checkpoint", cfg.checkpoint},
                                               {"trials", cfg.trials},
                                               {"seed", cfg.seed.seed},
                                               {"seed_source", cfg.seed.source},
                                               {"step_cap", cfg.step_cap}});
    rep["thresholds"] = Json{{"p_value_min", 0.001}, {"pool_min_expected", 5.0}};

    if (cfg.checkpoint == 0) {
        rep["results"] = Json{{"skipped", true}, {"reason", "checkpoint 0 is the origin point mass"}};
        return rep;
    }

    const std::uint64_t m = cfg.checkpoint;
    const DistributionGrid expected = dp_step_distribution(WalkSpec::simple(2), m,
                                                           static_cast<std::int64_t>(m));
    ProgramDescriptor prog = build_program(pebble_marginal ? "z4" : "z2");

    RunOptions opt;
    opt.track_visited = false;
    if (pebble_marginal) {
        opt.max_steps = cfg.step_cap;
        opt.stop_after_pebble_moves = m;
    } else {
        opt.max_steps = cfg.step_cap;
        opt.stop_after_lattice_moves = m;
    }

    std::map<Point, std::uint64_t> counts;
    std::uint64_t dropped = 0;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        RngStream rng(trial_seed(cfg.seed.seed, t));
        const Trajectory traj = run(prog.automaton, prog.flags, opt, rng);
        if (pebble_marginal) {
            if (traj.pebble_moves < m) {
                ++dropped;
                continue;
            }
            const Point& peb = traj.final_state.pebbles[0];
            counts[Point({peb[2], peb[3]})] += 1;
        } else {
            if (traj.lattice_moves < m) {
                ++dropped;
                continue;
            }
            counts[traj.final_state.robot] += 1;
        }
    }

    // Bins: the exact support cells, plus one catch-all for anything else.
    std::vector<std::uint64_t> observed;
    std::vector<double> probs;
    std::uint64_t matched = 0;
    const BallIndex& index = expected.index();
    for (std::size_t i = 0; i < index.size(); ++i) {
        const Rational& r = expected.raw_exact()[i];
        if (r == 0) continue;
        auto it = counts.find(index.point_at(i));
        const std::uint64_t c = it == counts.end() ? 0 : it->second;
        observed.push_back(c);
        probs.push_back(r.convert_to<double>());
        matched += c;
    }
    std::uint64_t samples = 0;
    for (const auto& [p, c] : counts) samples += c;
    observed.push_back(samples - matched);  // off-support samples
    probs.push_back(0.0);

    const ChiSquareResult chi = chi_square_gof(observed, probs);
    rep["results"] = Json{{"samples", samples},
                          {"dropped_trials", dropped},
                          {"off_support_samples", samples - matched},
                          {"chi_square", chi_square_json(chi)},
                          {"observed", observed_table(counts)},
                          {"table", Json::array({Json{{"checkpoint", m},
                                                      {"samples", samples},
                                                      {"p_value", chi.p_value},
                                                      {"statistic", chi.statistic},
                                                      {"df", chi.df}}})}};
    return rep;
}

// ---------------------------------------------------------------------------
// Single simulation

Json simulate_once(const SimulateConfig& cfg) {
    ProgramDescriptor prog = [&]() -> ProgramDescriptor {
        for (const auto& n : program_names()) {
            if (n == cfg.program) return build_program(cfg.program);
        }
        const AutFile f = parse_aut_file(cfg.program);
        return ProgramDescriptor{cfg.program, f.dimension, f.pebbles, to_flagset(f), to_robot(f)};
    }();

    if (!cfg.export_path.empty()) {
        write_aut_file(cfg.export_path, prog.automaton, &prog.flags);
    }

    RunOptions opt;
    opt.max_steps = cfg.budget;
    opt.coverage_radius = cfg.coverage_radius;
    opt.checkpoints = decade_checkpoints(cfg.budget);
    RngStream rng(cfg.seed.seed);
    const Trajectory traj = run(prog.automaton, prog.flags, opt, rng);

    Json coverage = Json::array();
    for (const auto& c : traj.coverage) {
        coverage.push_back(Json{{"step", c.step}, {"covered_cells", c.covered}});
    }
    Json pebble_hist = Json::array();
    for (const auto& [mv, c] : traj.pebble_move_histogram) {
        pebble_hist.push_back(Json{{"move", mv.str()}, {"count", c}});
    }
    Json final_pos = Json::array();
    for (auto v : traj.final_state.robot.coords()) final_pos.push_back(v);

    Json rep = report_skeleton("simulate", Json{{"program", cfg.program},
                                                {"budget", cfg.budget},
                                                {"seed", cfg.seed.seed},
                                                {"seed_source", cfg.seed.source},
                                                {"coverage_radius", cfg.coverage_radius}});
    rep["results"] = Json{{"steps", traj.steps_taken},
                          {"lattice_moves", traj.lattice_moves},
                          {"pebble_moves", traj.pebble_moves},
                          {"flag_hits", traj.flag_hits},
                          {"visited_cells", traj.visited.size()},
                          {"final_position", std::move(final_pos)},
                          {"pebble_move_histogram", std::move(pebble_hist)},
                          {"coverage", std::move(coverage)},
                          {"table", Json::array({Json{{"steps", traj.steps_taken},
                                                      {"visited_cells", traj.visited.size()},
                                                      {"lattice_moves", traj.lattice_moves}}})}};
    return rep;
}

std::string report_to_csv(const Json& report) {
    std::ostringstream out;
    if (!report.contains("results") || !report["results"].contains("table")) {
        fail(Errc::validation, "report has no aggregate table to project to CSV");
    }
    const Json& table = report["results"]["table"];
    if (table.empty()) return "";
    bool first = true;
    for (auto it = table[0].begin(); it != table[0].end(); ++it) {
        if (!first) out << ',';
        out << it.key();
        first = false;
    }
    out << '\n';
    for (const auto& row : table) {
        first = true;
        for (auto it = row.begin(); it != row.end(); ++it) {
            if (!first) out << ',';
            out << it.value().dump();
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace pw
