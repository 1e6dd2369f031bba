#pragma once

#include "pebblewalk/programs.hpp"
#include "pebblewalk/rng.hpp"
#include "pebblewalk/walks.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pw {

/// Reports are nlohmann JSON objects backed by std::map, so key order (and
/// therefore the serialized byte stream) is deterministic. Wall-clock and
/// other non-reproducible diagnostics never enter a report: identical
/// configs must produce byte-identical output.
using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct ChiSquareResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::size_t bins_used = 0;
    std::size_t bins_pooled = 0;
    bool degenerate = false;  // fewer than two bins survived pooling
};

/// Goodness-of-fit against expected probabilities; categories whose expected
/// count falls below min_expected are pooled into one bin.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& expected_probs,
                               double min_expected = 5.0);

Json chi_square_json(const ChiSquareResult& c);

/// Samples a rational step distribution from fair bits: draw
/// ceil(log2 D) bits, accept values below the common denominator D,
/// retry otherwise. Exact, and dyadic distributions never retry.
class WalkSampler {
public:
    explicit WalkSampler(const WalkSpec& w);

    std::size_t step_count() const { return vecs_.size(); }
    const Point& step_vec(std::size_t i) const { return vecs_[i]; }

    template <class Bits>
    std::size_t sample_index(Bits& bits) const {
        for (;;) {
            const std::uint32_t r = bits.next_bits(nbits_);
            if (r < den_) {
                std::size_t lo = 0;
                while (cum_[lo] <= r) ++lo;
                return lo;
            }
        }
    }

private:
    std::vector<Point> vecs_;
    std::vector<std::uint32_t> cum_;  // cumulative numerators, cum_[i] = sum_{j<=i}
    std::uint32_t den_ = 1;
    int nbits_ = 0;
};

/// Master-seed resolution: explicit value beats the PEBBLEWALK_SEED
/// environment variable, which beats the built-in default. The chosen seed
/// and its source are echoed into every report.
struct SeedChoice {
    std::uint64_t seed;
    std::string source;  // "flag" | "env" | "default"
};
SeedChoice resolve_master_seed(std::optional<std::uint64_t> explicit_seed);

Json report_skeleton(const std::string& kind, Json config);

/// Budget checkpoints 1, 10, 100, ... capped by and including the budget.
std::vector<std::uint64_t> decade_checkpoints(std::uint64_t budget);

// ---------------------------------------------------------------------------
// Experiments

struct CoverageConfig {
    std::string program = "z2";
    std::int64_t radius = 2;
    std::uint64_t budget = 100000;
    std::uint64_t trials = 100;
    SeedChoice seed{RngStream::kDefaultSeed, "default"};
    bool per_trial_rows = true;
    std::uint64_t cell_trial_cap = 200000000;  // ball cells x trials guard
};
Json coverage_experiment(const CoverageConfig& cfg);

struct ReturnConfig {
    std::string target = "simple-z2";  // program name or walk "simple-z<k>"
    std::uint64_t budget = 10000;
    std::uint64_t trials = 1000;
    SeedChoice seed{RngStream::kDefaultSeed, "default"};
    std::uint64_t series_horizon = 200;  // exact partial-sum lower bound for simple walks
};
Json return_experiment(const ReturnConfig& cfg);

struct CompareConfig {
    std::string target = "z2";  // "z2" robot law or "z4-pebble" pebble marginal
    std::uint64_t checkpoint = 8;
    std::uint64_t trials = 100000;
    SeedChoice seed{RngStream::kDefaultSeed, "default"};
    std::uint64_t step_cap = 1000000;  // per-trial automaton step budget
};
Json distribution_experiment(const CompareConfig& cfg);

struct SimulateConfig {
    std::string program = "z2";  // builtin name or automaton file path
    std::uint64_t budget = 1000;
    SeedChoice seed{RngStream::kDefaultSeed, "default"};
    std::int64_t coverage_radius = 2;
    std::string export_path;  // when set, write the automaton file here
};
Json simulate_once(const SimulateConfig& cfg);

/// Parse "simple-z<k>" into a walk spec.
std::optional<WalkSpec> walk_by_name(const std::string& name);

/// Lossy CSV projection of a report's results.table.
std::string report_to_csv(const Json& report);

}  // namespace pw
