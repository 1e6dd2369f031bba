#pragma once

#include "pebblewalk/core.hpp"
#include "pebblewalk/lattice.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace pw {

/// A finite step distribution with exact rational weights summing to 1.
struct WalkStep {
    Point vec;
    Rational weight;
};

class WalkSpec {
public:
    WalkSpec(std::size_t dimension, std::vector<WalkStep> steps);

    /// P(X = +-e_j) = 1/2k for every axis j.
    static WalkSpec simple(std::size_t k);
    /// Point mass on the zero vector.
    static WalkSpec stay(std::size_t k);

    std::size_t dimension() const { return dim_; }
    const std::vector<WalkStep>& steps() const { return steps_; }

    bool is_simple() const;
    BigInt weight_denominator() const;  // lcm of weight denominators
    std::int64_t max_reach() const;     // largest step L1 norm
    std::size_t support_rank() const;   // rank over Q of the step vectors

private:
    std::size_t dim_;
    std::vector<WalkStep> steps_;  // duplicate vectors merged, zero weights dropped
};

/// Dense index over the L1 ball of a given radius; points in lexicographic
/// order so every computation that iterates it is deterministic.
class BallIndex {
public:
    BallIndex(std::size_t dim, std::int64_t radius);

    std::size_t dim() const { return dim_; }
    std::int64_t radius() const { return radius_; }
    std::size_t size() const { return points_.size(); }
    const Point& point_at(std::size_t i) const { return points_[i]; }
    std::optional<std::size_t> index_of(const Point& p) const;

    /// Number of lattice points with L1 norm <= radius, computed without
    /// materializing them (resource guard for callers).
    static BigInt point_count(std::size_t dim, std::int64_t radius);

private:
    std::size_t dim_;
    std::int64_t radius_;
    std::vector<Point> points_;
    std::unordered_map<Point, std::uint32_t, PointHash> lookup_;
};

enum class GridMode { exact, real };

const char* grid_mode_name(GridMode m);

/// Probability mass over an L1 ball plus the mass that escaped it. Exact
/// grids hold big rationals and satisfy stored + truncated == 1 identically;
/// real grids hold doubles produced in a fixed accumulation order.
class DistributionGrid {
public:
    static DistributionGrid exact_grid(std::shared_ptr<const BallIndex> index, std::uint64_t n,
                                       std::vector<Rational> mass, Rational truncation);
    static DistributionGrid real_grid(std::shared_ptr<const BallIndex> index, std::uint64_t n,
                                      std::vector<double> mass, double truncation);

    GridMode mode() const { return mode_; }
    std::size_t dim() const { return index_->dim(); }
    std::int64_t radius() const { return index_->radius(); }
    std::uint64_t steps() const { return n_; }
    const BallIndex& index() const { return *index_; }

    /// Exact mass at a point (zero outside the ball). Exact mode only.
    Rational mass(const Point& p) const;
    /// Mass as double, either mode.
    double massf(const Point& p) const;

    Rational total_stored() const;
    const Rational& truncation_mass() const;
    double total_storedf() const;
    double truncation_massf() const;

    const std::vector<Rational>& raw_exact() const;
    const std::vector<double>& raw_real() const;

    void write(std::ostream& out) const;
    static DistributionGrid read(std::istream& in);

    friend bool operator==(const DistributionGrid& a, const DistributionGrid& b);

private:
    DistributionGrid() = default;
    GridMode mode_ = GridMode::exact;
    std::uint64_t n_ = 0;
    std::shared_ptr<const BallIndex> index_;
    std::vector<Rational> rmass_;
    std::vector<double> fmass_;
    Rational rtrunc_ = 0;
    double ftrunc_ = 0;
};

/// Law of Y_n by n-fold convolution over the ball; probability flowing
/// outside the ball accumulates in truncation_mass. Exact or float mode.
DistributionGrid dp_step_distribution(const WalkSpec& w, std::uint64_t n, std::int64_t radius,
                                      GridMode mode = GridMode::exact);

/// P(Y_n = 0) for the simple walk on Z^3 via the closed multinomial sum;
/// zero for odd n.
Rational z3_origin_return_exact(std::uint64_t n);

/// C_n = max over i1+i2+i3=n of n!/(i1! i2! i3!), attained at parts that
/// pairwise differ by at most one.
BigInt max_multinomial(std::uint64_t n);

/// 2^-2n * binom(2n,n) * C_n * 3^-n, the closed upper bound on P(Y_2n = 0).
Rational z3_upper_bound(std::uint64_t n);

/// 3*sqrt(3) / (2 * pi^1.5 * n^1.5).
double stirling_asymptotic(std::uint64_t n);

/// Per-step mixture: walk A with probability p, walk B with probability q.
struct MixtureSpec {
    WalkSpec component_a;
    WalkSpec component_b;
    Rational prob_a;
    Rational prob_b;

    MixtureSpec(WalkSpec a, WalkSpec b, Rational p);
};

/// Exact law of the mixture walk by the binomial double sum over component
/// laws: P(Z_n=z) = sum_i C(n,i) p^i q^(n-i) sum_{x+y=z} P(A_i=x) P(B_{n-i}=y).
/// Computed over the full reach and projected onto the requested ball, so the
/// stored values are exact regardless of radius.
DistributionGrid mixture_distribution(const MixtureSpec& m, std::uint64_t n, std::int64_t radius);

/// The equivalent one-step law p*A + q*B (independent route, used to check
/// the double sum against plain convolution).
WalkSpec one_step_mixture(const MixtureSpec& m);

/// P(Y_n = x) <= 6^3 * (P(Y_n=0) + ... + P(Y_{n+3}=0)) for the simple walk
/// on Z^3, both sides exact. Vacuously true when parity forces P(Y_n=x)=0.
bool shifted_bound_check(std::uint64_t n, const Point& x);

/// P(Y_n = 0) for the simple walk on Z^k, any k, via a truncated polynomial
/// power over exact big integers.
Rational origin_return_simple_exact(std::size_t k, std::uint64_t n);

/// r_0..r_horizon with r_n = P(Y_n = 0): closed route for simple walks,
/// exact DP otherwise (guarded against infeasible grids).
std::vector<Rational> origin_return_series(const WalkSpec& w, std::uint64_t horizon);

/// F[n] = P(first return to origin <= n), exact, via DP with the origin
/// made absorbing.
std::vector<Rational> first_return_cdf(const WalkSpec& w, std::uint64_t horizon);

enum class RecurrenceVerdict { recurrent_evidence, transient_evidence, degenerate };

const char* verdict_name(RecurrenceVerdict v);

/// Evidence-grade recurrence classification: exact partial sums of the
/// origin-return series plus a least-squares fit of the decay exponent of
/// P(Y_2m = 0) over the top half of the horizon. Not a proof; the verdict
/// names say so.
struct RecurrenceReport {
    RecurrenceVerdict verdict;
    double alpha;             // fitted decay exponent
    std::size_t fit_points;
    bool stable_fit;          // false when fewer than 5 usable fit points
    Rational partial_sum;     // S(horizon), includes the n=0 term
    std::size_t support_rank;
    std::uint64_t horizon;
};

RecurrenceReport classify_recurrence(const WalkSpec& w, std::uint64_t horizon);

}  // namespace pw
