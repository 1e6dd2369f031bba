#include "pebblewalk/walks.hpp"

#include "pebblewalk/kernels.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

namespace pw {

namespace {

constexpr std::uint32_t kPad = 0xffffffffu;
constexpr std::size_t kMaxGridPoints = 6'000'000;

std::vector<BigInt> factorials(std::uint64_t n) {
    std::vector<BigInt> f(n + 1);
    f[0] = 1;
    for (std::uint64_t i = 1; i <= n; ++i) f[i] = f[i - 1] * i;
    return f;
}

BigInt int_pow(BigInt base, std::uint64_t e) {
    BigInt r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// WalkSpec

WalkSpec::WalkSpec(std::size_t dimension, std::vector<WalkStep> steps) : dim_(dimension) {
    require(dimension >= 1, Errc::validation, "walk dimension must be >= 1");
    require(!steps.empty(), Errc::validation, "walk needs at least one step vector");
    std::map<Point, Rational> merged;
    for (auto& s : steps) {
        if (s.vec.dim() != dim_) fail(Errc::dimension_mismatch, "step vector dimension mismatch");
        if (s.weight < 0) fail(Errc::validation, "step weights must be non-negative");
        if (s.weight == 0) continue;
        merged[s.vec] += s.weight;
    }
    Rational sum = 0;
    for (auto& [vec, w] : merged) {
        sum += w;
        steps_.push_back({vec, w});
    }
    if (sum != 1) {
        fail(Errc::validation, "step weights sum to " + rational_str(sum) + ", expected 1");
    }
}

WalkSpec WalkSpec::simple(std::size_t k) {
    std::vector<WalkStep> steps;
    const Rational w(1, 2 * static_cast<long>(k));
    for (std::size_t j = 0; j < k; ++j) {
        for (int sign : {+1, -1}) {
            Point v(k);
            v[j] = sign;
            steps.push_back({std::move(v), w});
        }
    }
    return WalkSpec(k, std::move(steps));
}

WalkSpec WalkSpec::stay(std::size_t k) { return WalkSpec(k, {{Point(k), Rational(1)}}); }

bool WalkSpec::is_simple() const {
    if (steps_.size() != 2 * dim_) return false;
    const Rational w(1, 2 * static_cast<long>(dim_));
    for (const auto& s : steps_) {
        if (s.weight != w) return false;
        if (l1_norm(s.vec) != 1) return false;
    }
    return true;  // 2k distinct unit vectors with equal weight are exactly +-e_j
}

BigInt WalkSpec::weight_denominator() const {
    BigInt d = 1;
    for (const auto& s : steps_) d = boost::integer::lcm(d, BigInt(denominator(s.weight)));
    return d;
}

std::int64_t WalkSpec::max_reach() const {
    std::int64_t r = 0;
    for (const auto& s : steps_) r = std::max(r, l1_norm(s.vec));
    return r;
}

std::size_t WalkSpec::support_rank() const {
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& s : steps_) rows.push_back(s.vec.coords());
    return integer_rank(rows);
}

// ---------------------------------------------------------------------------
// BallIndex

BallIndex::BallIndex(std::size_t dim, std::int64_t radius) : dim_(dim), radius_(radius) {
    require(dim >= 1, Errc::validation, "ball dimension must be >= 1");
    require(radius >= 0, Errc::validation, "ball radius must be >= 0");
    BigInt count = point_count(dim, radius);
    if (count > kMaxGridPoints) {
        fail(Errc::resource, "L1 ball of radius " + std::to_string(radius) + " in Z^" +
                                 std::to_string(dim) + " has " + count.str() +
                                 " points; limit is " + std::to_string(kMaxGridPoints));
    }
    points_.reserve(count.convert_to<std::size_t>());
    Point p(dim);
    // Lexicographic enumeration of all points with L1 norm <= radius.
    auto rec = [&](auto&& self, std::size_t axis, std::int64_t left) -> void {
        if (axis == dim) {
            points_.push_back(p);
            return;
        }
        for (std::int64_t v = -left; v <= left; ++v) {
            p[axis] = v;
            self(self, axis + 1, left - std::llabs(v));
        }
        p[axis] = 0;
    };
    rec(rec, 0, radius);
    lookup_.reserve(points_.size() * 2);
    for (std::uint32_t i = 0; i < points_.size(); ++i) lookup_.emplace(points_[i], i);
}

std::optional<std::size_t> BallIndex::index_of(const Point& p) const {
    auto it = lookup_.find(p);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

BigInt BallIndex::point_count(std::size_t dim, std::int64_t radius) {
    // N(k, R) = sum over last coordinate of N(k-1, R - |v|).
    std::vector<BigInt> cur(radius + 1, 1);  // N(0, r) = 1
    for (std::size_t k = 1; k <= dim; ++k) {
        std::vector<BigInt> next(radius + 1);
        for (std::int64_t r = 0; r <= radius; ++r) {
            BigInt acc = cur[r];  // v = 0
            for (std::int64_t v = 1; v <= r; ++v) acc += 2 * cur[r - v];
            next[r] = acc;
        }
        cur = std::move(next);
    }
    return cur[radius];
}

// ---------------------------------------------------------------------------
// DistributionGrid

const char* grid_mode_name(GridMode m) { return m == GridMode::exact ? "rational" : "float"; }

DistributionGrid DistributionGrid::exact_grid(std::shared_ptr<const BallIndex> index, std::uint64_t n,
                                              std::vector<Rational> mass, Rational truncation) {
    DistributionGrid g;
    g.mode_ = GridMode::exact;
    g.n_ = n;
    g.index_ = std::move(index);
    require(mass.size() == g.index_->size(), Errc::validation, "grid mass size mismatch");
    g.rmass_ = std::move(mass);
    g.rtrunc_ = std::move(truncation);
    return g;
}

DistributionGrid DistributionGrid::real_grid(std::shared_ptr<const BallIndex> index, std::uint64_t n,
                                             std::vector<double> mass, double truncation) {
    DistributionGrid g;
    g.mode_ = GridMode::real;
    g.n_ = n;
    g.index_ = std::move(index);
    require(mass.size() == g.index_->size(), Errc::validation, "grid mass size mismatch");
    g.fmass_ = std::move(mass);
    g.ftrunc_ = truncation;
    return g;
}

Rational DistributionGrid::mass(const Point& p) const {
    require(mode_ == GridMode::exact, Errc::validation, "mass(): grid is in float mode");
    auto idx = index_->index_of(p);
    return idx ? rmass_[*idx] : Rational(0);
}

double DistributionGrid::massf(const Point& p) const {
    auto idx = index_->index_of(p);
    if (!idx) return 0.0;
    if (mode_ == GridMode::exact) return rmass_[*idx].convert_to<double>();
    return fmass_[*idx];
}

Rational DistributionGrid::total_stored() const {
    require(mode_ == GridMode::exact, Errc::validation, "total_stored(): grid is in float mode");
    Rational t = 0;
    for (const auto& r : rmass_) t += r;
    return t;
}

const Rational& DistributionGrid::truncation_mass() const {
    if (mode_ != GridMode::exact) fail(Errc::validation, "truncation_mass(): grid is in float mode");
    return rtrunc_;
}

double DistributionGrid::total_storedf() const {
    if (mode_ == GridMode::exact) return total_stored().convert_to<double>();
    double t = 0;
    for (double v : fmass_) t += v;
    return t;
}

double DistributionGrid::truncation_massf() const {
    return mode_ == GridMode::exact ? rtrunc_.convert_to<double>() : ftrunc_;
}

const std::vector<Rational>& DistributionGrid::raw_exact() const {
    if (mode_ != GridMode::exact) fail(Errc::validation, "raw_exact(): grid is in float mode");
    return rmass_;
}

const std::vector<double>& DistributionGrid::raw_real() const {
    if (mode_ != GridMode::real) fail(Errc::validation, "raw_real(): grid is in rational mode");
    return fmass_;
}

bool operator==(const DistributionGrid& a, const DistributionGrid& b) {
    if (a.mode_ != b.mode_ || a.n_ != b.n_ || a.index_->dim() != b.index_->dim() ||
        a.index_->radius() != b.index_->radius()) {
        return false;
    }
    if (a.mode_ == GridMode::exact) return a.rmass_ == b.rmass_ && a.rtrunc_ == b.rtrunc_;
    return a.fmass_ == b.fmass_ && a.ftrunc_ == b.ftrunc_;
}

void DistributionGrid::write(std::ostream& out) const {
    out << "grid v1\n";
    out << "mode " << grid_mode_name(mode_) << "\n";
    out << "dimension " << dim() << "\n";
    out << "steps " << n_ << "\n";
    out << "radius " << radius() << "\n";
    char buf[64];
    if (mode_ == GridMode::exact) {
        out << "truncation " << rational_str(rtrunc_) << "\n";
        for (std::size_t i = 0; i < rmass_.size(); ++i) {
            if (rmass_[i] == 0) continue;
            out << "point";
            for (std::int64_t c : index_->point_at(i).coords()) out << ' ' << c;
            out << ' ' << rational_str(rmass_[i]) << "\n";
        }
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", ftrunc_);
        out << "truncation " << buf << "\n";
        for (std::size_t i = 0; i < fmass_.size(); ++i) {
            if (fmass_[i] == 0.0) continue;
            out << "point";
            for (std::int64_t c : index_->point_at(i).coords()) out << ' ' << c;
            std::snprintf(buf, sizeof buf, "%.17g", fmass_[i]);
            out << ' ' << buf << "\n";
        }
    }
}

DistributionGrid DistributionGrid::read(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_tokens = [&](std::vector<std::string>& words) {
        words.clear();
        while (std::getline(in, line)) {
            ++lineno;
            std::istringstream ls(line);
            std::string w;
            while (ls >> w) words.push_back(w);
            if (!words.empty() && words[0][0] != '#') return true;
            words.clear();
        }
        return false;
    };
    auto bad = [&](const std::string& msg) -> void {
        throw Error(Errc::parse, "grid:" + std::to_string(lineno) + ": " + msg, lineno, 1);
    };

    std::vector<std::string> w;
    if (!next_tokens(w) || w.size() != 2 || w[0] != "grid" || w[1] != "v1") bad("expected 'grid v1'");
    GridMode mode = GridMode::exact;
    std::size_t dim = 0;
    std::uint64_t steps = 0;
    std::int64_t radius = -1;
    std::string trunc_text;
    struct Row {
        Point p;
        std::string value;
    };
    std::vector<Row> rows;
    while (next_tokens(w)) {
        if (w[0] == "mode" && w.size() == 2) {
            if (w[1] == "rational") mode = GridMode::exact;
            else if (w[1] == "float") mode = GridMode::real;
            else bad("unknown mode '" + w[1] + "'");
        } else if (w[0] == "dimension" && w.size() == 2) {
            dim = std::stoul(w[1]);
        } else if (w[0] == "steps" && w.size() == 2) {
            steps = std::stoull(w[1]);
        } else if (w[0] == "radius" && w.size() == 2) {
            radius = std::stoll(w[1]);
        } else if (w[0] == "truncation" && w.size() == 2) {
            trunc_text = w[1];
        } else if (w[0] == "point") {
            if (dim == 0 || w.size() != dim + 2) bad("point row arity mismatch");
            std::vector<std::int64_t> coords;
            for (std::size_t i = 1; i <= dim; ++i) coords.push_back(std::stoll(w[i]));
            rows.push_back({Point(std::move(coords)), w.back()});
        } else {
            bad("unknown grid keyword '" + w[0] + "'");
        }
    }
    if (dim == 0 || radius < 0 || trunc_text.empty()) bad("incomplete grid header");

    auto parse_rat = [&](const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    };

    auto index = std::make_shared<BallIndex>(dim, radius);
    if (mode == GridMode::exact) {
        std::vector<Rational> mass(index->size(), Rational(0));
        for (const auto& r : rows) {
            auto idx = index->index_of(r.p);
            if (!idx) bad("point " + r.p.str() + " outside the ball");
            mass[*idx] = parse_rat(r.value);
        }
        return exact_grid(std::move(index), steps, std::move(mass), parse_rat(trunc_text));
    }
    std::vector<double> mass(index->size(), 0.0);
    for (const auto& r : rows) {
        auto idx = index->index_of(r.p);
        if (!idx) bad("point " + r.p.str() + " outside the ball");
        mass[*idx] = std::strtod(r.value.c_str(), nullptr);
    }
    return real_grid(std::move(index), steps, std::move(mass), std::strtod(trunc_text.c_str(), nullptr));
}

// ---------------------------------------------------------------------------
// Convolution DP

namespace {

/// Shift tables: for each walk step, the source index every ball cell pulls
/// from (kPad when the source lies outside the ball).
struct ShiftTables {
    std::vector<std::vector<std::uint32_t>> from;

    ShiftTables(const BallIndex& index, const WalkSpec& w) {
        from.resize(w.steps().size());
        for (std::size_t s = 0; s < w.steps().size(); ++s) {
            from[s].resize(index.size());
            const Point& v = w.steps()[s].vec;
            for (std::size_t i = 0; i < index.size(); ++i) {
                Point src = index.point_at(i) - v;
                auto idx = index.index_of(src);
                from[s][i] = idx ? static_cast<std::uint32_t>(*idx) : kPad;
            }
        }
    }
};

/// Exact convolution over big-integer path counts with a common weight
/// denominator: after n steps mass = count / D^n.
class ExactDp {
public:
    ExactDp(std::shared_ptr<const BallIndex> index, const WalkSpec& w)
        : index_(std::move(index)), walk_(w), shifts_(*index_, w), cur_(index_->size()) {
        den_ = walk_.weight_denominator();
        for (const auto& s : walk_.steps()) {
            numer_.push_back(BigInt(numerator(s.weight)) * (den_ / BigInt(denominator(s.weight))));
        }
        cur_[*index_->index_of(Point(index_->dim()))] = 1;
        den_pow_ = 1;
    }

    void step() {
        std::vector<BigInt> next(index_->size());
        for (std::size_t s = 0; s < numer_.size(); ++s) {
            const auto& from = shifts_.from[s];
            const BigInt& u = numer_[s];
            for (std::size_t i = 0; i < from.size(); ++i) {
                if (from[i] != kPad && !cur_[from[i]].is_zero()) next[i] += u * cur_[from[i]];
            }
        }
        cur_ = std::move(next);
        den_pow_ *= den_;
        ++n_;
    }

    std::uint64_t steps_done() const { return n_; }
    const BigInt& count_at(std::size_t i) const { return cur_[i]; }
    BigInt& count_at(std::size_t i) { return cur_[i]; }
    const BigInt& denominator_power() const { return den_pow_; }
    const BallIndex& index() const { return *index_; }

    Rational mass_at(const Point& p) const {
        auto idx = index_->index_of(p);
        return idx ? Rational(cur_[*idx], den_pow_) : Rational(0);
    }

    DistributionGrid grid() const {
        std::vector<Rational> mass(index_->size());
        BigInt total = 0;
        for (std::size_t i = 0; i < cur_.size(); ++i) {
            mass[i] = Rational(cur_[i], den_pow_);
            total += cur_[i];
        }
        return DistributionGrid::exact_grid(index_, n_, std::move(mass),
                                            Rational(den_pow_ - total, den_pow_));
    }

private:
    std::shared_ptr<const BallIndex> index_;
    WalkSpec walk_;
    ShiftTables shifts_;
    std::vector<BigInt> cur_;
    std::vector<BigInt> numer_;
    BigInt den_;
    BigInt den_pow_;
    std::uint64_t n_ = 0;
};

DistributionGrid dp_real(std::shared_ptr<const BallIndex> index, const WalkSpec& w, std::uint64_t n) {
    ShiftTables shifts(*index, w);
    const std::size_t npts = index->size();
    // One trailing pad slot keeps boundary handling branch-free: out-of-ball
    // sources read 0.
    std::vector<std::vector<std::uint32_t>> from = shifts.from;
    for (auto& t : from) {
        for (auto& v : t) {
            if (v == kPad) v = static_cast<std::uint32_t>(npts);
        }
    }
    std::vector<double> weights;
    for (const auto& s : w.steps()) weights.push_back(s.weight.convert_to<double>());

    std::vector<double> cur(npts + 1, 0.0), next(npts + 1, 0.0);
    cur[*index->index_of(Point(index->dim()))] = 1.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < weights.size(); ++s) {
            kernels::gather_axpy(next.data(), cur.data(), from[s].data(), weights[s], npts);
        }
        next[npts] = 0.0;
        cur.swap(next);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < npts; ++i) total += cur[i];
    cur.resize(npts);
    return DistributionGrid::real_grid(std::move(index), n, std::move(cur), 1.0 - total);
}

}  // namespace

DistributionGrid dp_step_distribution(const WalkSpec& w, std::uint64_t n, std::int64_t radius,
                                      GridMode mode) {
    require(radius >= 0, Errc::validation, "radius must be >= 0");
    auto index = std::make_shared<BallIndex>(w.dimension(), radius);
    if (mode == GridMode::real) return dp_real(std::move(index), w, n);
    ExactDp dp(std::move(index), w);
    for (std::uint64_t k = 0; k < n; ++k) dp.step();
    return dp.grid();
}

// ---------------------------------------------------------------------------
// Closed forms on Z^3

Rational z3_origin_return_exact(std::uint64_t n) {
    if (n % 2 != 0) return Rational(0);
    const std::uint64_t m = n / 2;
    const auto fact = factorials(2 * m);
    BigInt sum = 0;
    for (std::uint64_t i = 0; i <= m; ++i) {
        for (std::uint64_t j = 0; i + j <= m; ++j) {
            const std::uint64_t l = m - i - j;
            BigInt d = fact[i] * fact[j] * fact[l];
            sum += fact[2 * m] / (d * d);
        }
    }
    return Rational(sum, int_pow(6, 2 * m));
}

BigInt max_multinomial(std::uint64_t n) {
    const auto fact = factorials(n);
    std::uint64_t parts[3] = {n / 3, n / 3, n / 3};
    for (std::uint64_t i = 0; i < n % 3; ++i) ++parts[i];
    return fact[n] / (fact[parts[0]] * fact[parts[1]] * fact[parts[2]]);
}

Rational z3_upper_bound(std::uint64_t n) {
    require(n >= 1, Errc::validation, "z3_upper_bound needs n >= 1");
    const auto fact = factorials(2 * n);
    const BigInt central = fact[2 * n] / (fact[n] * fact[n]);
    return Rational(central * max_multinomial(n), int_pow(4, n) * int_pow(3, n));
}

double stirling_asymptotic(std::uint64_t n) {
    require(n >= 1, Errc::validation, "stirling_asymptotic needs n >= 1");
    const double pi = 3.14159265358979323846;
    return 3.0 * std::sqrt(3.0) / (2.0 * std::pow(pi, 1.5) * std::pow(static_cast<double>(n), 1.5));
}

// ---------------------------------------------------------------------------
// Mixture walks

MixtureSpec::MixtureSpec(WalkSpec a, WalkSpec b, Rational p)
    : component_a(std::move(a)), component_b(std::move(b)), prob_a(std::move(p)),
      prob_b(1 - prob_a) {
    require(component_a.dimension() == component_b.dimension(), Errc::dimension_mismatch,
            "mixture components must share a dimension");
    require(prob_a > 0 && prob_a < 1, Errc::validation, "mixture probability must be in (0,1)");
}

WalkSpec one_step_mixture(const MixtureSpec& m) {
    std::vector<WalkStep> steps;
    for (const auto& s : m.component_a.steps()) steps.push_back({s.vec, m.prob_a * s.weight});
    for (const auto& s : m.component_b.steps()) steps.push_back({s.vec, m.prob_b * s.weight});
    return WalkSpec(m.component_a.dimension(), std::move(steps));
}

DistributionGrid mixture_distribution(const MixtureSpec& m, std::uint64_t n, std::int64_t radius) {
    require(radius >= 0, Errc::validation, "radius must be >= 0");
    const std::size_t k = m.component_a.dimension();
    const std::int64_t reach =
        static_cast<std::int64_t>(n) * std::max(m.component_a.max_reach(), m.component_b.max_reach());
    auto full = std::make_shared<BallIndex>(k, reach);

    // Sparse per-step layers of both components as big-integer counts.
    struct Layers {
        std::vector<std::vector<std::pair<std::uint32_t, BigInt>>> at;
        BigInt den;
    };
    auto make_layers = [&](const WalkSpec& w) {
        Layers ls;
        ls.den = w.weight_denominator();
        ExactDp dp(full, w);
        for (std::uint64_t i = 0; i <= n; ++i) {
            std::vector<std::pair<std::uint32_t, BigInt>> layer;
            for (std::uint32_t j = 0; j < full->size(); ++j) {
                if (!dp.count_at(j).is_zero()) layer.emplace_back(j, dp.count_at(j));
            }
            ls.at.push_back(std::move(layer));
            if (i < n) dp.step();
        }
        return ls;
    };
    const Layers la = make_layers(m.component_a);
    const Layers lb = make_layers(m.component_b);

    const BigInt S = boost::integer::lcm(BigInt(denominator(m.prob_a)), BigInt(denominator(m.prob_b)));
    const BigInt P = BigInt(numerator(m.prob_a)) * (S / BigInt(denominator(m.prob_a)));
    const BigInt Q = BigInt(numerator(m.prob_b)) * (S / BigInt(denominator(m.prob_b)));
    const auto fact = factorials(n);

    std::vector<BigInt> acc(full->size());
    for (std::uint64_t i = 0; i <= n; ++i) {
        const BigInt scale = (fact[n] / (fact[i] * fact[n - i])) * int_pow(P, i) *
                             int_pow(Q, n - i) * int_pow(la.den, n - i) * int_pow(lb.den, i);
        for (const auto& [ia, ca] : la.at[i]) {
            const Point& pa = full->point_at(ia);
            const BigInt term = scale * ca;
            for (const auto& [ib, cb] : lb.at[n - i]) {
                const Point z = pa + full->point_at(ib);
                acc[*full->index_of(z)] += term * cb;
            }
        }
    }
    const BigInt G = int_pow(S, n) * int_pow(la.den, n) * int_pow(lb.den, n);

    auto out_index = std::make_shared<BallIndex>(k, radius);
    std::vector<Rational> mass(out_index->size(), Rational(0));
    Rational trunc = 0;
    for (std::uint32_t i = 0; i < full->size(); ++i) {
        if (acc[i].is_zero()) continue;
        Rational v(acc[i], G);
        auto idx = out_index->index_of(full->point_at(i));
        if (idx) {
            mass[*idx] = std::move(v);
        } else {
            trunc += v;
        }
    }
    return DistributionGrid::exact_grid(std::move(out_index), n, std::move(mass), std::move(trunc));
}

// ---------------------------------------------------------------------------
// Shifted-probability bound

bool shifted_bound_check(std::uint64_t n, const Point& x) {
    require(x.dim() == 3, Errc::dimension_mismatch, "shifted_bound_check is about Z^3");
    require(n >= 1, Errc::validation, "shifted_bound_check needs n >= 1");
    if ((l1_norm(x) % 2) != static_cast<std::int64_t>(n % 2)) return true;  // P(Y_n = x) = 0
    if (l1_norm(x) > static_cast<std::int64_t>(n)) return true;
    // Sweeps hit the same n for many x; keep the last few grids around.
    static std::mutex cache_mutex;
    static std::map<std::uint64_t, DistributionGrid> cache;
    const Rational lhs = [&] {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(n);
        if (it == cache.end()) {
            if (cache.size() >= 32) cache.clear();
            it = cache
                     .emplace(n, dp_step_distribution(WalkSpec::simple(3), n,
                                                      static_cast<std::int64_t>(n)))
                     .first;
        }
        return it->second.mass(x);
    }();
    Rational rhs = 0;
    for (std::uint64_t j = 0; j <= 3; ++j) rhs += z3_origin_return_exact(n + j);
    rhs *= 216;  // 6^3
    return lhs <= rhs;
}

// ---------------------------------------------------------------------------
// Origin-return series and recurrence classification

Rational origin_return_simple_exact(std::size_t k, std::uint64_t n) {
    require(k >= 1, Errc::validation, "dimension must be >= 1");
    if (n % 2 != 0) return Rational(0);
    const std::uint64_t m = n / 2;
    if (m == 0) return Rational(1);
    const auto fact = factorials(2 * m);
    // b_i = (m!/i!)^2; the x^m coefficient of (sum_i b_i x^i)^k equals
    // (m!)^{2k} * sum over compositions of prod 1/(i_j!)^2.
    std::vector<BigInt> base(m + 1);
    for (std::uint64_t i = 0; i <= m; ++i) {
        BigInt q = fact[m] / fact[i];
        base[i] = q * q;
    }
    std::vector<BigInt> poly = base;
    for (std::size_t e = 1; e < k; ++e) {
        std::vector<BigInt> next(m + 1);
        for (std::uint64_t i = 0; i <= m; ++i) {
            if (poly[i].is_zero()) continue;
            for (std::uint64_t j = 0; i + j <= m; ++j) {
                if (!base[j].is_zero()) next[i + j] += poly[i] * base[j];
            }
        }
        poly = std::move(next);
    }
    const BigInt mfact_pow = int_pow(fact[m], 2 * k);
    return Rational(fact[2 * m] * poly[m], mfact_pow * int_pow(2 * static_cast<std::uint64_t>(k), 2 * m));
}

std::vector<Rational> origin_return_series(const WalkSpec& w, std::uint64_t horizon) {
    std::vector<Rational> series(horizon + 1);
    series[0] = 1;
    if (w.is_simple()) {
        for (std::uint64_t n = 1; n <= horizon; ++n) {
            series[n] = origin_return_simple_exact(w.dimension(), n);
        }
        return series;
    }
    const std::int64_t reach = static_cast<std::int64_t>(horizon) * w.max_reach();
    auto index = std::make_shared<BallIndex>(w.dimension(), reach);  // resource-guarded
    ExactDp dp(index, w);
    const Point origin(w.dimension());
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        dp.step();
        series[n] = dp.mass_at(origin);
    }
    return series;
}

std::vector<Rational> first_return_cdf(const WalkSpec& w, std::uint64_t horizon) {
    const std::int64_t reach = static_cast<std::int64_t>(horizon) * w.max_reach();
    auto index = std::make_shared<BallIndex>(w.dimension(), reach);
    ExactDp dp(index, w);
    const std::size_t origin_idx = *index->index_of(Point(w.dimension()));
    std::vector<Rational> cdf(horizon + 1);
    Rational acc = 0;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        dp.step();
        acc += Rational(dp.count_at(origin_idx), dp.denominator_power());
        dp.count_at(origin_idx) = 0;  // absorb: paths that returned stop here
        cdf[n] = acc;
    }
    return cdf;
}

const char* verdict_name(RecurrenceVerdict v) {
    switch (v) {
        case RecurrenceVerdict::recurrent_evidence: return "recurrent_evidence";
        case RecurrenceVerdict::transient_evidence: return "transient_evidence";
        case RecurrenceVerdict::degenerate: return "degenerate";
    }
    return "unknown";
}

RecurrenceReport classify_recurrence(const WalkSpec& w, std::uint64_t horizon) {
    require(horizon >= 10, Errc::validation, "classification horizon must be >= 10");
    RecurrenceReport rep{};
    rep.horizon = horizon;
    rep.support_rank = w.support_rank();

    const auto series = origin_return_series(w, horizon);
    rep.partial_sum = 0;
    for (const auto& r : series) rep.partial_sum += r;

    // Least squares on log P(Y_2m = 0) vs log m over the top half of the
    // horizon; alpha is minus the slope.
    const std::uint64_t M = horizon / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::uint64_t m = std::max<std::uint64_t>(1, M / 2); m <= M; ++m) {
        const Rational& r = series[2 * m];
        if (r <= 0) continue;
        const double lx = std::log(static_cast<double>(m));
        const double ly = std::log(r.convert_to<double>());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    rep.fit_points = cnt;
    rep.stable_fit = cnt >= 5;
    if (cnt >= 2) {
        const double denom = cnt * sxx - sx * sx;
        rep.alpha = -(cnt * sxy - sx * sy) / denom;
    } else {
        rep.alpha = std::numeric_limits<double>::quiet_NaN();
    }

    if (rep.support_rank < w.dimension()) {
        rep.verdict = RecurrenceVerdict::degenerate;
    } else if (std::isnan(rep.alpha)) {
        // No usable returns in the fit window: the series stopped growing.
        rep.verdict = RecurrenceVerdict::transient_evidence;
        rep.stable_fit = false;
    } else {
        rep.verdict = rep.alpha <= 1.0 ? RecurrenceVerdict::recurrent_evidence
                                       : RecurrenceVerdict::transient_evidence;
    }
    return rep;
}

}  // namespace pw
