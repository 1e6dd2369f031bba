#pragma once

#include "pebblewalk/core.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pw {

/// A cell of the integer lattice Z^k. The dimension k is a runtime value.
class Point {
public:
    Point() = default;
    explicit Point(std::size_t dim) : c_(dim, 0) {}
    explicit Point(std::vector<std::int64_t> coords) : c_(std::move(coords)) {}
    Point(std::initializer_list<std::int64_t> coords) : c_(coords) {}

    static Point origin(std::size_t dim) { return Point(dim); }

    std::size_t dim() const { return c_.size(); }
    std::int64_t operator[](std::size_t i) const { return c_[i]; }
    std::int64_t& operator[](std::size_t i) { return c_[i]; }
    const std::vector<std::int64_t>& coords() const { return c_; }

    Point& operator+=(const Point& o);
    Point& operator-=(const Point& o);
    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    Point operator-() const;

    friend bool operator==(const Point& a, const Point& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Point& a, const Point& b) { return a.c_ != b.c_; }
    friend bool operator<(const Point& a, const Point& b) { return a.c_ < b.c_; }

    std::string str() const;

private:
    std::vector<std::int64_t> c_;
};

struct PointHash {
    std::size_t operator()(const Point& p) const {
        std::size_t h = 0x9e3779b97f4a7c15ull ^ p.dim();
        for (std::int64_t v : p.coords()) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

/// Sum of coordinate-wise absolute differences (city-block metric).
std::int64_t l1_distance(const Point& a, const Point& b);

inline std::int64_t l1_norm(const Point& a) { return l1_distance(a, Point(a.dim())); }

/// A unit step +-e_axis, or the zero move. Moves never change dimension;
/// the owning automaton fixes the ambient k and validates axis < k.
struct Move {
    int axis = -1;  // -1 encodes the zero move
    int sign = 0;   // +1 or -1 when axis >= 0

    static Move zero() { return Move{}; }
    static Move along(int axis, int sign) { return Move{axis, sign}; }

    bool is_zero() const { return axis < 0; }

    void apply(Point& p) const {
        if (axis >= 0) p[static_cast<std::size_t>(axis)] += sign;
    }
    Point vector(std::size_t dim) const {
        Point v(dim);
        apply(v);
        return v;
    }

    friend bool operator==(const Move& a, const Move& b) {
        return (a.is_zero() && b.is_zero()) || (a.axis == b.axis && a.sign == b.sign);
    }
    friend bool operator!=(const Move& a, const Move& b) { return !(a == b); }
    friend bool operator<(const Move& a, const Move& b) {
        if (a.axis != b.axis) return a.axis < b.axis;
        return a.sign < b.sign;
    }

    /// "+e1", "-e3", "0"; axes are 1-based in text form.
    std::string str() const;
    static Move parse(const std::string& text);
};

/// An integer affine subspace base + span_Z{basis}. Membership is decided
/// with exact integer elimination; basis vectors must be linearly
/// independent over the rationals.
class AffineSubspace {
public:
    AffineSubspace(Point base, std::vector<std::vector<std::int64_t>> basis);

    static AffineSubspace point(Point base) { return AffineSubspace(std::move(base), {}); }

    std::size_t dim() const { return base_.dim(); }
    std::size_t rank() const { return echelon_.size(); }
    const Point& base() const { return base_; }
    const std::vector<std::vector<std::int64_t>>& basis() const { return basis_; }

    bool contains(const Point& x) const;

private:
    Point base_;
    std::vector<std::vector<std::int64_t>> basis_;
    // Row-echelon lattice basis over Z, pivot columns strictly increasing.
    std::vector<std::vector<BigInt>> echelon_;
    std::vector<std::size_t> pivot_cols_;
    // Fast path for bases made of distinct +-unit vectors: membership is a
    // coordinate comparison on the non-free axes. Simulation loops hit this.
    bool axis_aligned_ = false;
    std::vector<std::uint8_t> free_axis_;
};

/// The flag set M: either no flags at all or an affine subspace of flags.
class FlagSet {
public:
    static FlagSet none(std::size_t dim) { return FlagSet(dim); }
    static FlagSet subspace(AffineSubspace s) { return FlagSet(std::move(s)); }

    std::size_t dim() const { return dim_; }
    bool empty() const { return !space_.has_value(); }
    bool contains(const Point& x) const { return space_ && space_->contains(x); }
    const std::optional<AffineSubspace>& space() const { return space_; }

private:
    explicit FlagSet(std::size_t dim) : dim_(dim) {}
    explicit FlagSet(AffineSubspace s) : dim_(s.dim()), space_(std::move(s)) {}

    std::size_t dim_;
    std::optional<AffineSubspace> space_;
};

/// Rank over Q of a set of integer vectors, via exact elimination.
std::size_t integer_rank(const std::vector<std::vector<std::int64_t>>& vectors);

}  // namespace pw
