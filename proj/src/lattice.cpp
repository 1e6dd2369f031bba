#include "pebblewalk/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace pw {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::dimension_mismatch: return "dimension_mismatch";
        case Errc::validation: return "validation";
        case Errc::parse: return "parse";
        case Errc::resource: return "resource";
        case Errc::trapped_states: return "trapped_states";
        case Errc::io: return "io";
        case Errc::usage: return "usage";
    }
    return "unknown";
}

std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

static void check_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        fail(Errc::dimension_mismatch,
             std::string(what) + ": dimensions " + std::to_string(a) + " and " + std::to_string(b) + " differ");
    }
}

Point& Point::operator+=(const Point& o) {
    check_same_dim(dim(), o.dim(), "point addition");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Point& Point::operator-=(const Point& o) {
    check_same_dim(dim(), o.dim(), "point subtraction");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Point Point::operator-() const {
    Point r(dim());
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = -c_[i];
    return r;
}

std::string Point::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i) os << ',';
        os << c_[i];
    }
    os << ')';
    return os.str();
}

std::int64_t l1_distance(const Point& a, const Point& b) {
    check_same_dim(a.dim(), b.dim(), "l1_distance");
    std::int64_t d = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) d += std::llabs(a[i] - b[i]);
    return d;
}

std::string Move::str() const {
    if (is_zero()) return "0";
    std::string s = sign > 0 ? "+e" : "-e";
    s += std::to_string(axis + 1);
    return s;
}

Move Move::parse(const std::string& text) {
    if (text == "0") return Move::zero();
    if (text.size() >= 3 && (text[0] == '+' || text[0] == '-') && text[1] == 'e') {
        int axis = 0;
        for (std::size_t i = 2; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') fail(Errc::parse, "bad move '" + text + "'");
            axis = axis * 10 + (text[i] - '0');
        }
        if (axis < 1) fail(Errc::parse, "bad move axis in '" + text + "'");
        return Move::along(axis - 1, text[0] == '+' ? 1 : -1);
    }
    fail(Errc::parse, "bad move '" + text + "' (expected +eK, -eK or 0)");
}

// Row-echelon reduction of integer rows under unimodular row operations.
// Returns rows with strictly increasing pivot columns; dependent rows
// reduce to zero and are dropped (count reported via zero_rows).
static std::vector<std::vector<BigInt>> echelonize(std::vector<std::vector<BigInt>> rows,
                                                   std::vector<std::size_t>& pivots,
                                                   std::size_t& zero_rows) {
    pivots.clear();
    zero_rows = 0;
    if (rows.empty()) return rows;
    const std::size_t k = rows[0].size();
    std::size_t r = 0;
    for (std::size_t col = 0; col < k && r < rows.size(); ++col) {
        // Reduce all entries below row r in this column to a single nonzero.
        for (;;) {
            std::size_t best = rows.size();
            for (std::size_t i = r; i < rows.size(); ++i) {
                if (rows[i][col] != 0 && (best == rows.size() || abs(rows[i][col]) < abs(rows[best][col]))) {
                    best = i;
                }
            }
            if (best == rows.size()) break;  // column is clear
            std::swap(rows[r], rows[best]);
            bool others = false;
            for (std::size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                BigInt q = rows[i][col] / rows[r][col];
                for (std::size_t j = 0; j < k; ++j) rows[i][j] -= q * rows[r][j];
                if (rows[i][col] != 0) others = true;
            }
            if (!others) {
                pivots.push_back(col);
                ++r;
                break;
            }
        }
    }
    // Drop all-zero rows (linear dependence).
    std::vector<std::vector<BigInt>> out;
    for (auto& row : rows) {
        bool zero = std::all_of(row.begin(), row.end(), [](const BigInt& v) { return v == 0; });
        if (zero) {
            ++zero_rows;
        } else {
            out.push_back(std::move(row));
        }
    }
    return out;
}

AffineSubspace::AffineSubspace(Point base, std::vector<std::vector<std::int64_t>> basis)
    : base_(std::move(base)), basis_(std::move(basis)) {
    std::vector<std::vector<BigInt>> rows;
    rows.reserve(basis_.size());
    for (const auto& v : basis_) {
        check_same_dim(base_.dim(), v.size(), "subspace basis vector");
        rows.emplace_back(v.begin(), v.end());
    }
    std::size_t zero_rows = 0;
    echelon_ = echelonize(std::move(rows), pivot_cols_, zero_rows);
    if (zero_rows != 0) {
        fail(Errc::validation, "subspace basis vectors are linearly dependent");
    }
    free_axis_.assign(base_.dim(), 0);
    axis_aligned_ = true;
    for (const auto& v : basis_) {
        int nonzero = -1;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] == 0) continue;
            if (nonzero >= 0 || (v[j] != 1 && v[j] != -1)) {
                nonzero = -2;
                break;
            }
            nonzero = static_cast<int>(j);
        }
        if (nonzero < 0 || free_axis_[nonzero]) {
            axis_aligned_ = false;
            break;
        }
        free_axis_[nonzero] = 1;
    }
}

bool AffineSubspace::contains(const Point& x) const {
    check_same_dim(base_.dim(), x.dim(), "subspace membership");
    if (axis_aligned_) {
        for (std::size_t j = 0; j < free_axis_.size(); ++j) {
            if (!free_axis_[j] && x[j] != base_[j]) return false;
        }
        return true;
    }
    std::vector<BigInt> t(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) t[i] = BigInt(x[i]) - BigInt(base_[i]);
    // Forward substitution against the echelon rows: each pivot coefficient
    // must divide exactly, and the residual must vanish.
    for (std::size_t r = 0; r < echelon_.size(); ++r) {
        const std::size_t c = pivot_cols_[r];
        if (t[c] == 0) continue;
        if (t[c] % echelon_[r][c] != 0) return false;
        BigInt q = t[c] / echelon_[r][c];
        for (std::size_t j = 0; j < t.size(); ++j) t[j] -= q * echelon_[r][j];
    }
    return std::all_of(t.begin(), t.end(), [](const BigInt& v) { return v == 0; });
}

std::size_t integer_rank(const std::vector<std::vector<std::int64_t>>& vectors) {
    if (vectors.empty()) return 0;
    std::vector<std::vector<BigInt>> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) rows.emplace_back(v.begin(), v.end());
    std::vector<std::size_t> pivots;
    std::size_t zero_rows = 0;
    auto ech = echelonize(std::move(rows), pivots, zero_rows);
    return ech.size();
}

}  // namespace pw
