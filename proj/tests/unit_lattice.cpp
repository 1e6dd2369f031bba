#include "pebblewalk/lattice.hpp"

#include <doctest.h>

#include <random>

using namespace pw;

TEST_CASE("l1 distance basics") {
    CHECK(l1_distance(Point({0, 0, 0}), Point({0, 0, 0})) == 0);
    CHECK(l1_distance(Point({1, -2, 3}), Point({0, 0, 0})) == 6);
    CHECK(l1_distance(Point({2, 2}), Point({-1, 3})) == 4);
    CHECK_THROWS_AS(l1_distance(Point({1}), Point({1, 2})), Error);
}

TEST_CASE("l1 distance is a metric on random triples") {
    std::mt19937 gen(1234);
    std::uniform_int_distribution<int> coord(-20, 20);
    std::uniform_int_distribution<int> dims(1, 6);
    for (int iter = 0; iter < 500; ++iter) {
        const std::size_t k = dims(gen);
        auto rand_point = [&] {
            Point p(k);
            for (std::size_t i = 0; i < k; ++i) p[i] = coord(gen);
            return p;
        };
        const Point a = rand_point(), b = rand_point(), c = rand_point();
        CHECK(l1_distance(a, b) == l1_distance(b, a));
        CHECK((l1_distance(a, b) == 0) == (a == b));
        CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c));
    }
}

TEST_CASE("move parsing and application") {
    CHECK(Move::parse("+e1") == Move::along(0, +1));
    CHECK(Move::parse("-e3") == Move::along(2, -1));
    CHECK(Move::parse("0").is_zero());
    CHECK(Move::along(1, -1).str() == "-e2");
    CHECK_THROWS_AS(Move::parse("e1"), Error);
    CHECK_THROWS_AS(Move::parse("+e0"), Error);
    Point p({5, 5});
    Move::along(1, -1).apply(p);
    CHECK(p == Point({5, 4}));
}

TEST_CASE("flag plane membership in Z^8") {
    AffineSubspace plane(Point::origin(8),
                         {{0, 0, 0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 0, 0, 1}});
    CHECK(plane.contains(Point({0, 0, 0, 0, 0, 0, 3, -5})));
    CHECK(plane.contains(Point::origin(8)));
    CHECK_FALSE(plane.contains(Point({1, 0, 0, 0, 0, 0, 3, -5})));
}

TEST_CASE("point subspace contains only its base") {
    AffineSubspace pt = AffineSubspace::point(Point({2, -1}));
    CHECK(pt.contains(Point({2, -1})));
    CHECK_FALSE(pt.contains(Point({2, 0})));
    CHECK_FALSE(pt.contains(Point({0, 0})));
}

TEST_CASE("non-axis-aligned membership is exact integer arithmetic") {
    // span{(1,2)}: (2,4) is in, (2,3) is not
    AffineSubspace s(Point::origin(2), {{1, 2}});
    CHECK(s.contains(Point({2, 4})));
    CHECK_FALSE(s.contains(Point({2, 3})));
    CHECK(s.contains(Point({-7, -14})));

    // Brute-force oracle over small coefficient combinations.
    AffineSubspace t(Point({1, 0, 2}), {{2, 1, 0}, {0, 3, -1}});
    std::mt19937 gen(99);
    std::uniform_int_distribution<int> coef(-6, 6);
    for (int iter = 0; iter < 200; ++iter) {
        const int a = coef(gen), b = coef(gen);
        Point x({1 + 2 * a, 0 + a + 3 * b, 2 - b});
        CHECK(t.contains(x));
    }
    std::uniform_int_distribution<int> coord(-8, 8);
    for (int iter = 0; iter < 300; ++iter) {
        Point x({coord(gen), coord(gen), coord(gen)});
        bool expect = false;
        for (int a = -20; a <= 20 && !expect; ++a) {
            for (int b = -20; b <= 20 && !expect; ++b) {
                if (x == Point({1 + 2 * a, a + 3 * b, 2 - b})) expect = true;
            }
        }
        CHECK(t.contains(x) == expect);
    }
}

TEST_CASE("membership is invariant under adding basis vectors") {
    AffineSubspace s(Point({0, 1, 0, 0}), {{1, 1, 0, 0}, {0, 0, 2, 1}});
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> coord(-5, 5);
    for (int iter = 0; iter < 200; ++iter) {
        Point x({coord(gen), coord(gen), coord(gen), coord(gen)});
        const bool before = s.contains(x);
        Point shifted = x + Point({1, 1, 0, 0});
        CHECK(s.contains(shifted) == before);
        Point shifted2 = x - Point({0, 0, 2, 1});
        CHECK(s.contains(shifted2) == before);
    }
}

TEST_CASE("dependent basis vectors are rejected") {
    CHECK_THROWS_AS(AffineSubspace(Point::origin(3), {{1, 2, 0}, {2, 4, 0}}), Error);
    CHECK_THROWS_AS(AffineSubspace(Point::origin(2), {{0, 0}}), Error);
}

TEST_CASE("integer rank") {
    CHECK(integer_rank({}) == 0);
    CHECK(integer_rank({{1, 0}, {0, 1}}) == 2);
    CHECK(integer_rank({{1, 2}, {2, 4}}) == 1);
    CHECK(integer_rank({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}) == 2);
}

TEST_CASE("flag set wrapper") {
    FlagSet none = FlagSet::none(4);
    CHECK(none.empty());
    CHECK_FALSE(none.contains(Point::origin(4)));
    FlagSet pt = FlagSet::subspace(AffineSubspace::point(Point::origin(4)));
    CHECK(pt.contains(Point::origin(4)));
    CHECK_FALSE(pt.contains(Point({1, 0, 0, 0})));
}
