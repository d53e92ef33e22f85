#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "placeopt/construction.hpp"
#include "placeopt/equivalence.hpp"
#include "placeopt/gallery.hpp"

using namespace placeopt;
using Catch::Approx;

TEST_CASE("a placement is equivalent to its rotated copy") {
    auto rng = helpers::make_rng(61);
    const auto pl = helpers::random_placement<2>(3, rng);
    const CoefficientSequence coeffs({1.0, 0.5, 0.8});
    const auto rot = OrthogonalTransform<2>::rotation(-std::numbers::pi / 3.0);
    const auto moved = transform_placement(pl, rot, SignPattern::all_plus(3), {0, 1, 2});
    const auto res = placements_equivalent<2>(pl, moved, coeffs, 1e-6);
    REQUIRE(res.equivalent);
    // the witness actually maps a onto b
    const auto& w = *res.witness;
    for (int i = 0; i < 3; ++i) {
        const Vec<2> mapped = static_cast<double>(w.signs[i]) *
                              (w.transform.matrix * pl.bearing(w.permutation[static_cast<std::size_t>(i)]));
        CHECK((mapped - moved.bearing(i)).norm() <= 1e-6);
    }
}

TEST_CASE("replacing one bearing with a random direction breaks equivalence") {
    auto rng = helpers::make_rng(62);
    const auto pl = helpers::random_placement<3>(4, rng);
    const CoefficientSequence coeffs({1.0, 1.0, 1.0, 1.0});
    auto bearings = pl.bearings();
    bearings[2] = helpers::random_unit<3>(rng);
    const auto other = Placement<3>::from_bearings(Vec<3>{}, bearings, pl.ranges());
    CHECK_FALSE(placements_equivalent<3>(pl, other, coeffs, 1e-6).equivalent);
}

TEST_CASE("two triangle unions at different relative rotations tie the objective "
          "but are not equivalent") {
    const CoefficientSequence eq6({1, 1, 1, 1, 1, 1});
    const auto tri = regular_polygon_bearings(3);
    auto make_union = [&](double rel) {
        std::vector<Vec<2>> bearings = tri;
        const auto rot = OrthogonalTransform<2>::rotation(rel);
        for (const auto& g : tri) bearings.push_back(rot.matrix * g);
        return Placement<2>::from_bearings(bearings);
    };
    const auto a = make_union(0.0);
    const auto b = make_union(std::numbers::pi / 6.0);
    const double obj_a = objective(frame_operator<2>(eq6, a.bearings()));
    const double obj_b = objective(frame_operator<2>(eq6, b.bearings()));
    CHECK(obj_a == Approx(obj_b).margin(1e-12));
    CHECK_FALSE(placements_equivalent<2>(a, b, eq6, 1e-6).equivalent);
}

TEST_CASE("equivalence is reflexive and symmetric") {
    auto rng = helpers::make_rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const auto pl = helpers::random_placement<3>(n, rng);
        const CoefficientSequence coeffs(helpers::random_coefficients(n, rng));
        CHECK(placements_equivalent<3>(pl, pl, coeffs, 1e-9).equivalent);

        const OrthogonalTransform<3> u(helpers::random_orthogonal<3>(rng));
        const SignPattern signs(helpers::random_signs(n, rng));
        std::vector<int> ident(static_cast<std::size_t>(n));
        std::iota(ident.begin(), ident.end(), 0);
        const auto moved = transform_placement(pl, u, signs, ident);
        CHECK(placements_equivalent<3>(pl, moved, coeffs, 1e-6).equivalent);
        CHECK(placements_equivalent<3>(moved, pl, coeffs, 1e-6).equivalent);
    }
}

TEST_CASE("equivalent placements have matching objectives within the stated budget") {
    auto rng = helpers::make_rng(64);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const double tol = 1e-4;
        const auto pl = helpers::random_placement<2>(n, rng);
        const CoefficientSequence coeffs(helpers::random_coefficients(n, rng));
        // an equivalent copy with bearing noise below tol
        const OrthogonalTransform<2> u(helpers::random_orthogonal<2>(rng));
        std::vector<int> ident(static_cast<std::size_t>(n));
        std::iota(ident.begin(), ident.end(), 0);
        auto moved = transform_placement(pl, u, SignPattern::all_plus(n), ident);
        std::vector<Vec<2>> noisy = moved.bearings();
        std::uniform_real_distribution<double> jitter(-tol / 10.0, tol / 10.0);
        for (auto& g : noisy) {
            g[0] += jitter(rng);
            g[1] += jitter(rng);
            g = g / g.norm();
        }
        const auto b = Placement<2>::from_bearings(noisy);
        const auto res = placements_equivalent<2>(pl, b, coeffs, tol);
        REQUIRE(res.equivalent);
        const double ga = objective(frame_operator<2>(coeffs, pl.bearings()));
        const double gb = objective(frame_operator<2>(coeffs, b.bearings()));
        CHECK(std::abs(ga - gb) <= 2 * tol * coeffs.sum_squares());
    }
}

TEST_CASE("witness permutations only shuffle matching weights") {
    auto rng = helpers::make_rng(65);
    const CoefficientSequence coeffs({1.0, 1.0, 2.0, 2.0});
    const auto pl = helpers::random_placement<2>(4, rng);
    const OrthogonalTransform<2> u(helpers::random_orthogonal<2>(rng));
    // swap the two equal-weight pairs
    const auto moved = transform_placement(pl, u, SignPattern::all_plus(4), {1, 0, 3, 2});
    const auto res = placements_equivalent<2>(pl, moved, coeffs, 1e-6);
    REQUIRE(res.equivalent);
    for (int i = 0; i < 4; ++i)
        CHECK(coeffs.value(res.witness->permutation[static_cast<std::size_t>(i)]) ==
              Approx(coeffs.value(i)));
}

TEST_CASE("equivalence rejects unsupported sizes and mismatched inputs") {
    auto rng = helpers::make_rng(66);
    const auto big_a = helpers::random_placement<2>(9, rng);
    const auto big_b = helpers::random_placement<2>(9, rng);
    CHECK_THROWS_AS(
        placements_equivalent<2>(big_a, big_b, CoefficientSequence(std::vector<double>(9, 1.0)),
                                 1e-6),
        unsupported_error);

    const auto a = helpers::random_placement<2>(3, rng);
    const auto b = helpers::random_placement<2>(4, rng);
    CHECK_THROWS_AS(
        placements_equivalent<2>(a, b, CoefficientSequence({1, 1, 1}), 1e-6),
        contract_error);
    CHECK_THROWS_AS(
        placements_equivalent<2>(a, a, CoefficientSequence({1, 1}), 1e-6),
        contract_error);
}
