#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hyp/model.hpp"
#include "hyp/shadowing.hpp"

using namespace hyp;

namespace {

Point2 plane(double x, double y) { return {x, y, space_kind::plane}; }
Point2 torus(double x, double y) { return {x, y, space_kind::torus}; }

const double SQ5 = std::sqrt(5.0);
const double LAM_S = (3.0 - SQ5) / 2.0;
const double LAM_U = (3.0 + SQ5) / 2.0;

// Orthonormal eigen frame of [[2,1],[1,1]].
vec2 unit_s() {
    double phi = (1.0 + SQ5) / 2.0;
    return normalize2({1.0, -phi});
}
vec2 unit_u() {
    double phi = (1.0 + SQ5) / 2.0;
    return normalize2({1.0, phi - 1.0});
}

// Closed-form linear correction for the cat map: the unique bounded exact
// orbit through corrections v_i with v_{i+1} = A v_i - e_i, solved stably
// component-wise (stable part forward from v^s_0 = 0, unstable part backward
// from v^u_{n-1} = 0). e_i = x_{i+1} - A x_i wrapped to the nearest image.
std::vector<Point2> linear_shadow(const SystemModel& m, const std::vector<Point2>& x) {
    std::size_t n = x.size();
    vec2 es = unit_s(), eu = unit_u();
    std::vector<double> es_err(n - 1), eu_err(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        vec2 e = point_diff(x[i + 1], forward(m, x[i]));
        es_err[i] = dot(e, es);
        eu_err[i] = dot(e, eu);
    }
    std::vector<double> vs(n, 0.0), vu(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) vs[i + 1] = LAM_S * vs[i] - es_err[i];
    for (std::size_t i = n - 1; i-- > 0;) vu[i] = (vu[i + 1] + eu_err[i]) / LAM_U;
    std::vector<Point2> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = translate(x[i], vs[i] * es + vu[i] * eu);
    return z;
}

double sup_correction(const std::vector<Point2>& x, const std::vector<Point2>& z) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, distance(x[i], z[i]));
    return worst;
}

} // namespace

TEST_CASE("linear correction oracle produces an exact orbit") {
    SystemModel m = make_cat_map();
    PseudoOrbit o = make_noisy_orbit(m, torus(0.2, 0.7), 50, 1e-4, 11);
    std::vector<Point2> z = linear_shadow(m, o.points);
    // exactness: the correction satisfies the orbit equation to float noise
    for (std::size_t i = 0; i + 1 < z.size(); ++i)
        CHECK(distance(forward(m, z[i]), z[i + 1]) < 1e-12);
    // boundedness: within C alpha/(1-lambda)
    CHECK(sup_correction(o.points, z) <= 1.5 * o.alpha / (1.0 - LAM_S));
}

TEST_CASE("noisy orbit validates against its claimed alpha") {
    SystemModel m = make_cat_map();
    PseudoOrbit o = make_noisy_orbit(m, torus(0.3, 0.4), 50, 1e-4, 7);
    CHECK(o.alpha == doctest::Approx(1e-4).epsilon(1e-12));
    OrbitValidation v = validate_pseudo_orbit(m, o);
    CHECK(v.valid);
    CHECK(v.worst_gap <= o.alpha);
    CHECK(v.worst_gap > 0.0);

    SystemModel h = make_horseshoe();
    PseudoOrbit oh = make_noisy_orbit(h, plane(0.25, 0.1), 50, 1e-4, 7);
    CHECK(oh.alpha == doctest::Approx(2e-4).epsilon(1e-12));
    OrbitValidation vh = validate_pseudo_orbit(h, oh);
    CHECK(vh.valid);
}

TEST_CASE("noisy orbit generation is deterministic in the seed") {
    SystemModel m = make_cat_map();
    PseudoOrbit a = make_noisy_orbit(m, torus(0.3, 0.4), 30, 1e-4, 42);
    PseudoOrbit b = make_noisy_orbit(m, torus(0.3, 0.4), 30, 1e-4, 42);
    PseudoOrbit c = make_noisy_orbit(m, torus(0.3, 0.4), 30, 1e-4, 43);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        CHECK(distance(a.points[i], b.points[i]) == 0.0);
    bool differs = false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        differs = differs || distance(a.points[i], c.points[i]) > 0.0;
    CHECK(differs);
}

TEST_CASE("shadowing an exact orbit returns it") {
    SystemModel m = make_cat_map();
    PseudoOrbit o;
    Point2 p = torus(0.123, 0.456);
    for (int i = 0; i < 40; ++i) {
        o.points.push_back(p);
        p = forward(m, p);
    }
    o.alpha = 1e-13;
    ShadowResult r = shadow(m, o);
    CHECK(r.achieved_beta < 1e-10);
    CHECK(r.orbit_residual < 1e-10);
}

TEST_CASE("iterated bracketing matches the linear oracle on the cat map") {
    SystemModel m = make_cat_map();
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        PseudoOrbit o = make_noisy_orbit(m, torus(0.15, 0.65), 50, 1e-4, seed);
        ShadowResult r = shadow(m, o);
        std::vector<Point2> z = linear_shadow(m, o.points);
        double worst = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            worst = std::max(worst, distance(r.orbit[i], z[i]));
        CHECK(worst <= 1e-9);
        CHECK(r.achieved_beta <= r.predicted_beta * (1.0 + 1e-9));
        CHECK(r.achieved_beta <= 1.5 * o.alpha / (1.0 - LAM_S));
        CHECK_FALSE(r.bound_exceeded);
        CHECK(r.orbit_residual < 1e-11);
    }
}

TEST_CASE("achieved shadowing radius is linear in the noise amplitude") {
    SystemModel m = make_cat_map();
    std::vector<double> amps = {1e-5, 1e-4, 1e-3};
    std::vector<double> betas;
    for (double a : amps) {
        PseudoOrbit o = make_noisy_orbit(m, torus(0.15, 0.65), 50, a, 9);
        betas.push_back(shadow(m, o).achieved_beta);
    }
    double r10 = betas[1] / betas[0];
    double r21 = betas[2] / betas[1];
    CHECK(std::abs(r10 - 10.0) <= 1.0);
    CHECK(std::abs(r21 - 10.0) <= 1.0);
}

TEST_CASE("horseshoe shadow preserves the itinerary") {
    SystemModel m = make_horseshoe();
    PseudoOrbit o = make_noisy_orbit(m, plane(0.75, 0.25), 40, 1e-4, 5);
    ShadowResult r = shadow(m, o);
    CHECK(r.achieved_beta <= r.predicted_beta * (1.0 + 1e-9));
    CHECK(r.orbit_residual < 1e-11);
    for (std::size_t i = 0; i < r.orbit.size(); ++i) {
        // same branch strip as the pseudo point, well off the gap
        bool pseudo_low = o.points[i].y < 0.5;
        bool shadow_low = r.orbit[i].y < 0.5;
        CHECK(pseudo_low == shadow_low);
    }
}

TEST_CASE("shadowing is unique at this scale") {
    SystemModel m = make_horseshoe();
    PseudoOrbit o = make_noisy_orbit(m, plane(0.9, 0.1), 40, 1e-5, 13);
    ShadowResult r1 = shadow(m, o);
    // jittering the claimed alpha does not move the constructed orbit
    PseudoOrbit o2 = o;
    o2.alpha = o.alpha * 1.5;
    ShadowResult r2 = shadow(m, o2);
    for (std::size_t i = 0; i < r1.orbit.size(); ++i)
        CHECK(distance(r1.orbit[i], r2.orbit[i]) < 1e-12);
}

TEST_CASE("rejects an orbit whose jumps exceed the claimed alpha") {
    SystemModel m = make_cat_map();
    PseudoOrbit o = make_noisy_orbit(m, torus(0.2, 0.2), 20, 1e-4, 3);
    o.alpha = 1e-6; // understated claim
    CHECK_THROWS_AS(shadow(m, o), error);
    try {
        shadow(m, o);
    } catch (const error& e) {
        CHECK(e.kind() == "validation_error");
    }
}

TEST_CASE("periodic pseudo-orbit shadows to a periodic orbit") {
    SystemModel m = make_cat_map();
    // near-fixed noise loop around the origin
    PseudoOrbit o;
    o.boundary = orbit_boundary::periodic;
    o.points = {torus(1e-5, 0.0), torus(0.0, 1e-5), torus(-1e-5, 1e-5)};
    double worst = 0.0;
    for (std::size_t i = 0; i < o.points.size(); ++i) {
        Point2 next = o.points[(i + 1) % o.points.size()];
        worst = std::max(worst, distance(forward(m, o.points[i]), next));
    }
    o.alpha = worst * (1.0 + 1e-9);
    ShadowResult r = shadow(m, o);
    CHECK(r.periodic);
    // the only genuine orbit nearby is the fixed point
    for (const auto& p : r.orbit) CHECK(distance(p, torus(0.0, 0.0)) < 1e-9);
}

TEST_CASE("anosov closing recovers cat map periodic points") {
    SystemModel m = make_cat_map();
    // (1/5, 2/5) has period 2; nudge it and close
    Point2 seed = torus(0.2 + 1e-8, 0.4 - 1e-8);
    CloseResult r = anosov_close(m, seed, 2);
    CHECK(r.period == 2);
    CHECK(distance(r.periodic_point, torus(0.2, 0.4)) < 1e-7);
    CHECK(r.orbit_residual < 1e-10);
    CHECK(distance(iterate(m, r.periodic_point, 2), r.periodic_point) < 1e-9);

    // the fixed point from a nearby seed
    CloseResult f = anosov_close(m, torus(1e-6, -1e-6), 1);
    CHECK(distance(f.periodic_point, torus(0.0, 0.0)) < 1e-9);
}

TEST_CASE("anosov closing rejects a non-returning segment") {
    SystemModel m = make_cat_map();
    CHECK_THROWS_AS(anosov_close(m, torus(0.3, 0.3), 1), error);
    try {
        anosov_close(m, torus(0.3, 0.3), 1);
    } catch (const error& e) {
        CHECK(e.kind() == "not_near_return");
    }
}

TEST_CASE("anosov closing on the horseshoe hits the exact periodic point") {
    SystemModel m = make_horseshoe();
    // word 001 codes (9/13, 1/13)
    Point2 exact = plane(9.0 / 13.0, 1.0 / 13.0);
    CHECK(distance(iterate(m, exact, 3), exact) < 1e-12);
    Point2 seed = plane(9.0 / 13.0 + 1e-8, 1.0 / 13.0 - 1e-8);
    CloseResult r = anosov_close(m, seed, 3);
    CHECK(r.period == 3);
    CHECK(distance(r.periodic_point, exact) < 1e-9);
    CHECK(r.orbit_residual < 1e-10);
}

TEST_CASE("specification on the horseshoe respects the symbol schedule at gap 1") {
    SystemModel m = make_horseshoe();
    // two period segments: around (0,0) (word 0...) and (1,1) (word 1...);
    // a one-step gap cannot damp the coordinate memory of the previous
    // segment, so tracking is reported honestly but only the symbolic
    // schedule is guaranteed
    std::vector<SpecSegment> segs = {{plane(0.0, 0.0), 3}, {plane(1.0, 1.0), 3}};
    SpecificationResult r = specification_orbit(m, segs, 1, 1e-3);
    CHECK(r.period == 3 + 1 + 3 + 1);
    CHECK(r.gap == 1);
    REQUIRE(r.segment_tracking.size() == 2);
    Point2 p = r.point;
    CHECK(distance(iterate(m, p, r.period), p) < 1e-9);
    for (int t = 0; t < 3; ++t) {
        CHECK(iterate(m, p, t).y < 0.5); // segment one hugs (0,0)
    }
    for (int t = 4; t < 7; ++t) {
        CHECK(iterate(m, p, t).y > 0.5); // segment two hugs (1,1)
    }
}

TEST_CASE("specification on the horseshoe tracks within eps for a long gap") {
    SystemModel m = make_horseshoe();
    std::vector<SpecSegment> segs = {{plane(0.0, 0.0), 3}, {plane(1.0, 1.0), 3}};
    SpecificationResult r = specification_orbit(m, segs, 14, 1e-3);
    CHECK(r.period == 3 + 14 + 3 + 14);
    REQUIRE(r.segment_tracking.size() == 2);
    CHECK(r.segment_tracking[0] <= 1e-3);
    CHECK(r.segment_tracking[1] <= 1e-3);
    // iterating a full period multiplies representation error by 3^34, so
    // periodicity is witnessed through the symbol schedule instead: the
    // second segment sits at offset 3 + 14
    for (int t = 0; t < 3; ++t) CHECK(iterate(m, r.point, t).y < 0.5);
    for (int t = 17; t < 20; ++t) CHECK(iterate(m, r.point, t).y > 0.5);
}

TEST_CASE("specification on the cat map tracks both segments") {
    SystemModel m = make_cat_map();
    std::vector<SpecSegment> segs = {{torus(0.0, 0.0), 3}, {torus(0.2, 0.4), 2}};
    SpecificationResult r = specification_orbit(m, segs, 25, 1e-2);
    CHECK(r.period == 3 + 25 + 2 + 25);
    REQUIRE(r.segment_tracking.size() == 2);
    CHECK(r.segment_tracking[0] <= 1e-2);
    CHECK(r.segment_tracking[1] <= 1e-2);
    // a full-period iterate is swamped by lambda_u^55 error growth, so the
    // second segment start is re-derived by direct iteration instead (28
    // steps keep float noise near 5e-5, well inside the eps budget)
    CHECK(distance(iterate(m, r.point, 3 + 25), torus(0.2, 0.4)) <= 1e-2 + 1e-3);
}

TEST_CASE("specification gap too small to switch between distant segments") {
    SystemModel m = make_cat_map();
    std::vector<SpecSegment> segs = {{torus(0.0, 0.0), 2}, {torus(0.2, 0.4), 2}};
    CHECK_THROWS_AS(specification_orbit(m, segs, 2, 1e-6), error);
    try {
        specification_orbit(m, segs, 2, 1e-6);
    } catch (const error& e) {
        CHECK(e.kind() == "gap_too_small");
    }
}
