#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hyp/model.hpp"
#include "hyp/partition.hpp"
#include "hyp/symbolic.hpp"

using namespace hyp;

namespace {

TransitionMatrix matrix_of(std::vector<std::vector<int>> rows) {
    TransitionMatrix A;
    A.m = static_cast<int>(rows.size());
    A.a.assign(static_cast<std::size_t>(A.m) * static_cast<std::size_t>(A.m), 0);
    for (int i = 0; i < A.m; ++i)
        for (int j = 0; j < A.m; ++j)
            A.set(i, j, static_cast<std::uint8_t>(rows[static_cast<std::size_t>(i)]
                                                      [static_cast<std::size_t>(j)]));
    return A;
}

TransitionMatrix full2() { return matrix_of({{1, 1}, {1, 1}}); }

// digit closed form for a periodic horseshoe itinerary: the point at time 0,
// where digit(t) is the strip index visited at time t
Point2 point_from_digits(const std::vector<int>& word, long long phase) {
    const long long P = static_cast<long long>(word.size());
    auto digit = [&](long long t) {
        long long i = ((phase + t) % P + P) % P;
        return word[static_cast<std::size_t>(i)];
    };
    double y = 0.0, x = 0.0;
    for (long long k = 120; k >= 0; --k) y = (y + 2.0 * digit(k)) / 3.0;
    for (long long k = 120; k >= 1; --k) x = x / 3.0 + 2.0 * digit(-k) / 3.0;
    return Point2{x, y, space_kind::plane};
}

std::vector<int> random_word(std::mt19937& eng, std::size_t len, int alphabet = 2) {
    std::vector<int> w(len);
    for (auto& s : w) s = static_cast<int>(eng() % static_cast<unsigned>(alphabet));
    return w;
}

} // namespace

// The closed form above is the reference for every decoding test below, so it
// is checked first against the map itself: orbit consistency plus membership
// in the nested preimage intervals built from forward/inverse evaluations.
TEST_CASE("digit closed form survives the nested-interval cross-check") {
    SystemModel m = make_horseshoe();
    std::mt19937 eng(2026);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> word = random_word(eng, 21);
        const long long phase = 10;
        auto digit = [&](long long t) {
            long long i = ((phase + t) % 21 + 21) % 21;
            return word[static_cast<std::size_t>(i)];
        };

        // one forward step of the closed form matches the map to float error
        Point2 prev = point_from_digits(word, phase - 10);
        for (long long t = -9; t <= 10; ++t) {
            Point2 here = point_from_digits(word, phase + t);
            Point2 mapped = forward(m, prev);
            CHECK(distance(mapped, here) <= 1e-12);
            prev = here;
        }

        // y lies in the nested future-digit interval, computed by pulling
        // [0,1] back through the model's inverse along the digit word
        Point2 p = point_from_digits(word, phase);
        double ylo = 0.0, yhi = 1.0;
        for (long long k = 10; k >= 0; --k) {
            double xb = digit(k) == 0 ? 0.0 : 1.0;
            ylo = inverse(m, Point2{xb, ylo, space_kind::plane}).y;
            yhi = inverse(m, Point2{xb, yhi, space_kind::plane}).y;
        }
        CHECK(p.y >= ylo - 1e-15);
        CHECK(p.y <= yhi + 1e-15);
        // endpoint arithmetic carries a few ulps of absolute error, so the
        // interval width is graded on an absolute scale
        CHECK(std::abs((yhi - ylo) - std::pow(3.0, -11)) <= 1e-15);

        // x lies in the forward image interval of the past digits
        double xlo = 0.0, xhi = 1.0;
        for (long long k = 10; k >= 1; --k) {
            double yb = digit(-k) == 0 ? 0.0 : 1.0;
            xlo = forward(m, Point2{xlo, yb, space_kind::plane}).x;
            xhi = forward(m, Point2{xhi, yb, space_kind::plane}).x;
        }
        CHECK(p.x >= xlo - 1e-15);
        CHECK(p.x <= xhi + 1e-15);
        CHECK(std::abs((xhi - xlo) - std::pow(3.0, -10)) <= 1e-15);
    }
}

TEST_CASE("decode centers the coded cell around the true periodic point") {
    SystemModel m = make_horseshoe();
    Partition base = base_partition(m);
    std::mt19937 eng(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> word = random_word(eng, 21);
        SymbolWindow w{word, -10, true};
        DecodeResult d = decode(m, base, w, 10);
        Point2 truth = point_from_digits(word, 10);
        CHECK(distance(d.point, truth) <= 0.5 * std::pow(3.0, -10) + 1e-15);
        CHECK(d.cell_diameter <= d.accuracy);
        CHECK(d.accuracy == doctest::Approx(1.5 * std::pow(3.0, -10)).epsilon(1e-12));
    }
}

TEST_CASE("decoded cell diameter decays like lambda to the N") {
    SystemModel m = make_horseshoe();
    Partition base = base_partition(m);
    std::mt19937 eng(17);
    for (long long N : {5LL, 10LL, 15LL}) {
        double expect = std::pow(3.0, static_cast<double>(-N));
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<int> word = random_word(eng, static_cast<std::size_t>(2 * N + 1));
            DecodeResult d = decode(m, base, SymbolWindow{word, -N, false}, N);
            CHECK(d.cell_diameter <= 1.5 * expect * base.diameter() + 1e-15);
            CHECK(d.cell_diameter == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("decode throws when the word is not realized") {
    SystemModel m = make_horseshoe();
    Partition p = refine_words(m, base_partition(m), 2);
    // future words 00 and 11 cannot be consecutive
    SymbolWindow w{{0, 0, 3}, -1, false};
    CHECK_THROWS_AS(decode(m, p, w, 1), error);
    try {
        decode(m, p, w, 1);
    } catch (const error& e) {
        CHECK(e.kind() == "empty_intersection");
    }
}

TEST_CASE("decode rejects models without interval structure") {
    SystemModel cat = make_cat_map();
    Partition base = base_partition(make_horseshoe());
    CHECK_THROWS_AS(decode(cat, base, SymbolWindow{{0, 1, 0}, -1, false}, 1), error);
}

TEST_CASE("itinerary inverts decode away from boundaries") {
    SystemModel m = make_horseshoe();
    Partition base = base_partition(m);
    std::mt19937 eng(23);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<int> word = random_word(eng, 11);
        SymbolWindow w{word, -5, false};
        DecodeResult d = decode(m, base, w, 5);
        ItineraryResult it = itinerary(m, base, d.point, 5);
        REQUIRE(it.window.symbols.size() == 11);
        CHECK(it.boundary_hits.empty());
        for (long long t = -5; t <= 5; ++t) CHECK(it.window.symbol_at(t) == w.symbol_at(t));
    }
}

TEST_CASE("itinerary flags boundary hits and resolves them to the lowest id") {
    SystemModel m = make_horseshoe();
    Partition base = base_partition(m);
    // y = 1/3 sits on the top edge of strip 0; its forward orbit rides y = 1
    ItineraryResult it = itinerary(m, base, Point2{0.25, 1.0 / 3.0, space_kind::plane}, 2);
    REQUIRE(it.window.symbols.size() == 5);
    CHECK(it.window.symbol_at(-2) == 1);
    CHECK(it.window.symbol_at(-1) == 0);
    CHECK(it.window.symbol_at(0) == 0); // tie-break at the shared edge
    CHECK(it.window.symbol_at(1) == 1);
    CHECK(it.window.symbol_at(2) == 1);
    std::vector<long long> expect{0, 1, 2};
    CHECK(it.boundary_hits == expect);
}

TEST_CASE("admissibility respects the matrix and the cyclic wrap") {
    TransitionMatrix golden = matrix_of({{1, 1}, {1, 0}});
    CHECK(is_admissible(golden, SymbolWindow{{0, 1, 0}, 0, false}));
    CHECK_FALSE(is_admissible(golden, SymbolWindow{{1, 1}, 0, false}));
    // linear word fine, wrap broken
    TransitionMatrix upper = matrix_of({{1, 1}, {0, 1}});
    CHECK(is_admissible(upper, SymbolWindow{{0, 1}, 0, false}));
    CHECK_FALSE(is_admissible(upper, SymbolWindow{{0, 1}, 0, true}));
    CHECK_FALSE(is_admissible(upper, SymbolWindow{{1, 0}, 0, false}));
    CHECK_THROWS_AS(is_admissible(golden, SymbolWindow{{0, 2}, 0, false}), error);
}

TEST_CASE("spectral radius fixtures") {
    SpectralResult full = spectral_radius(full2());
    CHECK(std::abs(full.rho - 2.0) <= 1e-12);
    CHECK(std::abs(full.entropy - std::log(2.0)) <= 1e-12);
    CHECK_FALSE(full.fallback);
    CHECK(full.residual <= 1e-10);

    SpectralResult fib = spectral_radius(matrix_of({{2, 1}, {1, 1}}));
    CHECK(fib.rho == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-10));

    SpectralResult one = spectral_radius(matrix_of({{1}}));
    CHECK(one.rho == doctest::Approx(1.0));
    CHECK(one.entropy == doctest::Approx(0.0));

    SpectralResult flip = spectral_radius(matrix_of({{0, 1}, {1, 0}}));
    CHECK(flip.rho == doctest::Approx(1.0));
    CHECK_FALSE(flip.fallback);

    SpectralResult nil = spectral_radius(matrix_of({{0, 1}, {0, 0}}));
    CHECK(nil.rho == doctest::Approx(0.0));
}

TEST_CASE("periodic point counts match brute enumeration") {
    TransitionMatrix A = full2();
    for (int n = 1; n <= 10; ++n) {
        PeriodicCount pc = count_periodic(A, n);
        REQUIRE(pc.brute.has_value());
        CHECK(pc.trace == *pc.brute);
        CHECK(pc.trace == (1LL << n));
    }

    TransitionMatrix golden = matrix_of({{1, 1}, {1, 0}});
    std::vector<long long> lucas{1, 3, 4, 7, 11, 18, 29, 47, 76, 123};
    for (int n = 1; n <= 10; ++n) {
        PeriodicCount pc = count_periodic(golden, n);
        REQUIRE(pc.brute.has_value());
        CHECK(pc.trace == *pc.brute);
        CHECK(pc.trace == lucas[static_cast<std::size_t>(n - 1)]);
    }

    TransitionMatrix flip = matrix_of({{0, 1}, {1, 0}});
    for (int n = 1; n <= 8; ++n) {
        PeriodicCount pc = count_periodic(flip, n);
        CHECK(pc.trace == (n % 2 == 0 ? 2 : 0));
        CHECK(pc.trace == *pc.brute);
    }
}

TEST_CASE("random irreducible matrices keep trace equal to enumeration") {
    std::mt19937 eng(11);
    for (int rep = 0; rep < 3; ++rep) {
        TransitionMatrix A = matrix_of({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (!A.at(i, j) && eng() % 2) A.set(i, j, 1);
        REQUIRE(check_irreducible_aperiodic(A).irreducible);
        for (int n = 1; n <= 10; ++n) {
            PeriodicCount pc = count_periodic(A, n);
            REQUIRE(pc.brute.has_value());
            CHECK(pc.trace == *pc.brute);
        }
    }
}

TEST_CASE("a tiny budget caps the brute count but never the trace") {
    PeriodicCount pc = count_periodic(full2(), 12, 10);
    CHECK(pc.capped);
    CHECK_FALSE(pc.brute.has_value());
    CHECK(pc.trace == 4096);
}

TEST_CASE("trace growth rate approaches the entropy monotonically") {
    TransitionMatrix golden = matrix_of({{1, 1}, {1, 0}});
    double h = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    double prev_dev = 1e9;
    for (int n = 2; n <= 20; ++n) {
        PeriodicCount pc = count_periodic(golden, n);
        double rate = std::log(static_cast<double>(pc.trace)) / n;
        double dev = std::abs(rate - h);
        CHECK(dev <= prev_dev + 1e-12);
        prev_dev = dev;
    }
    CHECK(prev_dev <= 1e-3);
}

TEST_CASE("irreducibility and aperiodicity classification") {
    IrreducibilityReport full = check_irreducible_aperiodic(full2());
    CHECK(full.irreducible);
    CHECK(full.aperiodic);
    CHECK(full.period == 1);

    IrreducibilityReport flip = check_irreducible_aperiodic(matrix_of({{0, 1}, {1, 0}}));
    CHECK(flip.irreducible);
    CHECK_FALSE(flip.aperiodic);
    CHECK(flip.period == 2);

    IrreducibilityReport upper = check_irreducible_aperiodic(matrix_of({{1, 1}, {0, 1}}));
    CHECK_FALSE(upper.irreducible);
}

TEST_CASE("conjugacy audit passes and ignores the thread count") {
    SystemModel m = make_horseshoe();
    Partition base = base_partition(m);
    TransitionMatrix A = full2();
    ConjugacyReport r1 = verify_conjugacy(m, base, A, 100, 8, 7, 1);
    CHECK(r1.samples == 100);
    CHECK(r1.passed == 100);
    CHECK(r1.tolerance == doctest::Approx(2.0 * 1.5 * std::pow(3.0, -8)).epsilon(1e-12));
    CHECK(r1.worst_defect <= r1.tolerance);
    ConjugacyReport r4 = verify_conjugacy(m, base, A, 100, 8, 7, 4);
    CHECK(r4.worst_defect == r1.worst_defect);
    CHECK(r4.passed == r1.passed);
}

TEST_CASE("symbols are equidistributed over period-12 points of the full shift") {
    std::vector<double> freq = periodic_symbol_frequency(full2(), 12);
    REQUIRE(freq.size() == 2);
    CHECK(std::abs(freq[0] - 0.5) <= 1e-9);
    CHECK(std::abs(freq[1] - 0.5) <= 1e-9);

    // golden mean shift prefers symbol 0
    std::vector<double> gm = periodic_symbol_frequency(matrix_of({{1, 1}, {1, 0}}), 12);
    CHECK(gm[0] + gm[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gm[0] > gm[1]);

    CHECK_THROWS_AS(periodic_symbol_frequency(full2(), 20, 100), error);
}
