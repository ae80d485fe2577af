#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyp/partition.hpp"

namespace hyp {

// Symbol window w[i] observed at time offset + i. periodic means the window
// is one period of a cyclic word.
struct SymbolWindow {
    std::vector<int> symbols;
    long long offset = 0;
    bool periodic = false;
    int symbol_at(long long t) const; // periodic wrap or window lookup
};

bool is_admissible(const TransitionMatrix& A, const SymbolWindow& w);

struct SpectralResult {
    double rho = 0.0;
    double entropy = 0.0; // log(rho)
    int iterations = 0;
    double residual = 0.0; // ||A v - rho v||_inf at exit
    bool fallback = false; // power iteration failed; trace-power estimate used
};

// Dominant eigenvalue by power iteration from the all-ones vector
// (Rayleigh tolerance 1e-12, cap 1e5 iterations). Non-convergence falls back
// to max_n tr(A^n)^(1/n), flagged.
SpectralResult spectral_radius(const TransitionMatrix& A, double tol = 1e-12);

struct PeriodicCount {
    long long trace = 0; // tr(A^n), exact integer arithmetic
    std::optional<long long> brute; // cyclic-word enumeration; absent beyond budget
    bool capped = false;
};

PeriodicCount count_periodic(const TransitionMatrix& A, int n,
                             long long brute_budget = 50'000'000);

struct IrreducibilityReport {
    bool irreducible = false;
    bool aperiodic = false;
    long long period = 0; // gcd cycle period when irreducible, else 0
};

IrreducibilityReport check_irreducible_aperiodic(const TransitionMatrix& A);

struct DecodeResult {
    Point2 point;       // center of the coded cell
    double accuracy;    // C lambda^N diam(base) guarantee
    double cell_diameter; // actual diameter of the intersection cell
};

// Point coded by the window: center of K_N = ⋂_{|j|<=N} f^-j(R_{a_j}),
// computed by exact interval pullbacks for horseshoe partitions.
// empty_intersection if the word is not realized.
DecodeResult decode(const SystemModel& m, const Partition& p, const SymbolWindow& w,
                    long long N, double C = 1.5);

struct ItineraryResult {
    SymbolWindow window; // offset -N
    std::vector<long long> boundary_hits; // indices resolved by the tie-break
};

// Observed itinerary of x over [-N, N]. Boundary membership within margin
// takes the lowest rectangle id and records the index; outside_partition
// if some iterate lies in no rectangle.
ItineraryResult itinerary(const SystemModel& m, const Partition& p, const Point2& x,
                          long long N, double margin = 1e-9);

struct ConjugacyReport {
    int samples = 0;
    int passed = 0;
    double worst_defect = 0.0; // max d(f(decode(w)), decode(shift w))
    double tolerance = 0.0;
};

// Semi-conjugacy audit on random admissible windows: decoding the shifted
// window must agree with mapping the decoded point forward, within twice the
// decode accuracy.
ConjugacyReport verify_conjugacy(const SystemModel& m, const Partition& p,
                                 const TransitionMatrix& A, int samples, long long N,
                                 std::uint64_t seed, int jobs = 1);

// Occurrence frequency of each symbol across all admissible cyclic words of
// length n (exact enumeration; cap_exceeded beyond the budget).
std::vector<double> periodic_symbol_frequency(const TransitionMatrix& A, int n,
                                              long long budget = 50'000'000);

} // namespace hyp
