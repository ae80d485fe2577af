#pragma once

#include <cstdint>
#include <vector>

#include "hyp/model.hpp"

namespace hyp {

enum class orbit_boundary : std::uint8_t { finite, periodic };

struct PseudoOrbit {
    std::vector<Point2> points;
    double alpha = 0.0; // claimed jump bound
    orbit_boundary boundary = orbit_boundary::finite;
};

struct OrbitValidation {
    bool valid = false;
    double worst_gap = 0.0;
    long long worst_index = -1; // gap between points i and i+1
};

// Exact audit of every jump d(f(x_i), x_{i+1}) against orbit.alpha
// (including the wrap pair for periodic orbits).
OrbitValidation validate_pseudo_orbit(const SystemModel& m, const PseudoOrbit& orbit);

struct ShadowOptions {
    int M = 0;          // block length; 0 = smallest M with lambda^M < 1/2
    double C = 1.5;     // shadowing constant, ledger input
    bool strict = false; // strict: exceeding the predicted bound is an error
    double sweep_tol = 1e-12; // periodic sweep convergence
    int max_sweeps = 64;
};

struct ShadowResult {
    Point2 start;
    std::vector<Point2> orbit;        // audited shadow orbit, one per pseudo point
    std::vector<double> per_step_errors; // d(orbit[i], x_i)
    double achieved_beta = 0.0;
    double predicted_beta = 0.0; // C alpha / (1 - lambda)
    double orbit_residual = 0.0; // max_i d(f(orbit[i]), orbit[i+1]) (wrap if periodic)
    bool periodic = false;
    bool bound_exceeded = false; // achieved > 1.05 * predicted (strict mode throws)
    int sweeps = 1;
};

// Constructive finite/periodic shadowing: forward bracketing pass along the
// pseudo-orbit at block stride M, then a backward pass that realizes the
// pullback stably. Periodic orbits are swept around the cycle until the
// candidate stops moving.
ShadowResult shadow(const SystemModel& m, const PseudoOrbit& orbit, const ShadowOptions& opt = {});

struct CloseResult {
    Point2 periodic_point;
    long long period = 0;
    double max_orbit_distance = 0.0; // to the near-return orbit of x
    double orbit_residual = 0.0;     // periodic consistency of the output orbit
    std::vector<Point2> orbit;
};

// Anosov closing: a near return d(f^n x, x) < alpha yields a genuine period-n
// point whose orbit tracks the segment. Throws not_near_return if the return
// gap exceeds the admissible alpha for tracking at scale delta0/2.
CloseResult anosov_close(const SystemModel& m, const Point2& x, long long n,
                         const ShadowOptions& opt = {});

struct SpecSegment {
    Point2 start;
    long long length = 1;
};

struct SpecificationResult {
    Point2 point;          // periodic point realizing the schedule
    long long period = 0;
    std::vector<double> segment_tracking; // per segment: worst tracking distance
    double eps = 0.0;
    long long gap = 0;
};

// Specification property: one periodic orbit visits each segment's orbit
// within eps, with N-step transition gaps. Multi-segment construction is
// model-specific (symbolic gluing for the horseshoe, lattice transition
// search for torus automorphisms); gap_too_small when N is below the
// model's mixing horizon for eps.
SpecificationResult specification_orbit(const SystemModel& m,
                                        const std::vector<SpecSegment>& segments,
                                        long long N, double eps);

// Deterministic noisy orbit: x_{i+1} = f(x_i) + uniform noise of max-norm
// amplitude (horseshoe noise is clamped into the branch strips).
PseudoOrbit make_noisy_orbit(const SystemModel& m, const Point2& start, long long length,
                             double amplitude, std::uint64_t seed);

} // namespace hyp
