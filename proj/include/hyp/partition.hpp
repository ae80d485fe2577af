#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyp/model.hpp"

namespace hyp {

struct interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double v, double margin = 0.0) const {
        return v >= lo - margin && v <= hi + margin;
    }
};

inline bool overlap_interior(const interval& a, const interval& b, double margin) {
    return std::min(a.hi, b.hi) - std::max(a.lo, b.lo) > margin;
}

// Product rectangle in (stable, unstable) coordinates. For the affine
// horseshoe these are literal x/y intervals. word records the symbolic
// history as "past|future" digits. samples is the payload for covers
// built from shadowing (empty for exact interval rectangles).
struct Rectangle {
    int id = 0;
    interval s_iv;
    interval u_iv;
    std::string word;
    std::vector<Point2> samples;
};

enum class partition_flavor : std::uint8_t { base, words, bidirectional, cover };

struct Partition {
    std::vector<Rectangle> rects;
    partition_flavor flavor = partition_flavor::base;
    int past_len = 0;   // refined past-word length
    int future_len = 1; // refined future-word length
    // Honest max-metric diameter: max over rectangles of max extent.
    double diameter() const;
    // Extent in the refined (unstable) direction only.
    double refined_extent() const;
};

// The two branch strips of the horseshoe, R_i = Lambda ∩ H_i.
// unsupported_model for anything else.
Partition base_partition(const SystemModel& m);

// Future-word refinement: join with pullbacks until every rectangle carries
// a future word of length k. 2^k rectangles; refined extent exactly 3^-k;
// stable extent stays 1. Genuinely Markov.
Partition refine_words(const SystemModel& m, const Partition& p, int k);

// Bidirectional refinement: each round joins with one forward and one
// backward pullback of the base partition, so after r rounds extents are
// (3^-r, 3^-(r+1)) and the true diameter is exactly 3^-r. Rectangle count
// 2^(2r+1); budget_exceeded beyond max_rects.
Partition refine_to_diameter(const SystemModel& m, const Partition& p, double eps,
                             std::size_t max_rects = 1000000);

// Overlap refinement of a cover: atoms of the interval algebra generated by
// the rectangles' s/u products, grouped by connected overlap (disjoint
// rectangles pass through unchanged). degenerate_overlap when two distinct
// endpoints collide at the margin.
Partition refine_intersections(const SystemModel& m, const Partition& cover,
                               double margin = 1e-9);

struct MarkovViolation {
    int from = -1;
    int to = -1;
    double margin = 0.0; // most negative slice margin
    std::string which;   // "u-onto" or "s-into"
};

struct MarkovReport {
    bool pass = false;
    double worst_margin = 0.0;
    MarkovViolation worst;
    int pairs_checked = 0;
};

// Markov property audit: for every pair with interior overlap of f(R_i) and
// R_j, the image's unstable slices must cover R_j's unstable extent and the
// image's stable slices must land inside R_j's stable extent. Exact interval
// arithmetic for affine rectangles, sampled hulls for covers.
MarkovReport verify_markov(const SystemModel& m, const Partition& p,
                           int samples_per_rect = 9, double margin = 1e-9);

struct TransitionMatrix {
    int m = 0;
    std::vector<std::uint8_t> a; // row-major 0/1
    std::uint8_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }
    void set(int i, int j, std::uint8_t v) { a[static_cast<std::size_t>(i) * m + j] = v; }
};

// A_ij = 1 iff f(int R_i) ∩ int R_j is nonempty.
TransitionMatrix transition_matrix(const SystemModel& m, const Partition& p,
                                   double margin = 1e-9);

struct CoverOptions {
    double alpha_factor = 2.5;  // transition threshold alpha = factor * gamma
    int walks_per_point = 40;   // sampled admissible windows per net point
    std::uint64_t seed = 2026;
    std::size_t max_rects = 4096;
};

// Markov cover machinery from the shadowing theorem: gamma-dense net,
// alpha-transition digraph, sampled two-sided windows shadowed into
// rectangle point sets of diameter <= 2 beta.
Partition build_cover_via_shadowing(const SystemModel& m, double gamma, double beta,
                                    const CoverOptions& opt = {});

} // namespace hyp
