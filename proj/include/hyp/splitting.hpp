#pragma once

#include <vector>

#include "hyp/model.hpp"

namespace hyp {

struct SplittingFrame {
    vec2 e_s{1.0, 0.0}; // unit stable direction
    vec2 e_u{0.0, 1.0}; // unit unstable direction
    double angle = 0.0; // angle between them, radians
};

// Exact eigen-directions for the built-in models (affine branches resp.
// integer torus matrix). Throws unsupported_model for grid models.
SplittingFrame eigen_frame(const SystemModel& m);

// Cocycle estimate: e_u is the normalized n-step forward image of a generic
// vector transported from f^{-n}(p); e_s the backward analogue from f^{n}(p).
// Throws degenerate_error if the directions collapse (angle < 1e-9).
SplittingFrame estimate_splitting(const SystemModel& m, const Point2& p, int n = 30);

// Frame at p: exact for built-ins, estimated otherwise.
SplittingFrame frame_at(const SystemModel& m, const Point2& p, int n = 30);

struct ConeCheckResult {
    bool pass = false;
    double worst_margin = 0.0; // min over samples/checks; negative = violation
    int worst_sample = -1;
    int worst_check = 0; // 1 = unstable invariance, 2 = stable invariance,
                         // 3 = unstable expansion, 4 = stable (backward) expansion
};

// Cone-field criterion with half-width a (in splitting-frame components,
// max norm) and expansion threshold 1/lambda. Strict inclusion is graded by
// the worst boundary-ray margin; pass means worst_margin >= -1e-12 so an
// exactly-boundary configuration passes and is visible as margin 0.
ConeCheckResult verify_cone_criterion(const SystemModel& m,
                                      const std::vector<Point2>& samples,
                                      double a, double lambda);

} // namespace hyp
