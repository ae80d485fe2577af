#pragma once

#include <vector>

#include "hyp/chart.hpp"

namespace hyp {

// One backward graph-transform step: phi is a graph over the chart at
// forward(to_chart.base); the result is the pulled-back graph over to_chart.
// Per node the implicit equation u'(u) = phi(s'(u)) is solved by a damped
// Newton iteration (tolerance 1e-13, cap 200); five consecutive
// non-decreasing corrections raise inner_divergence.
GraphFunction backward_graph_step(const SystemModel& m, const GraphFunction& phi,
                                  const Chart& to_chart);
// Fixed-point convenience: chart of phi is reused as the target chart.
GraphFunction backward_graph_step(const SystemModel& m, const GraphFunction& phi);

struct ManifoldOptions {
    double tol = 1e-11;    // sup-norm stop for successive iterates
    int max_outer = 500;
    double lip_bound = 0.5;
    double theta_hint = 0.0; // 0 = no contraction-rate audit
    int splitting_n = 30;    // cocycle depth for estimated frames
    bool use_frame = false;  // take `frame` instead of the model's splitting
    SplittingFrame frame;    // e.g. a deliberately misaligned chart
};

struct ManifoldResult {
    GraphFunction graph;        // over the chart at x
    int iterations = 0;         // outer iterations (fixed point) or sweeps
    int depth = 0;              // orbit depth used (0 for a fixed point)
    long long guaranteed_bound = 0; // ceil(log(tol/delta)/log(theta)), 0 if no hint
    std::vector<double> step_changes; // successive sup-norm changes
    bool orbit_truncated = false;     // forward orbit left the domain early
};

// Local stable manifold of x as a graph over the stable axis. For a fixed
// point the transform is iterated in one chart; otherwise one deep backward
// sweep along the forward orbit (iterative deepening until the root graph
// stops moving). theta_hint > 0 arms the non-contraction audit: three
// consecutive change ratios above theta_hint + 0.05 raise non_contraction.
ManifoldResult local_stable_manifold(const SystemModel& m, const Point2& x,
                                     double delta, const ManifoldOptions& opt = {});
// Same engine on the inverse-time view.
ManifoldResult local_unstable_manifold(const SystemModel& m, const Point2& x,
                                       double delta, const ManifoldOptions& opt = {});

struct BracketResult {
    Point2 point;
    double dist_to_x = 0.0;
    double dist_to_y = 0.0;
    int iterations = 0;
};

// [x,y]: the unique point of W^s_eps(x) ∩ W^u_eps(y). Requires
// d(x,y) < delta0 (too_far) and convergence inside the chart box
// (no_intersection otherwise).
BracketResult bracket(const SystemModel& m, const Point2& x, const Point2& y, double eps);

struct ContractionReport {
    std::vector<double> worst_ratio; // per step k: max over samples of
                                     // d(f^k x, f^k y)/d(x, y)
    int samples = 0;
};

// Samples points y on the graph and audits d(f^k x, f^k y)/d(x,y) for
// k = 1..n. x is the graph's base point.
ContractionReport contraction_report(const SystemModel& m, const GraphFunction& graph, int n);

} // namespace hyp
