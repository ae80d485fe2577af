#pragma once

#include <vector>

#include "hyp/splitting.hpp"

namespace hyp {

// Chart at a base point: coordinates (s,u) along the splitting frame,
// valid on the box [-delta, delta]^2.
struct Chart {
    Point2 base;
    SplittingFrame frame;
    double delta = 0.1;
};

Chart make_chart(const SystemModel& m, const Point2& base, double delta);

// (s,u) components of p relative to the chart base (torus differences are
// wrapped to the nearest image first).
vec2 chart_coords(const Chart& c, const Point2& p);
Point2 chart_point(const Chart& c, double s, double u);

inline constexpr int GRAPH_NODES = 257;

// Graph u = g(s) over the chart's stable axis, sampled on GRAPH_NODES
// equispaced nodes in [-delta, delta] and evaluated by linear interpolation.
// Invariants: |values| <= max(1, lip_bound) * delta and the empirical
// Lipschitz constant stays <= lip_bound (lip_bound > 1 marks a deliberately
// misaligned chart; aligned charts keep lip_bound <= K_lip < 1).
struct GraphFunction {
    Chart chart;
    std::vector<double> values; // size GRAPH_NODES
    double lip_bound = 0.5;
    bool clamped_eval = false; // some evaluation left [-delta, delta]
};

GraphFunction zero_graph(const Chart& chart, double lip_bound = 0.5);
double graph_node_s(const Chart& chart, int i);
// Inside [-delta, delta]: linear interpolation. Outside: linear
// extrapolation with the boundary segment's slope; sets clamped_eval.
double graph_eval(GraphFunction& g, double s);
double graph_eval_const(const GraphFunction& g, double s); // no flag update
double empirical_lipschitz(const GraphFunction& g);
double graph_sup_diff(const GraphFunction& a, const GraphFunction& b);

} // namespace hyp
