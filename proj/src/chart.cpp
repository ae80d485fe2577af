#include "hyp/chart.hpp"

#include <cmath>

namespace hyp {

Chart make_chart(const SystemModel& m, const Point2& base, double delta) {
    if (delta <= 0.0) throw error("domain_error", "chart size must be positive");
    return {base, frame_at(m, base), delta};
}

vec2 chart_coords(const Chart& c, const Point2& p) {
    vec2 d = point_diff(p, c.base);
    mat2 F{c.frame.e_s.x, c.frame.e_u.x, c.frame.e_s.y, c.frame.e_u.y};
    return inverse(F) * d;
}

Point2 chart_point(const Chart& c, double s, double u) {
    return translate(c.base, s * c.frame.e_s + u * c.frame.e_u);
}

GraphFunction zero_graph(const Chart& chart, double lip_bound) {
    GraphFunction g;
    g.chart = chart;
    g.values.assign(GRAPH_NODES, 0.0);
    g.lip_bound = lip_bound;
    return g;
}

double graph_node_s(const Chart& chart, int i) {
    return -chart.delta + 2.0 * chart.delta * i / (GRAPH_NODES - 1);
}

double graph_eval_const(const GraphFunction& g, double s) {
    const double delta = g.chart.delta;
    const double h = 2.0 * delta / (GRAPH_NODES - 1);
    double t = (s + delta) / h;
    // boundary-segment slope continues outside [-delta, delta]
    int i = static_cast<int>(std::floor(t));
    i = std::max(0, std::min(i, GRAPH_NODES - 2));
    double frac = t - i;
    return g.values[i] + frac * (g.values[i + 1] - g.values[i]);
}

double graph_eval(GraphFunction& g, double s) {
    if (s < -g.chart.delta - 1e-15 || s > g.chart.delta + 1e-15) g.clamped_eval = true;
    return graph_eval_const(g, s);
}

double empirical_lipschitz(const GraphFunction& g) {
    const double h = 2.0 * g.chart.delta / (GRAPH_NODES - 1);
    double worst = 0.0;
    for (int i = 0; i + 1 < GRAPH_NODES; ++i)
        worst = std::max(worst, std::abs(g.values[i + 1] - g.values[i]) / h);
    return worst;
}

double graph_sup_diff(const GraphFunction& a, const GraphFunction& b) {
    double worst = 0.0;
    for (int i = 0; i < GRAPH_NODES; ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

} // namespace hyp
