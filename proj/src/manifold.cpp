#include "hyp/manifold.hpp"

#include <cmath>
#include <limits>

namespace hyp {

namespace {

mat2 frame_matrix(const SplittingFrame& f) {
    return {f.e_s.x, f.e_u.x, f.e_s.y, f.e_u.y};
}

double eval_tracking_clamp(const GraphFunction& g, double s, bool* clamped) {
    if (s < -g.chart.delta - 1e-15 || s > g.chart.delta + 1e-15) *clamped = true;
    return graph_eval_const(g, s);
}

} // namespace

GraphFunction backward_graph_step(const SystemModel& m, const GraphFunction& phi,
                                  const Chart& to_chart) {
    if (distance(phi.chart.base, forward_nbhd(m, to_chart.base)) > 1e-6)
        throw error("domain_error", "input graph is not anchored at the image point");

    // frame-transformed Jacobian at the base point: (s,u) here -> (s,u) there
    mat2 M = inverse(frame_matrix(phi.chart.frame)) * jacobian_nbhd(m, to_chart.base) *
             frame_matrix(to_chart.frame);
    if (std::abs(M.a11) < 1e-12)
        throw error("degenerate_error", "unstable block vanishes at the base point");

    // local slope of phi, for the solve divisor (exact where phi is linear)
    const double h = 2.0 * phi.chart.delta / (GRAPH_NODES - 1);
    auto phi_slope = [&](double s) {
        return (graph_eval_const(phi, s + h) - graph_eval_const(phi, s - h)) / (2.0 * h);
    };

    GraphFunction out = zero_graph(to_chart, phi.lip_bound);
    bool clamped = phi.clamped_eval;
    double warm = 0.0;
    for (int i = 0; i < GRAPH_NODES; ++i) {
        double s = graph_node_s(to_chart, i);
        double u = warm;
        double prev_step = std::numeric_limits<double>::infinity();
        int stall = 0;
        for (int it = 0; it < 200; ++it) {
            Point2 p = chart_point(to_chart, s, u);
            vec2 img = chart_coords(phi.chart, forward_nbhd(m, p));
            double g = img.y - eval_tracking_clamp(phi, img.x, &clamped);
            // d/du of [u'(u) - phi(s'(u))]; reduces to the unstable block M.a11
            // in an aligned chart (M.a01 = 0)
            double B = M.a11 - phi_slope(img.x) * M.a01;
            if (std::abs(B) < 1e-9) B = M.a11;
            double step = g / B;
            u -= step;
            double mag = std::abs(step);
            if (mag <= 1e-13) break;
            if (mag >= prev_step) {
                if (++stall >= 5)
                    throw error("inner_divergence",
                                "graph-transform node iteration is not contracting");
            } else {
                stall = 0;
            }
            prev_step = mag;
        }
        out.values[i] = u;
        warm = u;
    }
    out.clamped_eval = clamped;

    double cap = std::max(1.0, out.lip_bound) * to_chart.delta;
    for (double v : out.values)
        if (std::abs(v) > cap * (1.0 + 1e-9))
            throw error("out_of_chart", "pulled-back graph leaves the chart box");
    return out;
}

GraphFunction backward_graph_step(const SystemModel& m, const GraphFunction& phi) {
    if (distance(forward(m, phi.chart.base), phi.chart.base) > 1e-6)
        throw error("domain_error",
                    "single-chart transform needs a fixed base point");
    return backward_graph_step(m, phi, phi.chart);
}

namespace {

ManifoldResult stable_manifold_impl(const SystemModel& m, const Point2& x, double delta,
                                    const ManifoldOptions& opt) {
    if (delta <= 0.0) throw error("domain_error", "manifold scale must be positive");
    auto pick_frame = [&](const Point2& p) {
        return opt.use_frame ? opt.frame : frame_at(m, p, opt.splitting_n);
    };
    Chart chart0{x, pick_frame(x), delta};

    ManifoldResult res;
    if (opt.theta_hint > 0.0 && opt.theta_hint < 1.0)
        res.guaranteed_bound = static_cast<long long>(
            std::ceil(std::log(opt.tol / delta) / std::log(opt.theta_hint)));

    auto audit_contraction = [&](const std::vector<double>& ch) {
        if (opt.theta_hint <= 0.0 || ch.size() < 4) return;
        int bad = 0;
        for (std::size_t i = ch.size() - 3; i < ch.size(); ++i) {
            if (ch[i - 1] <= 100.0 * opt.tol) return;
            if (ch[i] / ch[i - 1] > opt.theta_hint + 0.05) ++bad;
        }
        if (bad == 3)
            throw error("non_contraction",
                        "graph-transform changes decay slower than the promised rate");
    };

    bool fixed = distance(forward(m, x), x) <= 1e-9;
    if (fixed) {
        GraphFunction g = zero_graph(chart0, opt.lip_bound);
        for (int it = 1; it <= opt.max_outer; ++it) {
            GraphFunction next = backward_graph_step(m, g, chart0);
            double change = graph_sup_diff(g, next);
            res.step_changes.push_back(change);
            g = next;
            res.iterations = it;
            if (change <= opt.tol) break;
            audit_contraction(res.step_changes);
        }
        res.graph = g;
        return res;
    }

    // Non-fixed base: pull a zero graph back along the forward orbit, doubling
    // the depth until the root graph stops moving.
    std::vector<Chart> charts{chart0};
    auto extend_charts = [&](int depth) {
        while (static_cast<int>(charts.size()) <= depth) {
            try {
                Point2 next = forward(m, charts.back().base);
                charts.push_back(Chart{next, pick_frame(next), delta});
            } catch (const error&) {
                res.orbit_truncated = true;
                break;
            }
        }
        return static_cast<int>(charts.size()) - 1;
    };

    GraphFunction root = zero_graph(chart0, opt.lip_bound);
    int depth = 2;
    for (int pass = 1; pass <= opt.max_outer; ++pass) {
        int avail = extend_charts(depth);
        GraphFunction g = zero_graph(charts[avail], opt.lip_bound);
        for (int k = avail - 1; k >= 0; --k) g = backward_graph_step(m, g, charts[k]);
        double change = graph_sup_diff(root, g);
        res.step_changes.push_back(change);
        root = g;
        res.iterations = pass;
        res.depth = avail;
        if (change <= opt.tol || avail < depth) break;
        audit_contraction(res.step_changes);
        if (depth > opt.max_outer) break;
        depth *= 2;
    }
    res.graph = root;
    return res;
}

} // namespace

ManifoldResult local_stable_manifold(const SystemModel& m, const Point2& x, double delta,
                                     const ManifoldOptions& opt) {
    return stable_manifold_impl(m, x, delta, opt);
}

ManifoldResult local_unstable_manifold(const SystemModel& m, const Point2& x, double delta,
                                       const ManifoldOptions& opt) {
    return stable_manifold_impl(inverse_view(m), x, delta, opt);
}

BracketResult bracket(const SystemModel& m, const Point2& x, const Point2& y, double eps) {
    if (eps <= 0.0) throw error("domain_error", "bracket scale must be positive");
    double delta_b = std::min(eps, m.data.delta0);
    double C1 = 1.0 / (1.0 - std::min(m.data.K_lip, 0.99));
    if (distance(x, y) > delta_b / C1)
        throw error("too_far", "points are not within the local product scale");

    GraphFunction gs = local_stable_manifold(m, x, delta_b).graph;
    GraphFunction gu = local_unstable_manifold(m, y, delta_b).graph;
    // gu lives over the inverse view's stable axis, i.e. the unstable axis here.

    BracketResult r;
    Point2 p = y;
    for (int it = 1; it <= 200; ++it) {
        vec2 cx = chart_coords(gs.chart, p);
        Point2 on_ws = chart_point(gs.chart, cx.x, graph_eval_const(gs, cx.x));
        vec2 cy = chart_coords(gu.chart, on_ws);
        Point2 next = chart_point(gu.chart, cy.x, graph_eval_const(gu, cy.x));
        double moved = distance(next, p);
        p = next;
        r.iterations = it;
        if (moved <= 1e-13) {
            vec2 fin = chart_coords(gs.chart, p);
            if (std::abs(fin.x) > delta_b * (1.0 + 1e-9) ||
                std::abs(fin.y) > delta_b * (1.0 + 1e-9))
                throw error("no_intersection", "intersection left the chart box");
            r.point = p;
            r.dist_to_x = distance(p, x);
            r.dist_to_y = distance(p, y);
            return r;
        }
    }
    throw error("no_intersection", "bracket iteration did not converge");
}

ContractionReport contraction_report(const SystemModel& m, const GraphFunction& graph, int n) {
    if (n < 1) throw error("domain_error", "need at least one step");
    const double fractions[] = {1.0, 0.5, 0.25, 0.125, -0.25, -0.5, -1.0};
    ContractionReport rep;
    rep.worst_ratio.assign(static_cast<std::size_t>(n), 0.0);
    Point2 x = graph.chart.base;
    for (double f : fractions) {
        double s = f * graph.chart.delta;
        Point2 y = chart_point(graph.chart, s, graph_eval_const(graph, s));
        double d0 = distance(x, y);
        if (d0 == 0.0) continue;
        try {
            Point2 px = x, py = y;
            std::vector<double> ratios;
            ratios.reserve(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                px = forward(m, px);
                py = forward(m, py);
                ratios.push_back(distance(px, py) / d0);
            }
            for (int k = 0; k < n; ++k)
                rep.worst_ratio[static_cast<std::size_t>(k)] =
                    std::max(rep.worst_ratio[static_cast<std::size_t>(k)], ratios[static_cast<std::size_t>(k)]);
            ++rep.samples;
        } catch (const error&) {
            // sample orbit left the domain; skip it
        }
    }
    if (rep.samples == 0)
        throw error("domain_error", "no graph sample admits an n-step orbit");
    return rep;
}

} // namespace hyp
