#include "hyp/constants.hpp"

#include <cmath>

namespace hyp {

namespace {

constexpr double CEIL_SLACK = 1e-12;

long long guarded_ceil(double v) {
    return static_cast<long long>(std::ceil(v - CEIL_SLACK));
}

} // namespace

double adapted_metric_constant(double c, double lambda, double mu) {
    if (c < 1.0) throw error("domain_error", "adapted-metric seed must be >= 1");
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "contraction rate must lie in (0,1)");
    if (mu <= lambda || mu > 1.0)
        throw error("domain_error", "adapted-metric target must lie in (lambda, 1]");
    // c * mu / (mu - lambda), written so the correction term is added to c in
    // one rounding step; the naive quotient form loses an ulp when lambda/mu
    // is inexact (e.g. lambda = 1/3, mu = 1).
    return c + c * lambda / (mu - lambda);
}

double angle_lower_bound(double K) {
    if (K < 1.0) throw error("domain_error", "adapted-metric constant must be >= 1");
    return std::asin(1.0 / K);
}

namespace {

double holder_exponent(double beta, double lambda, double L) {
    if (beta <= 0.0 || beta > 1.0) throw error("domain_error", "Hoelder exponent outside (0,1]");
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "contraction rate must lie in (0,1)");
    if (L < 1.0) throw error("domain_error", "Lipschitz constant must be >= 1");
    double num = beta * std::log(1.0 / lambda);
    return num / (std::log(L) + num);
}

} // namespace

double holder_exponent_stable(double beta, double lambda, double L) {
    return holder_exponent(beta, lambda, L);
}

double holder_exponent_unstable(double beta, double lambda, double L_inv) {
    return holder_exponent(beta, lambda, L_inv);
}

double manifold_size(double lambda, double C0) {
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "contraction rate must lie in (0,1)");
    if (C0 < 0.0) throw error("domain_error", "second-derivative bound must be >= 0");
    double c0 = std::max(C0, C0_CLAMP_FLOOR);
    return (1.0 - lambda) * (1.0 - lambda) / (4.0 * c0);
}

double graph_contraction_rate(double lambda, double C1, double delta, double K) {
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "contraction rate must lie in (0,1)");
    if (C1 < 0.0 || delta <= 0.0 || K < 1.0)
        throw error("domain_error", "need C1 >= 0, delta > 0, K >= 1");
    double s = lambda * C1 * delta * (K + 1.0);
    if (s >= 1.0 - lambda)
        throw error("smallness_violation",
                    "lambda C1 delta (K+1) must stay below 1 - lambda");
    return lambda / (1.0 - s);
}

double shadowing_tolerance(double C, double lambda, double beta) {
    if (C < 1.0) throw error("domain_error", "shadowing constant must be >= 1");
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "contraction rate must lie in (0,1)");
    if (beta <= 0.0) throw error("domain_error", "tracking radius must be positive");
    // (1 - lambda) * beta / C with the subtraction performed last; rounding
    // (1 - lambda) up front contaminates every later product (visible for
    // lambda = 1/3), while t - lambda*t keeps the cancellation at the end.
    double t = beta / C;
    return t - lambda * t;
}

long long expansiveness_horizon(double eps, double delta, double lambda, double C) {
    if (eps <= 0.0 || delta <= 0.0 || delta > eps)
        throw error("domain_error", "need 0 < delta <= eps");
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "contraction rate must lie in (0,1)");
    if (C < 0.0) throw error("domain_error", "horizon offset must be >= 0");
    double v = std::log(eps / delta) / std::log(1.0 / lambda) + C;
    long long n = guarded_ceil(v);
    return (n < 0) ? 0 : n;
}

long long coding_truncation_depth(double C, double lambda, double diam, double target) {
    if (C < 1.0) throw error("domain_error", "coding constant must be >= 1");
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "contraction rate must lie in (0,1)");
    if (diam <= 0.0 || target <= 0.0)
        throw error("domain_error", "diameter and target must be positive");
    double bound = C * diam;
    long long n = 0;
    while (bound > target * (1.0 + CEIL_SLACK)) {
        bound *= lambda;
        if (++n > 100000) throw error("domain_error", "coding depth does not terminate");
    }
    return n;
}

GridResolution grid_resolution_for_accuracy(double delta) {
    if (delta <= 0.0) throw error("domain_error", "accuracy target must be positive");
    double target = 4.0 * delta / 9.0;
    long long k = 0;
    double power = 1.0; // 3^-k
    while (power > target * (1.0 + CEIL_SLACK)) {
        power /= 3.0;
        if (++k > 1000) throw error("domain_error", "resolution does not terminate");
    }
    GridResolution r;
    r.clamped = k < 1;
    r.k = std::max<long long>(k, 1);
    r.count = 1LL << r.k;
    return r;
}

ConstantsReport build_report(const SystemModel& m, const ReportTargets& targets) {
    const HyperbolicityData& d = m.data;
    ReportTargets t = targets;
    if (t.eps_expansive <= 0.0) t.eps_expansive = d.delta0;
    if (t.delta_expansive <= 0.0) t.delta_expansive = t.delta_coding;
    if (t.C_coding <= 0.0) t.C_coding = 1.0 / (1.0 - d.lambda);
    if (t.delta_chart <= 0.0) t.delta_chart = d.delta0;

    ConstantsReport r;
    switch (m.kind) {
    case model_kind::affine_horseshoe: r.model_name = "horseshoe"; break;
    case model_kind::cat_map: r.model_name = "catmap"; break;
    case model_kind::user_grid: r.model_name = "grid"; break;
    }
    r.data = d;
    r.targets = t;
    r.K_adapted = adapted_metric_constant(d.c, d.lambda, d.mu_adapt);
    r.mu_convention = (d.mu_adapt >= 1.0) ? "degenerate mu=1" : "strict mu<1";
    r.angle_bound_rad = angle_lower_bound(r.K_adapted);
    r.alpha_s = holder_exponent_stable(d.beta_holder, d.lambda, d.L);
    r.alpha_u = holder_exponent_unstable(d.beta_holder, d.lambda, d.L_inv);
    r.C0_clamped = d.C0 < C0_CLAMP_FLOOR;
    r.eps0 = manifold_size(d.lambda, d.C0);
    r.theta = graph_contraction_rate(d.lambda, d.C1, t.delta_chart, r.K_adapted);
    r.lambda_prime = (5.0 * d.lambda + 3.0) / 8.0;
    r.alpha_shadow = shadowing_tolerance(t.C_shadow, d.lambda, 1.0);
    r.N_expansive =
        expansiveness_horizon(t.eps_expansive, t.delta_expansive, d.lambda, t.C_expansive);
    r.N_coding =
        coding_truncation_depth(t.C_coding, d.lambda, t.diam_base, t.delta_coding);
    GridResolution g = grid_resolution_for_accuracy(t.delta_coding);
    r.k_grid = g.k;
    r.rectangle_count = g.count;
    r.k_grid_clamped = g.clamped;
    return r;
}

} // namespace hyp
