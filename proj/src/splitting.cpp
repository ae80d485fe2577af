#include "hyp/splitting.hpp"

#include <cmath>

namespace hyp {

namespace {

vec2 sign_normalize(vec2 v) {
    double lead = (std::abs(v.x) >= std::abs(v.y)) ? v.x : v.y;
    return (lead < 0.0) ? vec2{-v.x, -v.y} : v;
}

double line_angle(vec2 a, vec2 b) {
    double cross = std::abs(a.x * b.y - a.y * b.x);
    return std::asin(std::min(1.0, cross));
}

SplittingFrame make_frame(vec2 e_s, vec2 e_u) {
    SplittingFrame f;
    f.e_s = sign_normalize(normalize2(e_s));
    f.e_u = sign_normalize(normalize2(e_u));
    f.angle = line_angle(f.e_s, f.e_u);
    return f;
}

vec2 torus_eigvec(const std::array<long long, 4>& mat, double lam) {
    double a = static_cast<double>(mat[0]);
    double b = static_cast<double>(mat[1]);
    double c = static_cast<double>(mat[2]);
    double d = static_cast<double>(mat[3]);
    if (std::abs(b) > 1e-14) return {b, lam - a};
    if (std::abs(c) > 1e-14) return {lam - d, c};
    // diagonal matrix: axis directions
    return (std::abs(a - lam) < std::abs(d - lam)) ? vec2{1.0, 0.0} : vec2{0.0, 1.0};
}

} // namespace

SplittingFrame eigen_frame(const SystemModel& m) {
    if (m.kind == model_kind::affine_horseshoe) {
        SplittingFrame f = make_frame({1.0, 0.0}, {0.0, 1.0});
        if (m.inverted) std::swap(f.e_s, f.e_u);
        return f;
    }
    if (m.kind == model_kind::cat_map) {
        double t = static_cast<double>(m.mat[0] + m.mat[3]);
        double d = static_cast<double>(m.mat[0] * m.mat[3] - m.mat[1] * m.mat[2]);
        double root = std::sqrt(t * t - 4.0 * d);
        double l1 = (t + root) / 2.0;
        double l2 = (t - root) / 2.0;
        double lu = (std::abs(l1) >= std::abs(l2)) ? l1 : l2;
        double ls = (std::abs(l1) >= std::abs(l2)) ? l2 : l1;
        SplittingFrame f = make_frame(torus_eigvec(m.mat, ls), torus_eigvec(m.mat, lu));
        if (m.inverted) std::swap(f.e_s, f.e_u);
        return f;
    }
    throw error("unsupported_model", "no exact eigen-frame for grid models");
}

SplittingFrame estimate_splitting(const SystemModel& m, const Point2& p, int n) {
    if (n < 1) throw error("domain_error", "cocycle depth must be positive");
    const vec2 generic{0.5403023058681398, 0.8414709848078965};

    // unstable: push a generic vector forward along the orbit ending at p
    Point2 q = iterate(m, p, -n);
    vec2 w = generic;
    for (int i = 0; i < n; ++i) {
        w = jacobian(m, q) * w;
        q = forward(m, q);
        if (norm_max(w) > 1e100 || i % 8 == 7) w = normalize2(w);
    }
    vec2 e_u = w;

    // stable: pull the generic vector backward along the orbit ending at p
    q = iterate(m, p, n);
    w = generic;
    for (int i = 0; i < n; ++i) {
        w = jacobian_inverse_map(m, q) * w;
        q = inverse(m, q);
        if (norm_max(w) > 1e100 || i % 8 == 7) w = normalize2(w);
    }
    vec2 e_s = w;

    if (!std::isfinite(e_s.x) || !std::isfinite(e_s.y) || !std::isfinite(e_u.x) ||
        !std::isfinite(e_u.y))
        throw error("degenerate_error", "cocycle estimate did not stay finite");
    SplittingFrame f = make_frame(e_s, e_u);
    if (f.angle < 1e-9)
        throw error("degenerate_error", "estimated directions collapse");
    return f;
}

SplittingFrame frame_at(const SystemModel& m, const Point2& p, int n) {
    if (m.kind == model_kind::user_grid) return estimate_splitting(m, p, n);
    return eigen_frame(m);
}

namespace {

mat2 frame_matrix(const SplittingFrame& f) {
    return {f.e_s.x, f.e_u.x, f.e_s.y, f.e_u.y};
}

struct margin_tracker {
    ConeCheckResult r;
    void feed(double margin, int sample, int check) {
        if (r.worst_sample < 0 || margin < r.worst_margin) {
            r.worst_margin = margin;
            r.worst_sample = sample;
            r.worst_check = check;
        }
    }
};

} // namespace

ConeCheckResult verify_cone_criterion(const SystemModel& m,
                                      const std::vector<Point2>& samples,
                                      double a, double lambda) {
    if (a <= 0.0) throw error("domain_error", "cone half-width must be positive");
    if (lambda <= 0.0 || lambda >= 1.0)
        throw error("domain_error", "expansion parameter must lie in (0,1)");
    if (samples.empty()) throw error("domain_error", "no sample points");

    margin_tracker worst;
    const double need = 1.0 / lambda;
    for (std::size_t si = 0; si < samples.size(); ++si) {
        const Point2& p = samples[si];
        mat2 Fp = frame_matrix(frame_at(m, p));
        // neighborhood-extended maps: samples may sit slightly off the
        // invariant set, where the strict branch maps are undefined
        Point2 fp = forward_nbhd(m, p);
        Point2 ip = inverse_nbhd(m, p);
        mat2 J = inverse(frame_matrix(frame_at(m, fp))) * jacobian_nbhd(m, p) * Fp;
        mat2 Jb =
            inverse(frame_matrix(frame_at(m, ip))) * jacobian_inverse_nbhd(m, p) * Fp;
        int s = static_cast<int>(si);

        const vec2 u_rays[3] = {{a, 1.0}, {-a, 1.0}, {0.0, 1.0}};
        for (vec2 v : u_rays) {
            vec2 w = J * v;
            double n = norm_max(w);
            if (n == 0.0) throw error("degenerate_error", "cone ray maps to zero");
            worst.feed((a * std::abs(w.y) - std::abs(w.x)) / n, s, 1);
            worst.feed(n / norm_max(v) - need, s, 3);
        }
        const vec2 s_rays[3] = {{1.0, a}, {1.0, -a}, {1.0, 0.0}};
        for (vec2 v : s_rays) {
            vec2 w = Jb * v;
            double n = norm_max(w);
            if (n == 0.0) throw error("degenerate_error", "cone ray maps to zero");
            worst.feed((a * std::abs(w.x) - std::abs(w.y)) / n, s, 2);
            worst.feed(n / norm_max(v) - need, s, 4);
        }
    }
    worst.r.pass = worst.r.worst_margin >= -1e-12;
    return worst.r;
}

} // namespace hyp
