#include "hyp/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hyp/manifold.hpp"
#include "hyp/splitting.hpp"

namespace hyp {

namespace {

// 1 + L + ... + L^{M-1}
double geom_sum(double L, int M) {
    if (M <= 0) return 0.0;
    if (std::abs(L - 1.0) < 1e-15) return static_cast<double>(M);
    return (std::pow(L, M) - 1.0) / (L - 1.0);
}

Point2 bracket_point(const SystemModel& m, const Point2& a, const Point2& b) {
    return bracket(m, a, b, m.data.delta0).point;
}

// Finite two-pass block bracketing over an explicit window. The forward pass
// pins the unstable coordinate to the pseudo-points while the stable data
// rides the dynamics; the backward pass realizes the pullback stably.
std::vector<Point2> shadow_window(const SystemModel& m, const std::vector<Point2>& x, int M) {
    const long long n = static_cast<long long>(x.size());
    std::vector<long long> B{0};
    while (B.back() < n - 1) B.push_back(std::min<long long>(B.back() + M, n - 1));
    const std::size_t b = B.size();

    std::vector<Point2> y(b);
    y[0] = x[0];
    for (std::size_t k = 0; k + 1 < b; ++k) {
        Point2 img = iterate(m, y[k], B[k + 1] - B[k]);
        y[k + 1] = bracket_point(m, x[static_cast<std::size_t>(B[k + 1])], img);
    }

    std::vector<Point2> w(y);
    for (std::size_t k = b - 1; k-- > 0;) {
        Point2 pre = iterate(m, w[k + 1], -(B[k + 1] - B[k]));
        w[k] = bracket_point(m, pre, y[k]);
    }

    std::vector<Point2> out(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < b; ++k) {
        out[static_cast<std::size_t>(B[k])] = w[k];
        if (k + 1 < b) {
            Point2 p = w[k];
            for (long long j = B[k] + 1; j < B[k + 1]; ++j) {
                p = forward(m, p);
                out[static_cast<std::size_t>(j)] = p;
            }
        }
    }
    return out;
}

int default_block_length(double lambda) {
    int M = 1;
    while (std::pow(lambda, M) >= 0.5 && M < 64) ++M;
    return M;
}

} // namespace

OrbitValidation validate_pseudo_orbit(const SystemModel& m, const PseudoOrbit& orbit) {
    if (orbit.points.size() < 2)
        throw error("domain_error", "pseudo-orbit needs at least two points");
    OrbitValidation v;
    const auto& p = orbit.points;
    const std::size_t n = p.size();
    auto track = [&](double g, long long i) {
        if (g > v.worst_gap) {
            v.worst_gap = g;
            v.worst_index = i;
        }
    };
    for (std::size_t i = 0; i + 1 < n; ++i)
        track(distance(forward(m, p[i]), p[i + 1]), static_cast<long long>(i));
    if (orbit.boundary == orbit_boundary::periodic)
        track(distance(forward(m, p[n - 1]), p[0]), static_cast<long long>(n - 1));
    v.valid = v.worst_gap < orbit.alpha;
    return v;
}

ShadowResult shadow(const SystemModel& m, const PseudoOrbit& orbit, const ShadowOptions& opt) {
    OrbitValidation v = validate_pseudo_orbit(m, orbit);
    if (!v.valid)
        throw error("validation_error", "pseudo-orbit jump " + std::to_string(v.worst_gap) +
                                            " at index " + std::to_string(v.worst_index) +
                                            " is not below alpha");

    const auto& d = m.data;
    int M = opt.M > 0 ? opt.M : default_block_length(d.lambda);
    if (std::pow(d.lambda, M) >= 0.5)
        throw error("domain_error", "block length is too coarse: lambda^M must be below 1/2");

    const double alpha = orbit.alpha;
    const double alpha_cap = (1.0 - d.lambda) * (0.5 * d.delta0) / opt.C;
    if (alpha > alpha_cap)
        throw error("domain_error", "alpha exceeds the shadowable range at scale delta0/2");

    // One block accumulates alpha * (1 + L + ... + L^{M-1}) of pseudo-error;
    // the bracketing contracts it by lambda^M per block; intermediates add the
    // in-block amplification. Reduces to C alpha / (1 - lambda) at M = 1.
    const double alpha_M = alpha * geom_sum(d.L, M);
    const double beta_block = opt.C * alpha_M / (1.0 - std::pow(d.lambda, M));
    const double predicted =
        std::pow(d.L, M - 1) * beta_block + alpha * geom_sum(d.L, M - 1);

    ShadowResult res;
    res.predicted_beta = predicted;
    res.periodic = orbit.boundary == orbit_boundary::periodic;

    const auto& x = orbit.points;
    const long long n = static_cast<long long>(x.size());

    if (!res.periodic) {
        res.orbit = shadow_window(m, x, M);
    } else {
        // Periodic extension: repeat the cycle until successive copy-start
        // candidates agree, then keep one converged period window.
        bool done = false;
        int q = 4;
        while (!done) {
            std::vector<Point2> ext(static_cast<std::size_t>(q * n + 1));
            for (long long i = 0; i <= q * n; ++i)
                ext[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i % n)];
            std::vector<Point2> w = shadow_window(m, ext, M);
            for (int j = q - 2; j >= 1 && !done; --j) {
                if (distance(w[static_cast<std::size_t>(j * n)],
                             w[static_cast<std::size_t>((j + 1) * n)]) <= opt.sweep_tol) {
                    res.orbit.assign(w.begin() + j * n, w.begin() + (j + 1) * n);
                    res.sweeps = q;
                    done = true;
                }
            }
            if (!done) {
                if (q >= opt.max_sweeps)
                    throw error("cap_exceeded", "periodic shadow sweeps did not converge");
                q = std::min(q * 2, opt.max_sweeps);
            }
        }
    }

    res.start = res.orbit.front();
    res.per_step_errors.resize(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        double e = distance(res.orbit[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
        res.per_step_errors[static_cast<std::size_t>(i)] = e;
        res.achieved_beta = std::max(res.achieved_beta, e);
    }
    for (long long i = 0; i + 1 < n; ++i)
        res.orbit_residual =
            std::max(res.orbit_residual, distance(forward(m, res.orbit[static_cast<std::size_t>(i)]),
                                                  res.orbit[static_cast<std::size_t>(i + 1)]));
    if (res.periodic)
        res.orbit_residual = std::max(
            res.orbit_residual, distance(forward(m, res.orbit.back()), res.orbit.front()));

    if (res.achieved_beta > res.predicted_beta * 1.05) {
        if (opt.strict)
            throw error("tolerance_exceeded", "achieved beta exceeds the predicted bound");
        res.bound_exceeded = true;
    }
    return res;
}

CloseResult anosov_close(const SystemModel& m, const Point2& x, long long n,
                         const ShadowOptions& opt) {
    if (n < 1) throw error("domain_error", "period must be positive");

    std::vector<Point2> pts(static_cast<std::size_t>(n));
    pts[0] = x;
    for (long long i = 1; i < n; ++i)
        pts[static_cast<std::size_t>(i)] = forward(m, pts[static_cast<std::size_t>(i - 1)]);
    const double gap = distance(forward(m, pts.back()), x);
    // a period-1 loop is shadowed as the doubled word [x, x]; the unique
    // periodic shadow is then the fixed point visited twice
    if (n == 1) pts.push_back(x);

    const auto& d = m.data;
    const double alpha_lim = (1.0 - d.lambda) * (0.5 * d.delta0) / opt.C;
    if (!(gap < alpha_lim))
        throw error("not_near_return", "return gap " + std::to_string(gap) +
                                           " is not below the closing threshold " +
                                           std::to_string(alpha_lim));

    PseudoOrbit po;
    po.points = std::move(pts);
    po.alpha = std::max(gap * (1.0 + 1e-9), 1e-14);
    po.boundary = orbit_boundary::periodic;

    ShadowResult sr = shadow(m, po, opt);
    CloseResult cr;
    cr.periodic_point = sr.start;
    cr.period = n;
    cr.orbit = std::move(sr.orbit);
    cr.orbit.resize(static_cast<std::size_t>(n)); // one period, drops the doubled copy
    cr.max_orbit_distance = sr.achieved_beta;
    cr.orbit_residual = sr.orbit_residual;
    return cr;
}

namespace {

int h_symbol_coarse(const Point2& p) { return p.y < 0.5 ? 0 : 1; }

// Point whose bi-infinite symbol sequence is `word` repeated, read from
// position `shift`: both coordinates are closed-form geometric digit sums.
Point2 h_periodic_point(const std::vector<int>& word, long long shift) {
    const long long P = static_cast<long long>(word.size());
    double ys = 0.0, pw = 1.0;
    for (long long k = 0; k < P; ++k) {
        pw /= 3.0;
        ys += 2.0 * word[static_cast<std::size_t>((shift + k) % P)] * pw;
    }
    double xs = 0.0;
    pw = 1.0;
    for (long long k = 1; k <= P; ++k) {
        pw /= 3.0;
        xs += 2.0 * word[static_cast<std::size_t>(((shift - k) % P + P) % P)] * pw;
    }
    const double scale = 1.0 / (1.0 - std::pow(3.0, -static_cast<double>(P)));
    return Point2{xs * scale, ys * scale, space_kind::plane};
}

SpecificationResult spec_horseshoe(const SystemModel& m,
                                   const std::vector<SpecSegment>& segments, long long N,
                                   double eps) {
    const long long J = static_cast<long long>(segments.size());
    long long P = J * N;
    std::vector<long long> T(static_cast<std::size_t>(J));
    for (long long i = 0; i < J; ++i) {
        T[static_cast<std::size_t>(i)] = (i == 0) ? 0
                                                  : T[static_cast<std::size_t>(i - 1)] +
                                                        segments[static_cast<std::size_t>(i - 1)].length + N;
        P += segments[static_cast<std::size_t>(i)].length;
    }

    const long long E_target =
        static_cast<long long>(std::ceil(std::log(1.0 / eps) / std::log(3.0))) + 1;
    const long long E = std::max<long long>(0, std::min(N / 2, E_target));

    std::vector<int> word(static_cast<std::size_t>(P), 0);
    std::vector<std::vector<Point2>> orbits(static_cast<std::size_t>(J));

    for (long long i = 0; i < J; ++i) {
        const auto& seg = segments[static_cast<std::size_t>(i)];
        auto& orb = orbits[static_cast<std::size_t>(i)];
        orb.reserve(static_cast<std::size_t>(seg.length));
        Point2 p = seg.start;
        for (long long j = 0; j < seg.length; ++j) {
            orb.push_back(p);
            word[static_cast<std::size_t>(T[static_cast<std::size_t>(i)] + j)] = h_symbol_coarse(p);
            if (j + 1 < seg.length) p = forward(m, p);
        }
        // best-effort continuation digits into the gap (true orbits never exit)
        try {
            Point2 c = orb.back();
            for (long long k = 0; k < E; ++k) {
                c = forward(m, c);
                word[static_cast<std::size_t>((T[static_cast<std::size_t>(i)] + seg.length + k) % P)] =
                    h_symbol_coarse(c);
            }
        } catch (const error&) {
        }
        // best-effort history digits leading into the next segment
        try {
            const long long next_T = (i + 1 < J) ? T[static_cast<std::size_t>(i + 1)] : P;
            Point2 c = segments[static_cast<std::size_t>((i + 1) % J)].start;
            for (long long k = 1; k <= E; ++k) {
                c = inverse(m, c);
                word[static_cast<std::size_t>(((next_T - k) % P + P) % P)] = h_symbol_coarse(c);
            }
        } catch (const error&) {
        }
    }

    SpecificationResult res;
    res.period = P;
    res.eps = eps;
    res.gap = N;
    res.point = h_periodic_point(word, 0);
    res.segment_tracking.resize(static_cast<std::size_t>(J), 0.0);
    for (long long i = 0; i < J; ++i) {
        double worst = 0.0;
        for (long long j = 0; j < segments[static_cast<std::size_t>(i)].length; ++j) {
            Point2 q = h_periodic_point(word, T[static_cast<std::size_t>(i)] + j);
            worst = std::max(worst,
                             distance(q, orbits[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
        }
        res.segment_tracking[static_cast<std::size_t>(i)] = worst;
    }
    return res;
}

struct EigenPair {
    double eig_s, eig_u;
    vec2 e_s, e_u;
};

EigenPair signed_eigen(const SystemModel& m) {
    const double a = static_cast<double>(m.mat[0]), b = static_cast<double>(m.mat[1]);
    const double c = static_cast<double>(m.mat[2]), dd = static_cast<double>(m.mat[3]);
    const double tr = a + dd, det = a * dd - b * c;
    const double disc = tr * tr - 4.0 * det;
    const double r = std::sqrt(disc);
    double l1 = (tr + r) / 2.0, l2 = (tr - r) / 2.0;
    EigenPair ep;
    ep.eig_u = std::abs(l1) >= std::abs(l2) ? l1 : l2;
    ep.eig_s = std::abs(l1) >= std::abs(l2) ? l2 : l1;
    auto eigvec = [&](double lam) {
        vec2 v{b, lam - a};
        if (norm_max(v) < 1e-12) v = vec2{lam - dd, c};
        return normalize2(v);
    };
    ep.e_s = eigvec(ep.eig_s);
    ep.e_u = eigvec(ep.eig_u);
    return ep;
}

SpecificationResult spec_torus(const SystemModel& m, const std::vector<SpecSegment>& segments,
                               long long N, double eps) {
    const long long J = static_cast<long long>(segments.size());
    const EigenPair ep = signed_eigen(m);
    mat2 F{ep.e_s.x, ep.e_u.x, ep.e_s.y, ep.e_u.y};
    mat2 Fi = inverse(F);

    // exact integer power A^{N+1}, with an overflow guard
    long long Pm[4] = {1, 0, 0, 1};
    for (long long k = 0; k < N + 1; ++k) {
        long long q[4] = {Pm[0] * m.mat[0] + Pm[1] * m.mat[2], Pm[0] * m.mat[1] + Pm[1] * m.mat[3],
                          Pm[2] * m.mat[0] + Pm[3] * m.mat[2], Pm[2] * m.mat[1] + Pm[3] * m.mat[3]};
        for (int t = 0; t < 4; ++t) {
            Pm[t] = q[t];
            if (std::abs(Pm[t]) > (1LL << 50))
                throw error("cap_exceeded", "gap length exceeds the exact junction range");
        }
    }
    const double H_u = std::pow(ep.eig_u, static_cast<double>(N + 1));

    const double C_ledger = 1.5;
    const double tol = 0.5 * std::min(eps, m.data.delta0) * (1.0 - m.data.lambda) / C_ledger;
    const double T_t = std::min(tol, 2e6 / std::abs(H_u));

    // orbit segments and per-junction corrected endpoints
    std::vector<std::vector<Point2>> orbits(static_cast<std::size_t>(J));
    for (long long i = 0; i < J; ++i) {
        auto& orb = orbits[static_cast<std::size_t>(i)];
        Point2 p = segments[static_cast<std::size_t>(i)].start;
        for (long long j = 0; j < segments[static_cast<std::size_t>(i)].length; ++j) {
            orb.push_back(p);
            if (j + 1 < segments[static_cast<std::size_t>(i)].length) p = forward(m, p);
        }
    }

    // fixed-point scaling keeps A^{N+1} y exact past the double mantissa
    const double SCALE = 4611686018427387904.0; // 2^62
    auto frac_residual = [&](const Point2& y, const Point2& S) {
        __int128 Y0 = static_cast<__int128>(std::llround(y.x * SCALE));
        __int128 Y1 = static_cast<__int128>(std::llround(y.y * SCALE));
        __int128 V0 = static_cast<__int128>(Pm[0]) * Y0 + static_cast<__int128>(Pm[1]) * Y1 -
                      static_cast<__int128>(std::llround(S.x * SCALE));
        __int128 V1 = static_cast<__int128>(Pm[2]) * Y0 + static_cast<__int128>(Pm[3]) * Y1 -
                      static_cast<__int128>(std::llround(S.y * SCALE));
        const __int128 ONE = static_cast<__int128>(1) << 62;
        V0 %= ONE;
        if (V0 < 0) V0 += ONE;
        V1 %= ONE;
        if (V1 < 0) V1 += ONE;
        return vec2{static_cast<double>(V0) / SCALE, static_cast<double>(V1) / SCALE};
    };

    std::vector<Point2> glued;
    std::vector<long long> T(static_cast<std::size_t>(J));
    double worst_jump = 0.0;
    for (long long i = 0; i < J; ++i) {
        T[static_cast<std::size_t>(i)] = static_cast<long long>(glued.size());
        const auto& orb = orbits[static_cast<std::size_t>(i)];
        const Point2 y = orb.back();
        const Point2 S = segments[static_cast<std::size_t>((i + 1) % J)].start;

        // lattice search: t H_u e_u - s e_s = mm - R with |t|, |s| small
        vec2 R = frac_residual(y, S);
        double best = -1.0, best_t = 0.0;
        const double W1 = std::abs(H_u) * T_t * std::abs(ep.e_u.x) + tol * std::abs(ep.e_s.x) + 1.0;
        for (long long m1 = static_cast<long long>(std::floor(-W1)); m1 <= static_cast<long long>(std::ceil(W1 + 1.0)); ++m1) {
            const double dx = static_cast<double>(m1) - R.x;
            long long lo, hi;
            if (std::abs(Fi.a01) > 1e-12) {
                double b1 = (-tol - Fi.a00 * dx) / Fi.a01 + R.y;
                double b2 = (tol - Fi.a00 * dx) / Fi.a01 + R.y;
                lo = static_cast<long long>(std::ceil(std::min(b1, b2) - 1e-12));
                hi = static_cast<long long>(std::floor(std::max(b1, b2) + 1e-12));
            } else {
                const double W2 = std::abs(H_u) * T_t * std::abs(ep.e_u.y) + tol + 1.0;
                lo = static_cast<long long>(std::floor(-W2));
                hi = static_cast<long long>(std::ceil(W2 + 1.0));
            }
            for (long long m2 = lo; m2 <= hi; ++m2) {
                const double dy = static_cast<double>(m2) - R.y;
                const double c_s = Fi.a00 * dx + Fi.a01 * dy;
                const double c_u = Fi.a10 * dx + Fi.a11 * dy;
                const double t = c_u / H_u, s = -c_s;
                if (std::abs(t) <= T_t && std::abs(s) <= tol) {
                    const double score = std::max(std::abs(t), std::abs(s));
                    if (best < 0.0 || score < best) {
                        best = score;
                        best_t = t;
                    }
                }
            }
        }
        if (best < 0.0)
            throw error("gap_too_small",
                        "no transition arc within eps for the requested gap length");

        Point2 z = translate(y, vec2{best_t * ep.e_u.x, best_t * ep.e_u.y});
        for (std::size_t j = 0; j + 1 < orb.size(); ++j) glued.push_back(orb[j]);
        glued.push_back(z);
        for (long long k = 0; k < N; ++k) {
            z = forward(m, z);
            glued.push_back(z);
        }
    }

    // honest jump audit fixes alpha, then the periodic shadow does the rest
    for (std::size_t i = 0; i < glued.size(); ++i)
        worst_jump = std::max(
            worst_jump, distance(forward(m, glued[i]), glued[(i + 1) % glued.size()]));

    PseudoOrbit po;
    po.points = glued;
    po.alpha = worst_jump * (1.0 + 1e-9) + 1e-15;
    po.boundary = orbit_boundary::periodic;
    ShadowResult sr = shadow(m, po, ShadowOptions{});

    SpecificationResult res;
    res.point = sr.start;
    res.period = static_cast<long long>(glued.size());
    res.eps = eps;
    res.gap = N;
    res.segment_tracking.resize(static_cast<std::size_t>(J), 0.0);
    for (long long i = 0; i < J; ++i) {
        double worst = 0.0;
        const auto& orb = orbits[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < orb.size(); ++j)
            worst = std::max(worst, distance(sr.orbit[static_cast<std::size_t>(
                                                 (T[static_cast<std::size_t>(i)] +
                                                  static_cast<long long>(j)) %
                                                 res.period)],
                                             orb[j]));
        res.segment_tracking[static_cast<std::size_t>(i)] = worst;
    }
    return res;
}

} // namespace

SpecificationResult specification_orbit(const SystemModel& m,
                                        const std::vector<SpecSegment>& segments, long long N,
                                        double eps) {
    if (segments.empty()) throw error("domain_error", "need at least one segment");
    for (const auto& s : segments)
        if (s.length < 1) throw error("domain_error", "segment length must be positive");
    if (eps <= 0.0) eps = m.data.delta0 / 2.0;
    if (N < 1) throw error("gap_too_small", "gap must be at least the mixing time");

    switch (m.kind) {
    case model_kind::affine_horseshoe:
        return spec_horseshoe(m, segments, N, eps);
    case model_kind::cat_map:
        return spec_torus(m, segments, N, eps);
    default:
        throw error("unsupported_model", "specification gluing needs a built-in model");
    }
}

PseudoOrbit make_noisy_orbit(const SystemModel& m, const Point2& start, long long length,
                             double amplitude, std::uint64_t seed) {
    if (length < 2) throw error("domain_error", "orbit needs at least two points");
    if (amplitude < 0.0) throw error("domain_error", "amplitude must be nonnegative");

    std::mt19937_64 eng(seed);
    auto u01 = [&]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    auto noise = [&]() { return amplitude * (2.0 * u01() - 1.0); };

    PseudoOrbit po;
    po.points.resize(static_cast<std::size_t>(length));

    if (m.kind == model_kind::affine_horseshoe) {
        // Ride an exact coded reference orbit so every point stays inside the
        // branch strips; the expanding component is damped so one-step jumps
        // stay below 2 * amplitude.
        std::vector<int> word(static_cast<std::size_t>(length));
        Point2 p = start;
        bool alive = true;
        for (long long i = 0; i < length; ++i) {
            if (alive) {
                word[static_cast<std::size_t>(i)] = h_symbol_coarse(p);
                try {
                    p = forward(m, p);
                } catch (const error&) {
                    alive = false;
                }
            } else {
                word[static_cast<std::size_t>(i)] = static_cast<int>(eng() & 1u);
            }
        }
        for (long long i = 0; i < length; ++i) {
            Point2 r = h_periodic_point(word, i);
            double X = std::clamp(r.x + noise(), 0.0, 1.0);
            double lo = word[static_cast<std::size_t>(i)] == 0 ? 0.0 : 2.0 / 3.0;
            double Y = std::clamp(r.y + noise() / 3.0, lo, lo + 1.0 / 3.0);
            po.points[static_cast<std::size_t>(i)] = Point2{X, Y, space_kind::plane};
        }
        po.alpha = std::max(2.0 * amplitude, 1e-14);
    } else {
        po.points[0] = start;
        for (long long i = 1; i < length; ++i)
            po.points[static_cast<std::size_t>(i)] =
                translate(forward(m, po.points[static_cast<std::size_t>(i - 1)]),
                          vec2{noise(), noise()});
        po.alpha = std::max(amplitude, 1e-14);
    }
    return po;
}

} // namespace hyp
