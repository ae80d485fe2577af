#include "hyp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "hyp/shadowing.hpp"

namespace hyp {

namespace {

// branch of a u-interval: which horseshoe strip contains it
int strip_of(const interval& u, double margin) {
    if (u.lo >= -margin && u.hi <= 1.0 / 3.0 + margin) return 0;
    if (u.lo >= 2.0 / 3.0 - margin && u.hi <= 1.0 + margin) return 1;
    return -1;
}

struct ImageRect {
    interval s, u;
    bool ok = false;
};

// exact affine image of a product rectangle under the horseshoe branch map
ImageRect h_image(const Rectangle& r, double margin) {
    ImageRect img;
    int b = strip_of(r.u_iv, margin);
    if (b < 0) return img;
    img.ok = true;
    img.s = {r.s_iv.lo / 3.0 + 2.0 * b / 3.0, r.s_iv.hi / 3.0 + 2.0 * b / 3.0};
    img.u = {3.0 * r.u_iv.lo - 2.0 * b, 3.0 * r.u_iv.hi - 2.0 * b};
    return img;
}

interval hull_s(const Rectangle& r) {
    if (r.samples.empty()) return r.s_iv;
    interval h{r.samples.front().x, r.samples.front().x};
    for (const auto& p : r.samples) {
        h.lo = std::min(h.lo, p.x);
        h.hi = std::max(h.hi, p.x);
    }
    return h;
}

interval hull_u(const Rectangle& r) {
    if (r.samples.empty()) return r.u_iv;
    interval h{r.samples.front().y, r.samples.front().y};
    for (const auto& p : r.samples) {
        h.lo = std::min(h.lo, p.y);
        h.hi = std::max(h.hi, p.y);
    }
    return h;
}

void require_horseshoe(const SystemModel& m, const char* what) {
    if (m.kind != model_kind::affine_horseshoe)
        throw error("unsupported_model", std::string(what) + " needs the affine horseshoe");
}

std::string future_of(const std::string& word) {
    auto bar = word.find('|');
    return bar == std::string::npos ? word : word.substr(bar + 1);
}

std::string past_of(const std::string& word) {
    auto bar = word.find('|');
    return bar == std::string::npos ? std::string{} : word.substr(0, bar);
}

} // namespace

namespace {

// 3^-k with a single rounding; endpoint subtraction would lose ~1e-16 of
// absolute accuracy, which at depth 14 is eight digits of the cell width
double pow3_neg(int k) {
    if (k >= 40) return std::pow(3.0, -k); // beyond exact integer range
    long long d = 1;
    for (int i = 0; i < k && i < 40; ++i) d *= 3;
    return 1.0 / static_cast<double>(d);
}

} // namespace

double Partition::diameter() const {
    if (flavor != partition_flavor::cover)
        return std::max(pow3_neg(past_len), pow3_neg(future_len));
    double d = 0.0;
    for (const auto& r : rects) d = std::max(d, std::max(r.s_iv.length(), r.u_iv.length()));
    return d;
}

double Partition::refined_extent() const {
    if (flavor != partition_flavor::cover) return pow3_neg(future_len);
    double d = 0.0;
    for (const auto& r : rects) d = std::max(d, r.u_iv.length());
    return d;
}

Partition base_partition(const SystemModel& m) {
    require_horseshoe(m, "the analytic base partition");
    Partition p;
    p.flavor = partition_flavor::base;
    p.past_len = 0;
    p.future_len = 1;
    p.rects = {Rectangle{0, {0.0, 1.0}, {0.0, 1.0 / 3.0}, "|0", {}},
               Rectangle{1, {0.0, 1.0}, {2.0 / 3.0, 1.0}, "|1", {}}};
    return p;
}

Partition refine_words(const SystemModel& m, const Partition& p, int k) {
    require_horseshoe(m, "word refinement");
    if (p.flavor != partition_flavor::base && p.flavor != partition_flavor::words)
        throw error("domain_error", "word refinement expects a word-indexed partition");
    if (k < p.future_len) throw error("domain_error", "refinement depth below the current one");
    if (k > 20) throw error("budget_exceeded", "word refinement beyond 2^20 rectangles");

    Partition cur = p;
    while (cur.future_len < k) {
        Partition next;
        next.flavor = partition_flavor::words;
        next.past_len = cur.past_len;
        next.future_len = cur.future_len + 1;
        next.rects.reserve(cur.rects.size() * 2);
        // join with the pullback: new first digit b, then the old future word
        for (int b = 0; b < 2; ++b) {
            for (const auto& r : cur.rects) {
                Rectangle nr;
                nr.s_iv = r.s_iv;
                nr.u_iv = {(r.u_iv.lo + 2.0 * b) / 3.0, (r.u_iv.hi + 2.0 * b) / 3.0};
                nr.word = past_of(r.word) + "|" + std::to_string(b) + future_of(r.word);
                next.rects.push_back(std::move(nr));
            }
        }
        std::sort(next.rects.begin(), next.rects.end(),
                  [](const Rectangle& a, const Rectangle& b) { return a.word < b.word; });
        for (std::size_t i = 0; i < next.rects.size(); ++i)
            next.rects[i].id = static_cast<int>(i);
        cur = std::move(next);
    }
    return cur;
}

Partition refine_to_diameter(const SystemModel& m, const Partition& p, double eps,
                             std::size_t max_rects) {
    require_horseshoe(m, "diameter refinement");
    if (eps <= 0.0) throw error("domain_error", "target diameter must be positive");

    Partition cur = p;
    while (cur.diameter() > eps) {
        if (cur.rects.size() * 4 > max_rects)
            throw error("budget_exceeded", "diameter refinement exceeds the rectangle cap");
        // one round: a future digit (pullback) and a past digit (pushforward)
        Partition mid;
        mid.flavor = partition_flavor::bidirectional;
        mid.past_len = cur.past_len;
        mid.future_len = cur.future_len + 1;
        for (int b = 0; b < 2; ++b)
            for (const auto& r : cur.rects) {
                Rectangle nr;
                nr.s_iv = r.s_iv;
                nr.u_iv = {(r.u_iv.lo + 2.0 * b) / 3.0, (r.u_iv.hi + 2.0 * b) / 3.0};
                nr.word = past_of(r.word) + "|" + std::to_string(b) + future_of(r.word);
                mid.rects.push_back(std::move(nr));
            }
        Partition next;
        next.flavor = partition_flavor::bidirectional;
        next.past_len = mid.past_len + 1;
        next.future_len = mid.future_len;
        // the new digit is the oldest past symbol: it subdivides the stable
        // axis at scale 3^-past_len from the low end
        const double cell = std::pow(3.0, -next.past_len);
        for (int b = 0; b < 2; ++b)
            for (const auto& r : mid.rects) {
                Rectangle nr;
                nr.u_iv = r.u_iv;
                nr.s_iv = {r.s_iv.lo + 2.0 * b * cell, r.s_iv.lo + 2.0 * b * cell + cell};
                nr.word = std::to_string(b) + past_of(r.word) + "|" + future_of(r.word);
                next.rects.push_back(std::move(nr));
            }
        cur = std::move(next);
    }
    std::sort(cur.rects.begin(), cur.rects.end(),
              [](const Rectangle& a, const Rectangle& b) { return a.word < b.word; });
    for (std::size_t i = 0; i < cur.rects.size(); ++i)
        cur.rects[i].id = static_cast<int>(i);
    return cur;
}

Partition refine_intersections(const SystemModel& m, const Partition& cover, double margin) {
    (void)m;
    const auto& rs = cover.rects;
    const std::size_t n = rs.size();

    // connected overlap clusters
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (overlap_interior(hull_s(rs[i]), hull_s(rs[j]), margin) &&
                overlap_interior(hull_u(rs[i]), hull_u(rs[j]), margin))
                parent[find(i)] = find(j);

    Partition out;
    out.flavor = partition_flavor::cover;
    std::vector<char> emitted(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        if (find(c) != c) continue;
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (find(i) == c) members.push_back(i);
        if (members.size() == 1) {
            out.rects.push_back(rs[members[0]]);
            continue;
        }
        // atomize the cluster on the endpoint grid
        auto collect = [&](bool stable) {
            std::vector<double> es;
            for (auto i : members) {
                interval iv = stable ? hull_s(rs[i]) : hull_u(rs[i]);
                es.push_back(iv.lo);
                es.push_back(iv.hi);
            }
            std::sort(es.begin(), es.end());
            std::vector<double> uniq;
            for (double e : es) {
                if (!uniq.empty() && e - uniq.back() <= margin) {
                    if (e != uniq.back())
                        throw error("degenerate_overlap",
                                    "distinct rectangle endpoints collide at the margin");
                    continue;
                }
                uniq.push_back(e);
            }
            return uniq;
        };
        std::vector<double> se = collect(true), ue = collect(false);
        for (std::size_t a = 0; a + 1 < se.size(); ++a)
            for (std::size_t b = 0; b + 1 < ue.size(); ++b) {
                double cs = (se[a] + se[a + 1]) / 2.0, cu = (ue[b] + ue[b + 1]) / 2.0;
                Rectangle atom;
                atom.s_iv = {se[a], se[a + 1]};
                atom.u_iv = {ue[b], ue[b + 1]};
                bool covered = false;
                for (auto i : members) {
                    if (hull_s(rs[i]).contains(cs) && hull_u(rs[i]).contains(cu)) {
                        covered = true;
                        for (const auto& sp : rs[i].samples)
                            if (atom.s_iv.contains(sp.x, margin) && atom.u_iv.contains(sp.y, margin))
                                atom.samples.push_back(sp);
                    }
                }
                if (covered) out.rects.push_back(std::move(atom));
            }
    }
    for (std::size_t i = 0; i < out.rects.size(); ++i)
        out.rects[i].id = static_cast<int>(i);
    return out;
}

MarkovReport verify_markov(const SystemModel& m, const Partition& p, int samples_per_rect,
                           double margin) {
    (void)samples_per_rect;
    if (p.rects.empty()) throw error("domain_error", "partition is empty");
    if (p.flavor != partition_flavor::cover) require_horseshoe(m, "the interval Markov audit");

    MarkovReport rep;
    rep.worst_margin = 1e300;
    auto note = [&](int i, int j, double slack, const char* which) {
        if (slack < rep.worst_margin) {
            rep.worst_margin = slack;
            rep.worst = MarkovViolation{i, j, slack, which};
        }
    };

    for (const auto& ri : p.rects) {
        interval si = hull_s(ri), ui = hull_u(ri);
        Rectangle tmp{ri.id, si, ui, "", {}};
        ImageRect img = h_image(tmp, margin);
        if (!img.ok) {
            note(ri.id, -1, -(std::max(ui.lo, ui.hi - 1.0)), "u-branch");
            continue;
        }
        for (const auto& rj : p.rects) {
            interval sj = hull_s(rj), uj = hull_u(rj);
            if (!(overlap_interior(img.s, sj, margin) && overlap_interior(img.u, uj, margin)))
                continue;
            ++rep.pairs_checked;
            // image unstable slices must run all the way across R_j
            note(ri.id, rj.id, std::min(uj.lo - img.u.lo, img.u.hi - uj.hi), "u-onto");
            // image stable slices must stay inside R_j
            note(ri.id, rj.id, std::min(img.s.lo - sj.lo, sj.hi - img.s.hi), "s-into");
        }
    }
    if (rep.pairs_checked == 0 && rep.worst_margin > 1e299)
        throw error("domain_error", "no rectangle pair has overlapping dynamics");
    rep.pass = rep.worst_margin >= -margin;
    return rep;
}

TransitionMatrix transition_matrix(const SystemModel& m, const Partition& p, double margin) {
    if (p.rects.empty()) throw error("domain_error", "partition is empty");
    TransitionMatrix A;
    A.m = static_cast<int>(p.rects.size());
    A.a.assign(static_cast<std::size_t>(A.m) * static_cast<std::size_t>(A.m), 0);

    if (p.flavor != partition_flavor::cover) {
        require_horseshoe(m, "the interval transition test");
        for (int i = 0; i < A.m; ++i) {
            ImageRect img = h_image(p.rects[static_cast<std::size_t>(i)], margin);
            if (!img.ok) continue;
            for (int j = 0; j < A.m; ++j) {
                const auto& rj = p.rects[static_cast<std::size_t>(j)];
                if (overlap_interior(img.s, rj.s_iv, margin) &&
                    overlap_interior(img.u, rj.u_iv, margin))
                    A.set(i, j, 1);
            }
        }
        return A;
    }

    // sampled path: a sample of R_i whose image lands in R_j's hull
    for (int i = 0; i < A.m; ++i) {
        for (const auto& sp : p.rects[static_cast<std::size_t>(i)].samples) {
            Point2 fp;
            try {
                fp = forward(m, sp);
            } catch (const error&) {
                continue;
            }
            for (int j = 0; j < A.m; ++j) {
                const auto& rj = p.rects[static_cast<std::size_t>(j)];
                if (hull_s(rj).contains(fp.x, margin) && hull_u(rj).contains(fp.y, margin))
                    A.set(i, j, 1);
            }
        }
    }
    return A;
}

Partition build_cover_via_shadowing(const SystemModel& m, double gamma, double beta,
                                    const CoverOptions& opt) {
    if (gamma <= 0.0 || beta <= 0.0) throw error("domain_error", "gamma and beta must be positive");
    const double C_ledger = 1.5;
    const double alpha_shadow = (1.0 - m.data.lambda) * beta / C_ledger;
    if (!(gamma < alpha_shadow / 2.0))
        throw error("domain_error", "net spacing must be below half the shadowable tolerance");

    // invariant-set sample points
    std::vector<Point2> samples;
    if (m.kind == model_kind::affine_horseshoe) {
        int K = 1;
        while (std::pow(3.0, -K) > gamma / 2.0 && K < 16) ++K;
        std::vector<int> word(static_cast<std::size_t>(K));
        for (int code = 0; code < (1 << K); ++code) {
            for (int j = 0; j < K; ++j) word[static_cast<std::size_t>(j)] = (code >> j) & 1;
            // one period-K point per word; backward digit at time -(k+1) is
            // the word read cyclically in reverse
            double ys = 0.0, xs = 0.0, pw = 1.0;
            for (int k = 0; k < K; ++k) {
                pw /= 3.0;
                ys += 2.0 * word[static_cast<std::size_t>(k)] * pw;
                xs += 2.0 * word[static_cast<std::size_t>(K - 1 - k)] * pw;
            }
            double scale = 1.0 / (1.0 - std::pow(3.0, -K));
            samples.push_back(Point2{xs * scale, ys * scale, space_kind::plane});
        }
    } else if (m.kind == model_kind::cat_map) {
        int q = static_cast<int>(std::ceil(1.5 / gamma)) + 1;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
                samples.push_back(Point2{static_cast<double>(i) / q, static_cast<double>(j) / q,
                                         space_kind::torus});
    } else {
        throw error("unsupported_model", "cover construction needs a built-in model");
    }

    // greedy gamma-net
    std::vector<Point2> net;
    for (const auto& s : samples) {
        bool covered = false;
        for (const auto& c : net)
            if (distance(s, c) <= gamma) {
                covered = true;
                break;
            }
        if (!covered) net.push_back(s);
        if (net.size() > opt.max_rects)
            throw error("budget_exceeded", "net size exceeds the rectangle cap");
    }

    // alpha-transition digraph on the net
    const double alpha = opt.alpha_factor * gamma;
    const std::size_t nn = net.size();
    std::vector<std::vector<int>> succ(nn), pred(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        Point2 fp = forward(m, net[i]);
        for (std::size_t j = 0; j < nn; ++j)
            if (distance(fp, net[j]) < alpha) {
                succ[i].push_back(static_cast<int>(j));
                pred[j].push_back(static_cast<int>(i));
            }
        if (succ[i].empty())
            throw error("insufficient_density", "a net point has no admissible successor");
    }

    // window length: enough contraction that truncation is below beta/4
    int W = 1;
    while (std::pow(m.data.lambda, W) * m.data.delta0 > beta / 4.0 && W < 64) ++W;

    std::mt19937_64 eng(opt.seed);
    auto pick = [&](const std::vector<int>& v) {
        return v[static_cast<std::size_t>(eng() % v.size())];
    };

    Partition out;
    out.flavor = partition_flavor::cover;
    for (std::size_t s = 0; s < nn; ++s) {
        Rectangle rect;
        rect.id = static_cast<int>(s);
        for (int walk = 0; walk < opt.walks_per_point; ++walk) {
            std::vector<int> idx(static_cast<std::size_t>(2 * W + 1));
            idx[static_cast<std::size_t>(W)] = static_cast<int>(s);
            for (int k = W + 1; k <= 2 * W; ++k)
                idx[static_cast<std::size_t>(k)] =
                    pick(succ[static_cast<std::size_t>(idx[static_cast<std::size_t>(k - 1)])]);
            for (int k = W - 1; k >= 0; --k) {
                const auto& pre = pred[static_cast<std::size_t>(idx[static_cast<std::size_t>(k + 1)])];
                if (pre.empty())
                    throw error("insufficient_density", "a net point has no admissible predecessor");
                idx[static_cast<std::size_t>(k)] = pick(pre);
            }
            PseudoOrbit po;
            po.alpha = alpha;
            po.points.reserve(idx.size());
            for (int id : idx) po.points.push_back(net[static_cast<std::size_t>(id)]);
            ShadowResult sr = shadow(m, po);
            rect.samples.push_back(sr.orbit[static_cast<std::size_t>(W)]);
        }
        rect.s_iv = hull_s(rect);
        rect.u_iv = hull_u(rect);
        out.rects.push_back(std::move(rect));
    }
    return out;
}

} // namespace hyp
