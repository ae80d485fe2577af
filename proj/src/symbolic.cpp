#include "hyp/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace hyp {

int SymbolWindow::symbol_at(long long t) const {
    const long long n = static_cast<long long>(symbols.size());
    if (n == 0) throw error("domain_error", "empty symbol window");
    long long i = t - offset;
    if (periodic) i = ((i % n) + n) % n;
    if (i < 0 || i >= n)
        throw error("domain_error", "time index outside the symbol window");
    return symbols[static_cast<std::size_t>(i)];
}

bool is_admissible(const TransitionMatrix& A, const SymbolWindow& w) {
    const long long n = static_cast<long long>(w.symbols.size());
    for (int s : w.symbols)
        if (s < 0 || s >= A.m) throw error("alphabet_mismatch", "symbol outside the alphabet");
    for (long long i = 0; i + 1 < n; ++i)
        if (!A.at(w.symbols[static_cast<std::size_t>(i)], w.symbols[static_cast<std::size_t>(i + 1)]))
            return false;
    if (w.periodic && n >= 1 &&
        !A.at(w.symbols[static_cast<std::size_t>(n - 1)], w.symbols[0]))
        return false;
    return true;
}

SpectralResult spectral_radius(const TransitionMatrix& A, double tol) {
    const int m = A.m;
    if (m <= 0) throw error("domain_error", "empty matrix");
    SpectralResult res;

    std::vector<double> v(static_cast<std::size_t>(m), 1.0), av(static_cast<std::size_t>(m));
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += A.at(i, j) * in[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = s;
        }
    };

    double rho_prev = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 1; it <= 100000; ++it) {
        apply(v, av);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < m; ++i) {
            num += v[static_cast<std::size_t>(i)] * av[static_cast<std::size_t>(i)];
            den += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        }
        if (den == 0.0) break; // vector annihilated; fall back to traces
        double rho = num / den;
        double norm = 0.0;
        for (double x : av) norm = std::max(norm, std::abs(x));
        if (norm == 0.0) {
            rho_prev = 0.0;
            converged = true;
            res.iterations = it;
            break;
        }
        for (double& x : av) x /= norm;
        v = av;
        res.iterations = it;
        if (std::abs(rho - rho_prev) <= tol) {
            rho_prev = rho;
            converged = true;
            break;
        }
        rho_prev = rho;
    }

    if (converged && std::isfinite(rho_prev)) {
        res.rho = std::max(rho_prev, 0.0);
        apply(v, av);
        for (int i = 0; i < m; ++i)
            res.residual = std::max(res.residual, std::abs(av[static_cast<std::size_t>(i)] -
                                                           res.rho * v[static_cast<std::size_t>(i)]));
    } else {
        // reducible or periodic structure: growth-rate surrogate over traces
        res.fallback = true;
        std::vector<double> P(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
        for (int i = 0; i < m; ++i) P[static_cast<std::size_t>(i) * m + i] = 1.0;
        double best = 0.0;
        for (int n = 1; n <= 20; ++n) {
            std::vector<double> Q(P.size(), 0.0);
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < m; ++k) {
                    double pik = P[static_cast<std::size_t>(i) * m + k];
                    if (pik == 0.0) continue;
                    for (int j = 0; j < m; ++j)
                        Q[static_cast<std::size_t>(i) * m + j] += pik * A.at(k, j);
                }
            P = Q;
            double tr = 0.0;
            for (int i = 0; i < m; ++i) tr += P[static_cast<std::size_t>(i) * m + i];
            if (tr > 0.0) best = std::max(best, std::pow(tr, 1.0 / n));
        }
        res.rho = best;
    }
    res.entropy = res.rho > 0.0 ? std::log(res.rho) : -std::numeric_limits<double>::infinity();
    return res;
}

namespace {

// admissible cyclic words of length n: DFS over prefixes with a work budget
bool brute_enumerate(const TransitionMatrix& A, int n, long long budget,
                     const std::function<void(const std::vector<int>&)>& emit) {
    std::vector<int> word(static_cast<std::size_t>(n));
    long long work = 0;
    std::function<bool(int)> dfs = [&](int depth) -> bool {
        if (++work > budget) return false;
        if (depth == n) {
            if (A.at(word[static_cast<std::size_t>(n - 1)], word[0])) emit(word);
            return true;
        }
        for (int s = 0; s < A.m; ++s) {
            if (depth > 0 && !A.at(word[static_cast<std::size_t>(depth - 1)], s)) continue;
            word[static_cast<std::size_t>(depth)] = s;
            if (!dfs(depth + 1)) return false;
        }
        return true;
    };
    return dfs(0);
}

} // namespace

PeriodicCount count_periodic(const TransitionMatrix& A, int n, long long brute_budget) {
    if (n < 1) throw error("domain_error", "period must be positive");
    const int m = A.m;
    PeriodicCount pc;

    // exact integer trace of A^n
    std::vector<long long> P(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) P[static_cast<std::size_t>(i) * m + i] = 1;
    for (int step = 0; step < n; ++step) {
        std::vector<long long> Q(P.size(), 0);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                long long pik = P[static_cast<std::size_t>(i) * m + k];
                if (!pik) continue;
                for (int j = 0; j < m; ++j)
                    if (A.at(k, j)) {
                        long long& q = Q[static_cast<std::size_t>(i) * m + j];
                        if (q > (std::numeric_limits<long long>::max)() - pik * A.at(k, j))
                            throw error("cap_exceeded", "trace power overflows 64-bit range");
                        q += pik * A.at(k, j);
                    }
            }
        P = Q;
    }
    for (int i = 0; i < m; ++i) pc.trace += P[static_cast<std::size_t>(i) * m + i];

    long long count = 0;
    bool complete = brute_enumerate(A, n, brute_budget, [&](const std::vector<int>&) { ++count; });
    if (complete)
        pc.brute = count;
    else
        pc.capped = true;
    return pc;
}

IrreducibilityReport check_irreducible_aperiodic(const TransitionMatrix& A) {
    const int m = A.m;
    IrreducibilityReport rep;

    auto reach_from = [&](int s) {
        std::vector<char> seen(static_cast<std::size_t>(m), 0);
        std::vector<int> stack{s};
        seen[static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < m; ++v)
                if (A.at(u, v) && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
        }
        return seen;
    };

    rep.irreducible = true;
    for (int s = 0; s < m && rep.irreducible; ++s) {
        auto seen = reach_from(s);
        for (char c : seen)
            if (!c) {
                rep.irreducible = false;
                break;
            }
    }
    if (!rep.irreducible) return rep;

    // BFS levels; gcd of (d[u] + 1 - d[v]) over edges is the period
    std::vector<long long> depth(static_cast<std::size_t>(m), -1);
    std::vector<int> queue{0};
    depth[0] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int u = queue[qi];
        for (int v = 0; v < m; ++v)
            if (A.at(u, v) && depth[static_cast<std::size_t>(v)] < 0) {
                depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
    }
    long long g = 0;
    for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v)
            if (A.at(u, v))
                g = std::gcd(g, std::abs(depth[static_cast<std::size_t>(u)] + 1 -
                                         depth[static_cast<std::size_t>(v)]));
    rep.period = g == 0 ? 1 : g;
    rep.aperiodic = rep.period == 1;
    return rep;
}

namespace {

struct Box {
    interval s, u;
    bool empty(double tol = -1e-15) const { return s.length() < tol || u.length() < tol; }
};

Box intersect(const Box& a, const Box& b) {
    return Box{{std::max(a.s.lo, b.s.lo), std::min(a.s.hi, b.s.hi)},
               {std::max(a.u.lo, b.u.lo), std::min(a.u.hi, b.u.hi)}};
}

// exact inverse image of a box under horseshoe branch b
Box h_preimage(const Box& z, int b) {
    return Box{{3.0 * z.s.lo - 2.0 * b, 3.0 * z.s.hi - 2.0 * b},
               {(z.u.lo + 2.0 * b) / 3.0, (z.u.hi + 2.0 * b) / 3.0}};
}

// exact forward image of a box under horseshoe branch b
Box h_image_box(const Box& z, int b) {
    return Box{{z.s.lo / 3.0 + 2.0 * b / 3.0, z.s.hi / 3.0 + 2.0 * b / 3.0},
               {3.0 * z.u.lo - 2.0 * b, 3.0 * z.u.hi - 2.0 * b}};
}

int branch_of_rect(const Rectangle& r) {
    return r.u_iv.hi <= 1.0 / 3.0 + 1e-12 ? 0 : 1;
}

} // namespace

DecodeResult decode(const SystemModel& m, const Partition& p, const SymbolWindow& w, long long N,
                    double C) {
    if (N < 0) throw error("domain_error", "window radius must be nonnegative");
    if (p.rects.empty()) throw error("domain_error", "partition is empty");
    const int nm = static_cast<int>(p.rects.size());
    auto rect_for = [&](long long t) -> const Rectangle& {
        int s = w.symbol_at(t);
        if (s < 0 || s >= nm) throw error("alphabet_mismatch", "symbol outside the partition");
        return p.rects[static_cast<std::size_t>(s)];
    };

    if (m.kind != model_kind::affine_horseshoe || p.flavor == partition_flavor::cover)
        throw error("unsupported_model", "interval decoding needs a horseshoe interval partition");

    // backward pullback recursion, then push N steps forward
    Box z{rect_for(N).s_iv, rect_for(N).u_iv};
    for (long long j = N - 1; j >= -N; --j) {
        const Rectangle& r = rect_for(j);
        Box own{r.s_iv, r.u_iv};
        z = intersect(own, h_preimage(z, branch_of_rect(r)));
        if (z.empty()) throw error("empty_intersection", "symbol word is not realized");
    }
    for (long long j = -N; j < 0; ++j) z = h_image_box(z, branch_of_rect(rect_for(j)));

    DecodeResult res;
    res.point = Point2{(z.s.lo + z.s.hi) / 2.0, (z.u.lo + z.u.hi) / 2.0, space_kind::plane};
    res.cell_diameter = std::max(z.s.length(), z.u.length());
    res.accuracy = C * std::pow(m.data.lambda, static_cast<double>(N)) * p.diameter();
    return res;
}

ItineraryResult itinerary(const SystemModel& m, const Partition& p, const Point2& x, long long N,
                          double margin) {
    if (p.rects.empty()) throw error("domain_error", "partition is empty");

    ItineraryResult res;
    res.window.offset = -N;
    res.window.symbols.reserve(static_cast<std::size_t>(2 * N + 1));

    Point2 back = iterate(m, x, -N);
    Point2 cur = back;
    for (long long j = -N; j <= N; ++j) {
        if (j > -N) cur = forward(m, cur);
        int chosen = -1;
        int hits = 0;
        for (const auto& r : p.rects) {
            if (r.s_iv.contains(cur.x, margin) && r.u_iv.contains(cur.y, margin)) {
                ++hits;
                if (chosen < 0 || r.id < chosen) chosen = r.id;
            }
        }
        if (chosen < 0)
            throw error("outside_partition",
                        "orbit point at time " + std::to_string(j) + " lies in no rectangle");
        const auto& cr = p.rects[static_cast<std::size_t>(chosen)];
        bool near_edge = std::abs(cur.x - cr.s_iv.lo) <= margin ||
                         std::abs(cur.x - cr.s_iv.hi) <= margin ||
                         std::abs(cur.y - cr.u_iv.lo) <= margin ||
                         std::abs(cur.y - cr.u_iv.hi) <= margin;
        if (hits > 1 || near_edge) res.boundary_hits.push_back(j);
        res.window.symbols.push_back(chosen);
    }
    return res;
}

ConjugacyReport verify_conjugacy(const SystemModel& m, const Partition& p,
                                 const TransitionMatrix& A, int samples, long long N,
                                 std::uint64_t seed, int jobs) {
    if (samples < 1) throw error("domain_error", "need at least one sample");

    // windows are drawn sequentially so results do not depend on jobs
    std::mt19937_64 eng(seed);
    std::vector<std::vector<int>> words(static_cast<std::size_t>(samples));
    for (auto& word : words) {
        word.resize(static_cast<std::size_t>(2 * N + 2));
        int s = static_cast<int>(eng() % static_cast<std::uint64_t>(A.m));
        word[0] = s;
        for (std::size_t i = 1; i < word.size(); ++i) {
            std::vector<int> nexts;
            for (int t = 0; t < A.m; ++t)
                if (A.at(word[i - 1], t)) nexts.push_back(t);
            if (nexts.empty()) throw error("domain_error", "matrix has a dead-end row");
            word[i] = nexts[static_cast<std::size_t>(eng() % nexts.size())];
        }
    }

    ConjugacyReport rep;
    rep.samples = samples;
    DecodeResult probe = decode(m, p, SymbolWindow{words[0], -N, false}, N);
    rep.tolerance = 2.0 * probe.accuracy;

    std::vector<double> defects(static_cast<std::size_t>(samples), 0.0);
    auto work = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            const auto& word = words[static_cast<std::size_t>(i)];
            SymbolWindow w0{std::vector<int>(word.begin(), word.end() - 1), -N, false};
            SymbolWindow w1{std::vector<int>(word.begin() + 1, word.end()), -N, false};
            Point2 a = forward(m, decode(m, p, w0, N).point);
            Point2 b = decode(m, p, w1, N).point;
            defects[static_cast<std::size_t>(i)] = distance(a, b);
        }
    };

    int nthreads = std::max(1, jobs);
    if (nthreads == 1) {
        work(0, samples);
    } else {
        std::vector<std::thread> pool;
        int chunk = (samples + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            int lo = t * chunk, hi = std::min(samples, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    for (double d : defects) {
        rep.worst_defect = std::max(rep.worst_defect, d);
        if (d <= rep.tolerance) ++rep.passed;
    }
    return rep;
}

std::vector<double> periodic_symbol_frequency(const TransitionMatrix& A, int n, long long budget) {
    if (n < 1) throw error("domain_error", "period must be positive");
    std::vector<long long> counts(static_cast<std::size_t>(A.m), 0);
    long long words = 0;
    bool complete = brute_enumerate(A, n, budget, [&](const std::vector<int>& w) {
        ++words;
        for (int s : w) ++counts[static_cast<std::size_t>(s)];
    });
    if (!complete) throw error("cap_exceeded", "cyclic-word enumeration exceeds the budget");
    std::vector<double> freq(static_cast<std::size_t>(A.m), 0.0);
    if (words == 0) return freq;
    const double total = static_cast<double>(words) * n;
    for (std::size_t i = 0; i < freq.size(); ++i)
        freq[i] = static_cast<double>(counts[i]) / total;
    return freq;
}

} // namespace hyp
