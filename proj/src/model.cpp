#include "hyp/model.hpp"

#include <cmath>
#include <cstdlib>

namespace hyp {

namespace {

constexpr double DOMAIN_SLACK = 1e-12;

// Branch membership for the horseshoe domain strips H_0, H_1 (forward map)
// and image strips V_0, V_1 (inverse map). -1 = outside.
int h_branch(double y) {
    if (y >= -DOMAIN_SLACK && y <= 1.0 / 3.0 + DOMAIN_SLACK) return 0;
    if (y >= 2.0 / 3.0 - DOMAIN_SLACK && y <= 1.0 + DOMAIN_SLACK) return 1;
    return -1;
}

int v_branch(double x) {
    if (x >= -DOMAIN_SLACK && x <= 1.0 / 3.0 + DOMAIN_SLACK) return 0;
    if (x >= 2.0 / 3.0 - DOMAIN_SLACK && x <= 1.0 + DOMAIN_SLACK) return 1;
    return -1;
}

void check_unit_range(double v, const char* what) {
    if (v < -DOMAIN_SLACK || v > 1.0 + DOMAIN_SLACK)
        throw error("domain_error", std::string(what) + " outside [0,1]");
}

Point2 horseshoe_forward(const Point2& p) {
    check_unit_range(p.x, "x");
    int b = h_branch(p.y);
    if (b < 0) throw error("domain_error", "y outside the branch strips");
    if (b == 0) return {p.x / 3.0, 3.0 * p.y, space_kind::plane};
    return {p.x / 3.0 + 2.0 / 3.0, 3.0 * p.y - 2.0, space_kind::plane};
}

Point2 horseshoe_inverse(const Point2& p) {
    check_unit_range(p.y, "y");
    int b = v_branch(p.x);
    if (b < 0) throw error("domain_error", "x outside the image strips");
    if (b == 0) return {3.0 * p.x, p.y / 3.0, space_kind::plane};
    return {3.0 * p.x - 2.0, p.y / 3.0 + 2.0 / 3.0, space_kind::plane};
}

mat2 horseshoe_jacobian(const Point2& p) {
    if (h_branch(p.y) < 0) throw error("domain_error", "y outside the branch strips");
    return {1.0 / 3.0, 0.0, 0.0, 3.0};
}

mat2 horseshoe_inverse_jacobian(const Point2& p) {
    if (v_branch(p.x) < 0) throw error("domain_error", "x outside the image strips");
    return {3.0, 0.0, 0.0, 1.0 / 3.0};
}

std::array<long long, 4> integer_inverse(const std::array<long long, 4>& m) {
    long long d = m[0] * m[3] - m[1] * m[2];
    // |det| == 1 is validated at construction
    return {d * m[3], -d * m[1], -d * m[2], d * m[0]};
}

Point2 torus_apply(const std::array<long long, 4>& m, const Point2& p) {
    double nx = static_cast<double>(m[0]) * p.x + static_cast<double>(m[1]) * p.y;
    double ny = static_cast<double>(m[2]) * p.x + static_cast<double>(m[3]) * p.y;
    return {wrap_unit(nx), wrap_unit(ny), space_kind::torus};
}

struct grid_axes {
    double dx, dy;
};

grid_axes axes(const GridData& g) {
    return {(g.x1 - g.x0) / (g.nx - 1), (g.y1 - g.y0) / (g.ny - 1)};
}

double bilinear(const GridData& g, const std::vector<double>& f, double x, double y) {
    auto [dx, dy] = axes(g);
    double fx = (x - g.x0) / dx;
    double fy = (y - g.y0) / dy;
    if (fx < -1e-9 || fy < -1e-9 || fx > g.nx - 1 + 1e-9 || fy > g.ny - 1 + 1e-9)
        throw error("domain_error", "point outside the sampled grid");
    int i = std::min(static_cast<int>(fx), g.nx - 2);
    int j = std::min(static_cast<int>(fy), g.ny - 2);
    i = std::max(i, 0);
    j = std::max(j, 0);
    double tx = fx - i, ty = fy - j;
    auto at = [&](int ii, int jj) { return f[static_cast<std::size_t>(jj) * g.nx + ii]; };
    return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) +
           (1 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
}

Point2 grid_forward(const GridData& g, const Point2& p) {
    return {bilinear(g, g.fx, p.x, p.y), bilinear(g, g.fy, p.x, p.y), space_kind::plane};
}

Point2 grid_inverse(const GridData& g, const Point2& p) {
    if (g.gx.empty()) throw error("unsupported_model", "grid model has no inverse samples");
    return {bilinear(g, g.gx, p.x, p.y), bilinear(g, g.gy, p.x, p.y), space_kind::plane};
}

mat2 grid_jacobian(const GridData& g, const std::vector<double>& fx,
                   const std::vector<double>& fy, const Point2& p) {
    double h = g.fd_step;
    double dxx = (bilinear(g, fx, p.x + h, p.y) - bilinear(g, fx, p.x - h, p.y)) / (2 * h);
    double dxy = (bilinear(g, fx, p.x, p.y + h) - bilinear(g, fx, p.x, p.y - h)) / (2 * h);
    double dyx = (bilinear(g, fy, p.x + h, p.y) - bilinear(g, fy, p.x - h, p.y)) / (2 * h);
    double dyy = (bilinear(g, fy, p.x, p.y + h) - bilinear(g, fy, p.x, p.y - h)) / (2 * h);
    return {dxx, dxy, dyx, dyy};
}

Point2 apply_forward(const SystemModel& m, const Point2& p);
Point2 apply_inverse(const SystemModel& m, const Point2& p);

Point2 apply_forward(const SystemModel& m, const Point2& p) {
    switch (m.kind) {
    case model_kind::affine_horseshoe: return horseshoe_forward(p);
    case model_kind::cat_map: return torus_apply(m.mat, p);
    case model_kind::user_grid: return grid_forward(m.grid, p);
    }
    throw error("unsupported_model", "unknown model kind");
}

Point2 apply_inverse(const SystemModel& m, const Point2& p) {
    switch (m.kind) {
    case model_kind::affine_horseshoe: return horseshoe_inverse(p);
    case model_kind::cat_map: return torus_apply(integer_inverse(m.mat), p);
    case model_kind::user_grid: return grid_inverse(m.grid, p);
    }
    throw error("unsupported_model", "unknown model kind");
}

mat2 apply_jacobian(const SystemModel& m, const Point2& p) {
    switch (m.kind) {
    case model_kind::affine_horseshoe: return horseshoe_jacobian(p);
    case model_kind::cat_map:
        return {static_cast<double>(m.mat[0]), static_cast<double>(m.mat[1]),
                static_cast<double>(m.mat[2]), static_cast<double>(m.mat[3])};
    case model_kind::user_grid: return grid_jacobian(m.grid, m.grid.fx, m.grid.fy, p);
    }
    throw error("unsupported_model", "unknown model kind");
}

mat2 apply_inverse_jacobian(const SystemModel& m, const Point2& p) {
    switch (m.kind) {
    case model_kind::affine_horseshoe: return horseshoe_inverse_jacobian(p);
    case model_kind::cat_map: {
        auto im = integer_inverse(m.mat);
        return {static_cast<double>(im[0]), static_cast<double>(im[1]),
                static_cast<double>(im[2]), static_cast<double>(im[3])};
    }
    case model_kind::user_grid: {
        if (m.grid.gx.empty())
            return inverse(grid_jacobian(m.grid, m.grid.fx, m.grid.fy, p));
        return grid_jacobian(m.grid, m.grid.gx, m.grid.gy, p);
    }
    }
    throw error("unsupported_model", "unknown model kind");
}

} // namespace

SystemModel make_horseshoe() {
    SystemModel m;
    m.kind = model_kind::affine_horseshoe;
    m.data.lambda = 1.0 / 3.0;
    m.data.c = 1.0;
    m.data.mu_adapt = 1.0;
    m.data.C0 = 0.0;
    m.data.C1 = 0.0;
    m.data.K_lip = 0.5;
    m.data.L = 3.0;
    m.data.L_inv = 3.0;
    m.data.beta_holder = 1.0;
    m.data.delta0 = 1.0 / 3.0;
    return m;
}

SystemModel make_cat_map() { return make_cat_map({2, 1, 1, 1}); }

SystemModel make_cat_map(const std::array<long long, 4>& mat) {
    long long d = mat[0] * mat[3] - mat[1] * mat[2];
    if (d != 1 && d != -1)
        throw error("validation_error", "torus matrix must have determinant +-1");
    double t = static_cast<double>(mat[0] + mat[3]);
    double disc = t * t - 4.0 * static_cast<double>(d);
    if (disc <= 0.0) throw error("validation_error", "torus matrix is not hyperbolic");
    double root = std::sqrt(disc);
    double l1 = std::abs((t + root) / 2.0);
    double l2 = std::abs((t - root) / 2.0);
    double big = std::max(l1, l2);
    double small = std::min(l1, l2);
    if (big <= 1.0 + 1e-12)
        throw error("validation_error", "torus matrix is not hyperbolic");
    SystemModel m;
    m.kind = model_kind::cat_map;
    m.mat = mat;
    m.data.lambda = small;
    m.data.c = 1.0;
    m.data.mu_adapt = 1.0;
    m.data.C0 = 0.0;
    m.data.C1 = 0.0;
    m.data.K_lip = 0.5;
    m.data.L = big;
    m.data.L_inv = big;
    m.data.beta_holder = 1.0;
    m.data.delta0 = 0.2;
    return m;
}

SystemModel make_user_grid(GridData grid, HyperbolicityData data) {
    if (grid.nx < 2 || grid.ny < 2 ||
        grid.fx.size() != static_cast<std::size_t>(grid.nx) * grid.ny ||
        grid.fy.size() != grid.fx.size())
        throw error("validation_error", "grid samples do not match the declared shape");
    SystemModel m;
    m.kind = model_kind::user_grid;
    m.grid = std::move(grid);
    m.data = data;
    return m;
}

SystemModel inverse_view(const SystemModel& m) {
    SystemModel r = m;
    r.inverted = !m.inverted;
    std::swap(r.data.L, r.data.L_inv);
    return r;
}

Point2 forward(const SystemModel& m, const Point2& p) {
    return m.inverted ? apply_inverse(m, p) : apply_forward(m, p);
}

Point2 inverse(const SystemModel& m, const Point2& p) {
    return m.inverted ? apply_forward(m, p) : apply_inverse(m, p);
}

Point2 iterate(const SystemModel& m, Point2 p, long long n) {
    for (long long i = 0; i < n; ++i) p = forward(m, p);
    for (long long i = 0; i > n; --i) p = inverse(m, p);
    return p;
}

mat2 jacobian(const SystemModel& m, const Point2& p) {
    return m.inverted ? apply_inverse_jacobian(m, p) : apply_jacobian(m, p);
}

mat2 jacobian_inverse_map(const SystemModel& m, const Point2& p) {
    return m.inverted ? apply_jacobian(m, p) : apply_inverse_jacobian(m, p);
}

namespace {

// Fattened branch domains: gap split at its midline, half a unit of slack
// outward. Orbits through the gap extension are not model dynamics; the
// engines only evaluate here within O(delta0) of the invariant set.
int h_branch_wide(double y) {
    if (y >= -0.5 && y < 0.5) return 0;
    if (y >= 0.5 && y <= 1.5) return 1;
    return -1;
}

Point2 horseshoe_forward_wide(const Point2& p) {
    if (p.x < -0.5 || p.x > 1.5) throw error("domain_error", "x outside the fattened domain");
    int b = h_branch_wide(p.y);
    if (b < 0) throw error("domain_error", "y outside the fattened domain");
    if (b == 0) return {p.x / 3.0, 3.0 * p.y, space_kind::plane};
    return {p.x / 3.0 + 2.0 / 3.0, 3.0 * p.y - 2.0, space_kind::plane};
}

Point2 horseshoe_inverse_wide(const Point2& p) {
    if (p.y < -0.5 || p.y > 1.5) throw error("domain_error", "y outside the fattened domain");
    int b = h_branch_wide(p.x);
    if (b < 0) throw error("domain_error", "x outside the fattened domain");
    if (b == 0) return {3.0 * p.x, p.y / 3.0, space_kind::plane};
    return {3.0 * p.x - 2.0, p.y / 3.0 + 2.0 / 3.0, space_kind::plane};
}

} // namespace

Point2 forward_nbhd(const SystemModel& m, const Point2& p) {
    if (m.kind == model_kind::affine_horseshoe)
        return m.inverted ? horseshoe_inverse_wide(p) : horseshoe_forward_wide(p);
    return forward(m, p);
}

Point2 inverse_nbhd(const SystemModel& m, const Point2& p) {
    if (m.kind == model_kind::affine_horseshoe)
        return m.inverted ? horseshoe_forward_wide(p) : horseshoe_inverse_wide(p);
    return inverse(m, p);
}

mat2 jacobian_nbhd(const SystemModel& m, const Point2& p) {
    if (m.kind == model_kind::affine_horseshoe)
        return m.inverted ? mat2{3.0, 0.0, 0.0, 1.0 / 3.0} : mat2{1.0 / 3.0, 0.0, 0.0, 3.0};
    return jacobian(m, p);
}

mat2 jacobian_inverse_nbhd(const SystemModel& m, const Point2& p) {
    if (m.kind == model_kind::affine_horseshoe)
        return m.inverted ? mat2{1.0 / 3.0, 0.0, 0.0, 3.0} : mat2{3.0, 0.0, 0.0, 1.0 / 3.0};
    return jacobian_inverse_map(m, p);
}

} // namespace hyp
