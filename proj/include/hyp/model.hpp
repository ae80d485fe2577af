#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hyp/geometry.hpp"

namespace hyp {

// Per-system hyperbolicity ledger. Every quantitative routine reads its
// constants from here; nothing re-derives them from the map.
struct HyperbolicityData {
    double lambda = 0.5;      // contraction rate, in (0,1)
    double c = 1.0;           // adapted-metric seed constant, >= 1
    double mu_adapt = 1.0;    // adapted-metric target, in (lambda, 1]
    double C0 = 0.0;          // second-derivative bound (0 for affine/linear)
    double C1 = 0.0;          // Lipschitz-variation bound of the splitting
    double K_lip = 0.5;       // Lipschitz bound for invariant graphs
    double L = 2.0;           // Lipschitz constant of f
    double L_inv = 2.0;       // Lipschitz constant of f^{-1}
    double beta_holder = 1.0; // Hoelder exponent of the derivative data
    double delta0 = 0.1;      // local product structure scale
};

struct GridData {
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    std::vector<double> fx; // row-major nx*ny samples of the image x-coord
    std::vector<double> fy;
    std::vector<double> gx; // inverse map samples (same layout)
    std::vector<double> gy;
    double fd_step = 1e-6; // central-difference step for the Jacobian
};

enum class model_kind : std::uint8_t { affine_horseshoe, cat_map, user_grid };

struct SystemModel {
    model_kind kind = model_kind::affine_horseshoe;
    // Integer torus matrix, row-major; |det| must be 1.
    std::array<long long, 4> mat{2, 1, 1, 1};
    GridData grid;
    HyperbolicityData data;
    // When set, forward and inverse are exchanged (and the roles of the
    // stable and unstable data with them). Used to run the stable-manifold
    // engine on the inverse system.
    bool inverted = false;
};

SystemModel make_horseshoe();
SystemModel make_cat_map();
SystemModel make_cat_map(const std::array<long long, 4>& mat);
SystemModel make_user_grid(GridData grid, HyperbolicityData data);

// View of the same system with time reversed.
SystemModel inverse_view(const SystemModel& m);

Point2 forward(const SystemModel& m, const Point2& p);
Point2 inverse(const SystemModel& m, const Point2& p);
Point2 iterate(const SystemModel& m, Point2 p, long long n); // n may be negative
mat2 jacobian(const SystemModel& m, const Point2& p);
mat2 jacobian_inverse_map(const SystemModel& m, const Point2& p);

// Neighborhood extension used by the chart-based engines. The horseshoe map
// is defined on the branch strips, but charts and graph transforms work on a
// neighborhood of the invariant set, so each affine branch formula is
// continued to the fattened strip nearest the query point (split mid-gap).
// Identical to forward/inverse for the other models and on the strips.
Point2 forward_nbhd(const SystemModel& m, const Point2& p);
Point2 inverse_nbhd(const SystemModel& m, const Point2& p);
mat2 jacobian_nbhd(const SystemModel& m, const Point2& p);
mat2 jacobian_inverse_nbhd(const SystemModel& m, const Point2& p);

} // namespace hyp
