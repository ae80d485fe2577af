#pragma once

#include <cstdint>
#include <string>

#include "hyp/model.hpp"

namespace hyp {

// Closed-form constants. Each function checks its domain and throws
// domain_error outside it. Integer outputs derived from log ratios are
// guarded by a 1e-12 relative slack so exact powers do not round up.

// K = c / (1 - lambda/mu); mu = 1 admitted as the degenerate target.
double adapted_metric_constant(double c, double lambda, double mu);

// arcsin(1/K)
double angle_lower_bound(double K);

// alpha = beta log(1/lambda) / (log L + beta log(1/lambda))
double holder_exponent_stable(double beta, double lambda, double L);
double holder_exponent_unstable(double beta, double lambda, double L_inv);

// eps0 = (1 - lambda)^2 / (4 C0); C0 below the clamp floor is clamped.
inline constexpr double C0_CLAMP_FLOOR = 1e-3;
double manifold_size(double lambda, double C0);

// theta = lambda / (1 - lambda C1 delta (K+1)); requires the smallness
// condition lambda C1 delta (K+1) < 1 - lambda, else smallness_violation.
double graph_contraction_rate(double lambda, double C1, double delta, double K);

// alpha = (1 - lambda) beta / C
double shadowing_tolerance(double C, double lambda, double beta);

// N = ceil( log(eps/delta)/log(1/lambda) + C )
long long expansiveness_horizon(double eps, double delta, double lambda, double C);

// smallest N >= 0 with C lambda^N diam <= target
long long coding_truncation_depth(double C, double lambda, double diam, double target);

struct GridResolution {
    long long k = 1;
    long long count = 2;
    bool clamped = false; // raw k was below 1
};

// Horseshoe-specific: smallest k >= 1 with 3^-k <= 4 delta / 9; count 2^k.
GridResolution grid_resolution_for_accuracy(double delta);

struct ReportTargets {
    double delta_coding = 1e-6;   // coding accuracy target
    double eps_expansive = 0.0;   // 0 = use delta0
    double delta_expansive = 0.0; // 0 = use delta_coding
    double C_expansive = 0.0;
    double C_shadow = 1.5;  // shadowing constant, ledger input
    double C_coding = 0.0;  // 0 = use 1/(1-lambda)
    double diam_base = 1.0; // base partition diameter
    double delta_chart = 0.0; // 0 = use delta0
};

struct ConstantsReport {
    // inputs
    std::string model_name;
    HyperbolicityData data;
    ReportTargets targets;
    // derived
    double K_adapted = 0.0;
    double angle_bound_rad = 0.0;
    double alpha_s = 0.0;
    double alpha_u = 0.0;
    double eps0 = 0.0;
    double theta = 0.0;
    double lambda_prime = 0.0; // (5 lambda + 3)/8, reported alongside theta
    double alpha_shadow = 0.0; // at beta = 1
    long long N_expansive = 0;
    long long N_coding = 0;
    long long k_grid = 0;
    long long rectangle_count = 0;
    // flags
    bool C0_clamped = false;
    bool k_grid_clamped = false;
    std::string mu_convention; // "degenerate mu=1" or "strict mu<1"
};

ConstantsReport build_report(const SystemModel& m, const ReportTargets& targets = {});

} // namespace hyp
