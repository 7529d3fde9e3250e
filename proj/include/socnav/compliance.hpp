#pragma once

#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

// One evaluated timestep: how far a planner's behavior is from the
// demonstrated behavior, at the global (plan) and local (command) level.
struct ComplianceRecord {
    int step = 0;
    double d_global = 0.0; // undirected Hausdorff between plans, meters
    double d_local = 0.0;  // L2 between commands
    bool compliant = false; // d_global <= eps at the configured eps
};

struct CdfCurve {
    std::vector<double> thresholds; // ascending
    std::vector<double> fractions;  // non-decreasing, in [0, 1]
};

// Undirected Hausdorff distance between two plans, exact O(n*m) over the
// given points. Plans are expected pre-resampled to a common resolution.
// Throws DataError("degenerate plan") when either has < 2 points.
double hausdorff(const GlobalPlan& a, const GlobalPlan& b);

double l2_command(const Command& a, const Command& b);

enum class BehaviorLevel { global, local };

// Dispatches to hausdorff (global) or l2_command (local).
double per_step_distance(const GlobalPlan& plan_a, const GlobalPlan& plan_b,
                         const Command& cmd_a, const Command& cmd_b,
                         BehaviorLevel level);

// Fraction of records with d_global <= eps. Throws DataError on empty input.
double alpha(const std::vector<ComplianceRecord>& records, double eps);
double alpha_of(const std::vector<double>& ds, double eps);

CdfCurve cdf(const std::vector<double>& ds, const std::vector<double>& thresholds);

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    int df_between = 0;
    int df_within = 0;
};

// One-way ANOVA over >= 2 groups of >= 2 scores each. p-value from the
// F-distribution via the regularized incomplete beta function.
// Zero within-group variance with unequal means gives F = +inf, p = 0.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// absolute tolerance ~1e-14. Exposed for reuse and direct testing.
double incomplete_beta(double a, double b, double x);

// Upper tail of the F distribution, P(F_{d1,d2} > f).
double f_distribution_sf(double f, int df1, int df2);

} // namespace socnav
