#include "socnav/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socnav/error.hpp"

namespace socnav {

double hausdorff(const GlobalPlan& a, const GlobalPlan& b) {
    if (a.points.size() < 2 || b.points.size() < 2) throw DataError("degenerate plan");
    // Squared distances throughout, one sqrt at the end.
    auto d2 = [](Vec2 p, Vec2 q) {
        const double dx = p.x - q.x, dy = p.y - q.y;
        return dx * dx + dy * dy;
    };
    double worst = 0.0;
    for (const auto& p : a.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b.points) best = std::min(best, d2(p, q));
        worst = std::max(worst, best);
    }
    for (const auto& q : b.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : a.points) best = std::min(best, d2(p, q));
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

double l2_command(const Command& a, const Command& b) {
    return std::hypot(a.v - b.v, a.omega - b.omega);
}

double per_step_distance(const GlobalPlan& plan_a, const GlobalPlan& plan_b,
                         const Command& cmd_a, const Command& cmd_b,
                         BehaviorLevel level) {
    if (level == BehaviorLevel::global) return hausdorff(plan_a, plan_b);
    return l2_command(cmd_a, cmd_b);
}

double alpha(const std::vector<ComplianceRecord>& records, double eps) {
    if (records.empty()) throw DataError("alpha: no records");
    size_t n = 0;
    for (const auto& r : records)
        if (r.d_global <= eps) ++n;
    return double(n) / double(records.size());
}

double alpha_of(const std::vector<double>& ds, double eps) {
    if (ds.empty()) throw DataError("alpha: no records");
    size_t n = 0;
    for (double d : ds)
        if (d <= eps) ++n;
    return double(n) / double(ds.size());
}

CdfCurve cdf(const std::vector<double>& ds, const std::vector<double>& thresholds) {
    for (size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] < thresholds[i - 1]) throw DataError("cdf: thresholds not ascending");
    CdfCurve curve;
    curve.thresholds = thresholds;
    curve.fractions.reserve(thresholds.size());
    for (double t : thresholds) {
        size_t n = 0;
        for (double d : ds)
            if (d <= t) ++n;
        curve.fractions.push_back(ds.empty() ? 0.0 : double(n) / double(ds.size()));
    }
    return curve;
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz.
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DataError("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, int df1, int df2) {
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double x = double(df2) / (double(df2) + double(df1) * f);
    return incomplete_beta(df2 / 2.0, df1 / 2.0, x);
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DataError("one_way_anova: need >= 2 groups");
    size_t total_n = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw DataError("one_way_anova: each group needs >= 2 samples");
        total_n += g.size();
    }

    double grand_sum = 0.0;
    for (const auto& g : groups)
        for (double v : g) grand_sum += v;
    const double grand_mean = grand_sum / double(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= double(g.size());
        ss_between += double(g.size()) * (mean - grand_mean) * (mean - grand_mean);
        for (double v : g) ss_within += (v - mean) * (v - mean);
    }

    AnovaResult r;
    r.df_between = int(groups.size()) - 1;
    r.df_within = int(total_n) - int(groups.size());
    const double ms_between = ss_between / r.df_between;
    if (ss_within == 0.0) {
        if (ss_between == 0.0) {
            r.f = 0.0;
            r.p = 1.0;
        } else {
            r.f = std::numeric_limits<double>::infinity();
            r.p = 0.0;
        }
        return r;
    }
    const double ms_within = ss_within / r.df_within;
    r.f = ms_between / ms_within;
    r.p = f_distribution_sf(r.f, r.df_between, r.df_within);
    return r;
}

} // namespace socnav
