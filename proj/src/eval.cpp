#include <algorithm>
#include <cmath>

#include "vpd/eval.hpp"

namespace vpd {

double angular_error_deg(const Vec3& pred, const Vec3& gt) {
    return angular_distance(pred, gt) * (180.0 / 3.14159265358979323846);
}

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
    // Jonker-style O(n^3) shortest augmenting path formulation of the
    // Hungarian algorithm, 1-indexed internally.
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

std::vector<MatchEntry> match_bipartite(const std::vector<VanishingPoint>& preds,
                                        const std::vector<Vec3>& gts, TopK top_k) {
    int k;
    switch (top_k.rule) {
        case TopK::Rule::by_gt: k = static_cast<int>(gts.size()); break;
        case TopK::Rule::by_pred: k = static_cast<int>(preds.size()); break;
        default: k = top_k.k; break;
    }
    const int n_pred = std::min<int>(k, static_cast<int>(preds.size()));
    const int n_gt = static_cast<int>(gts.size());

    // Square padded cost matrix; dummy pairings cost 0, which leaves the
    // optimum over real pairings unchanged (every perfect matching uses the
    // same number of dummies).
    const int n = std::max(n_pred, n_gt);
    std::vector<MatchEntry> out;
    if (n == 0) return out;

    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n_pred; ++i)
        for (int j = 0; j < n_gt; ++j)
            cost[i][j] = angular_error_deg(preds[i].direction, gts[j]);

    std::vector<int> row_to_col = solve_assignment(cost);

    std::vector<char> gt_matched(n_gt, 0);
    for (int i = 0; i < n_pred; ++i) {
        int j = row_to_col[i];
        if (j >= 0 && j < n_gt) {
            out.push_back({i, j, cost[i][j]});
            gt_matched[j] = 1;
        }
    }
    for (int j = 0; j < n_gt; ++j)
        if (!gt_matched[j]) out.push_back({-1, j, kMiss});

    std::sort(out.begin(), out.end(),
              [](const MatchEntry& a, const MatchEntry& b) { return a.gt < b.gt; });
    return out;
}

std::vector<double> angle_accuracy(const std::vector<double>& errors_deg,
                                   const std::vector<double>& thresholds_deg, AccuracyMode mode) {
    if (errors_deg.empty()) throw InvalidArgument("angle_accuracy: empty error list");
    const double total = static_cast<double>(errors_deg.size());

    std::vector<double> out;
    out.reserve(thresholds_deg.size());
    for (double tau : thresholds_deg) {
        if (mode == AccuracyMode::fraction) {
            std::size_t hit = 0;
            for (double e : errors_deg)
                if (e <= tau) ++hit;
            out.push_back(static_cast<double>(hit) / total);
        } else {
            // Normalized area under the cumulative recall step function:
            // (1/tau) * sum over errors of max(0, tau - e) / total.
            double area = 0.0;
            for (double e : errors_deg)
                if (e < tau) area += tau - e;
            out.push_back(tau > 0.0 ? area / (tau * total) : 0.0);
        }
    }
    return out;
}

RecallCurve recall_auc(const std::vector<MatchEntry>& matched, std::size_t total_gts,
                       double tau_max_deg) {
    if (!(tau_max_deg > 0.0)) throw InvalidArgument("recall_auc: tau_max must be > 0");
    RecallCurve curve;
    const int steps = static_cast<int>(std::round(tau_max_deg / 0.1));
    std::vector<double> errors;
    for (const MatchEntry& m : matched)
        if (m.error_deg != kMiss) errors.push_back(m.error_deg);
    std::sort(errors.begin(), errors.end());

    double acc = 0.0;
    for (int i = 1; i <= steps; ++i) {
        double tau = 0.1 * i;
        std::size_t hit = static_cast<std::size_t>(
            std::upper_bound(errors.begin(), errors.end(), tau) - errors.begin());
        double recall = total_gts == 0 ? 0.0 : static_cast<double>(hit) / total_gts;
        curve.tau_deg.push_back(tau);
        curve.recall.push_back(recall);
        acc += recall;
    }
    curve.auc = steps > 0 ? acc / steps : 0.0;
    return curve;
}

}  // namespace vpd
