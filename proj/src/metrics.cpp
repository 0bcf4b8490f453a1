#include "akd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "akd/rng.hpp"

namespace akd {

namespace {

double dist2(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

std::size_t distinct_point_count(const std::vector<Vec>& points) {
    std::set<Vec> uniq(points.begin(), points.end());
    return uniq.size();
}

ClusterReport kmeans(const std::vector<Vec>& points, int k, std::uint64_t seed, int max_iters) {
    if (points.empty()) throw InvalidInputError("kmeans: no points");
    if (max_iters < 1) throw InvalidInputError("kmeans: max_iters must be >= 1");
    if (k < 1 || static_cast<std::size_t>(k) > distinct_point_count(points))
        throw InvalidInputError("kmeans: k must be in [1, number of distinct points]");
    const std::size_t n = points.size();

    // k-means++ seeding: first centroid uniform, the rest D^2-weighted
    Rng rng(seed);
    std::vector<Vec> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(points[rng.uniform_index(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec& c : centroids) best = std::min(best, dist2(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double r = rng.uniform01() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                pick = i;
                if (cum > r) break;
            }
            // a coinciding point has weight 0 and can only be hit at cum == r;
            // step forward to the next distinct one
            while (d2[pick] == 0.0 && pick + 1 < n) ++pick;
        } else {
            // all remaining mass at existing centroids; grab any distinct point
            for (std::size_t i = 0; i < n; ++i)
                if (d2[i] > 0.0) { pick = i; break; }
        }
        centroids.push_back(points[pick]);
    }

    ClusterReport report;
    report.k = k;
    report.assignments.assign(n, -1);
    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = dist2(points[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (report.assignments[i] != best) {
                report.assignments[i] = best;
                changed = true;
            }
            inertia += best_d;
        }
        // Lloyd steps never increase the objective
        if (inertia > prev_inertia + 1e-9)
            throw InvalidInputError("kmeans: inertia increased, internal error");
        prev_inertia = inertia;
        report.inertia = inertia;
        report.iterations = iter + 1;
        if (!changed && iter > 0) break;
        if (iter + 1 == max_iters) break;  // keep assignments consistent with centroids

        std::vector<Vec> sums(static_cast<std::size_t>(k), Vec(points[0].size(), 0.0));
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(report.assignments[i]);
            for (std::size_t j = 0; j < points[i].size(); ++j) sums[c][j] += points[i][j];
            ++counts[c];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) {
                // reseed an emptied cluster from the farthest point overall
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = dist2(
                        points[i],
                        centroids[static_cast<std::size_t>(report.assignments[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids[static_cast<std::size_t>(c)] = points[far];
                prev_inertia = std::numeric_limits<double>::infinity();
                continue;
            }
            for (std::size_t j = 0; j < sums[static_cast<std::size_t>(c)].size(); ++j)
                centroids[static_cast<std::size_t>(c)][j] =
                    sums[static_cast<std::size_t>(c)][j] /
                    static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
    }
    report.centroids = std::move(centroids);
    return report;
}

double cluster_purity(const std::vector<int>& assignments, const std::vector<int>& labels) {
    if (assignments.size() != labels.size())
        throw InvalidInputError("cluster_purity: length mismatch");
    if (assignments.empty()) throw InvalidInputError("cluster_purity: empty input");
    std::map<std::pair<int, int>, int> counts;  // (cluster, label) -> count
    std::map<int, int> majority;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const int c = ++counts[{assignments[i], labels[i]}];
        auto& m = majority[assignments[i]];
        m = std::max(m, c);
    }
    int total = 0;
    for (const auto& [cluster, count] : majority) total += count;
    return static_cast<double>(total) / static_cast<double>(assignments.size());
}

KnnLossReport knn_loss_report(const std::vector<ProbVector>& student_preds,
                              const std::vector<ProbVector>& teacher_preds,
                              const std::vector<int>& labels, const std::vector<int>& ids,
                              const std::vector<Vec>& centroids,
                              const std::vector<int>& assignments, double lambda,
                              double epsilon, int class_count) {
    if (ids.empty()) throw InvalidInputError("knn_loss: no ids");
    if (assignments.size() != ids.size())
        throw ProtocolError("knn_loss: one assignment per id required");
    (void)teacher_preds;  // assignments were computed from them by the caller

    KnnLossReport report;
    std::set<std::pair<int, int>> active;  // (cluster, class)
    double sum = 0.0;
    int within = 0;
    Vec target(static_cast<std::size_t>(class_count));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int id = ids[i];
        const int k = assignments[i];
        if (k < 0 || static_cast<std::size_t>(k) >= centroids.size())
            throw ProtocolError("knn_loss: missing centroid assignment for id " +
                                std::to_string(id));
        const Vec& mu = centroids[static_cast<std::size_t>(k)];
        const int y = labels[static_cast<std::size_t>(id)];
        for (std::size_t j = 0; j < target.size(); ++j) target[j] = (1.0 - lambda) * mu[j];
        target[static_cast<std::size_t>(y)] += lambda;
        const double d = l2_distance(student_preds[static_cast<std::size_t>(id)].values(), target);
        sum += d;
        if (d <= epsilon) ++within;
        active.insert({k, y});
    }
    report.mean_distance = sum / static_cast<double>(ids.size());
    report.within_threshold = static_cast<double>(within) / static_cast<double>(ids.size());
    report.active_centers = static_cast<int>(active.size());
    return report;
}

double knn_loss(const std::vector<ProbVector>& student_preds,
                const std::vector<ProbVector>& teacher_preds, const std::vector<int>& labels,
                const std::vector<int>& ids, const std::vector<Vec>& centroids,
                const std::vector<int>& assignments, double lambda, double epsilon,
                int class_count) {
    return knn_loss_report(student_preds, teacher_preds, labels, ids, centroids, assignments,
                           lambda, epsilon, class_count)
        .mean_distance;
}

double feature_diameter(const std::vector<Vec>& features, std::uint64_t seed, int max_points) {
    if (features.empty()) throw InvalidInputError("feature_diameter: no features");
    std::vector<int> ids(features.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    if (static_cast<int>(ids.size()) > max_points) {
        Rng rng(substream_seed(seed, Stream::Metrics));
        ids = rng.sample_without_replacement(ids, static_cast<std::size_t>(max_points));
    }
    double best = 0.0;
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b)
            best = std::max(best, dist2(features[static_cast<std::size_t>(ids[a])],
                                        features[static_cast<std::size_t>(ids[b])]));
    return std::sqrt(best);
}

CriteriaBundle criteria_bundle(const SelectionResult& result, const SelectionInput& input,
                               double feature_diam) {
    if (result.chosen_ids.empty()) throw InvalidInputError("criteria_bundle: empty selection");
    if (input.pool->labeled_ids.empty())
        throw InvalidInputError("criteria_bundle: needs a non-empty pre-selection labeled set");
    const int c_count = input.pool->class_count;
    const double q = static_cast<double>(result.chosen_ids.size());

    CriteriaBundle bundle;
    for (int id : result.chosen_ids)
        bundle.uncertainty +=
            shannon_entropy((*input.probs)[static_cast<std::size_t>(id)], true);
    bundle.uncertainty /= q;

    Vec histogram(static_cast<std::size_t>(c_count), 0.0);
    for (int id : result.chosen_ids)
        histogram[static_cast<std::size_t>(input.dataset->label_of(id))] += 1.0 / q;
    bundle.class_balance = shannon_entropy(ProbVector(histogram), true);

    const double sqrt2 = std::sqrt(2.0);
    for (int id : result.chosen_ids) {
        double min_f = std::numeric_limits<double>::infinity();
        double min_p = std::numeric_limits<double>::infinity();
        for (int lid : input.pool->labeled_ids) {
            min_f = std::min(min_f, l2_distance((*input.features)[static_cast<std::size_t>(id)],
                                                (*input.features)[static_cast<std::size_t>(lid)]));
            min_p = std::min(min_p, l2_distance((*input.probs)[static_cast<std::size_t>(id)],
                                                (*input.probs)[static_cast<std::size_t>(lid)]));
        }
        bundle.feature_diversity += min_f;
        bundle.prob_diversity += min_p;
    }
    bundle.feature_diversity /= q * std::max(feature_diam, 1e-12);
    bundle.prob_diversity /= q * sqrt2;
    // a subsampled diameter can undershoot the true one
    bundle.feature_diversity = std::min(bundle.feature_diversity, 1.0);
    return bundle;
}

CoverageReport bias_coverage_check(const std::vector<ProbVector>& student_preds,
                                   const PropagatedBias& propagated) {
    CoverageReport report;
    if (student_preds.empty()) return report;
    std::set<int> active;
    int inside = 0;
    for (const ProbVector& p : student_preds) {
        const BiasMembership m = bias_membership(p, propagated);
        active.insert(m.nearest_center);
        if (m.member) {
            ++inside;
        } else {
            double violation = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < propagated.centers.size(); ++i)
                violation = std::min(
                    violation, l2_distance(p, propagated.centers[i]) - propagated.radii[i]);
            report.max_violation = std::max(report.max_violation, violation);
        }
    }
    report.fraction_inside =
        static_cast<double>(inside) / static_cast<double>(student_preds.size());
    report.active_centers = static_cast<int>(active.size());
    return report;
}

}  // namespace akd
