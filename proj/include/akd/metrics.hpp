#pragma once

#include <cstdint>
#include <vector>

#include "akd/numerics.hpp"
#include "akd/selection.hpp"
#include "akd/teacher.hpp"

namespace akd {

struct ClusterReport {
    int k = 0;
    std::vector<Vec> centroids;
    std::vector<int> assignments;  // per input point
    double inertia = 0.0;          // sum of squared distances to assigned centroid
    int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Runs to an assignment fixpoint or
// max_iters; an emptied cluster is reseeded from the point farthest from its
// centroid. k must not exceed the number of distinct points.
ClusterReport kmeans(const std::vector<Vec>& points, int k, std::uint64_t seed, int max_iters);

std::size_t distinct_point_count(const std::vector<Vec>& points);

// sum over clusters of the majority-label count, divided by N
double cluster_purity(const std::vector<int>& assignments, const std::vector<int>& labels);

struct KnnLossReport {
    double mean_distance = 0.0;        // mean ||f_r(x) - mu_hat(x)||_2
    double within_threshold = 0.0;     // fraction with distance <= epsilon
    int active_centers = 0;            // distinct (cluster, class) targets hit
};

// For each id: its teacher prediction's centroid assignment k gives the
// propagated target lambda*y(x) + (1-lambda)*mu_k; reports the mean L2
// distance of the student prediction to that target.
KnnLossReport knn_loss_report(const std::vector<ProbVector>& student_preds,
                              const std::vector<ProbVector>& teacher_preds,
                              const std::vector<int>& labels, const std::vector<int>& ids,
                              const std::vector<Vec>& centroids,
                              const std::vector<int>& assignments, double lambda,
                              double epsilon, int class_count);

double knn_loss(const std::vector<ProbVector>& student_preds,
                const std::vector<ProbVector>& teacher_preds, const std::vector<int>& labels,
                const std::vector<int>& ids, const std::vector<Vec>& centroids,
                const std::vector<int>& assignments, double lambda, double epsilon,
                int class_count);

struct CriteriaBundle {
    double uncertainty = 0.0;        // mean normalized entropy of chosen predictions
    double class_balance = 0.0;      // normalized entropy of chosen label histogram
    double feature_diversity = 0.0;  // mean min distance to labeled set / diameter
    double prob_diversity = 0.0;     // same in probability space / sqrt(2)
};

// Max pairwise feature distance over a seeded subsample of at most
// max_points; the normalization constant for feature_diversity.
double feature_diameter(const std::vector<Vec>& features, std::uint64_t seed,
                        int max_points = 2000);

// All distances are measured against the pre-selection labeled set.
CriteriaBundle criteria_bundle(const SelectionResult& result, const SelectionInput& input,
                               double feature_diam);

struct CoverageReport {
    double fraction_inside = 0.0;
    double max_violation = 0.0;  // largest distance beyond the nearest radius, 0 if none
    int active_centers = 0;      // centers that are nearest to at least one prediction
};

// Membership of each prediction in the union of propagated balls. The
// epsilon inside `propagated` is an L1 bound while balls are L2; since
// ||.||_2 <= ||.||_1 the radius (1-lambda)r + epsilon remains valid.
CoverageReport bias_coverage_check(const std::vector<ProbVector>& student_preds,
                                   const PropagatedBias& propagated);

}  // namespace akd
