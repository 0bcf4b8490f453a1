#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "akd/metrics.hpp"
#include "akd/rng.hpp"
#include "akd/student.hpp"

using namespace akd;

namespace {

Vec random_simplex_point(Rng& rng, int dim) {
    Vec v(static_cast<std::size_t>(dim));
    double sum = 0.0;
    for (double& x : v) {
        x = -std::log(1.0 - rng.uniform01());
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

}  // namespace

TEST_CASE("kmeans with k equal to the point count") {
    const std::vector<Vec> points = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    const ClusterReport report = kmeans(points, 3, 5, 50);
    CHECK(report.inertia == doctest::Approx(0.0).epsilon(1e-15));
    std::set<int> assigned(report.assignments.begin(), report.assignments.end());
    CHECK(assigned.size() == 3);
}

TEST_CASE("kmeans recovers the means of two separated pairs") {
    const std::vector<Vec> points = {{0.0, 0.0}, {1.0, 0.0}, {10.0, 0.0}, {11.0, 0.0}};
    const ClusterReport report = kmeans(points, 2, 9, 100);
    std::vector<Vec> centroids = report.centroids;
    std::sort(centroids.begin(), centroids.end(),
              [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
    CHECK(centroids[0][0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(centroids[1][0] == doctest::Approx(10.5).epsilon(1e-12));
    CHECK(report.assignments[0] == report.assignments[1]);
    CHECK(report.assignments[2] == report.assignments[3]);
    CHECK(report.assignments[0] != report.assignments[2]);
}

TEST_CASE("kmeans is deterministic under a seed and validates k") {
    Rng rng(3);
    std::vector<Vec> points;
    for (int i = 0; i < 40; ++i) points.push_back({rng.normal(), rng.normal(), rng.normal()});
    const ClusterReport a = kmeans(points, 5, 42, 100);
    const ClusterReport b = kmeans(points, 5, 42, 100);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);

    const std::vector<Vec> dups = {{1.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}};
    CHECK(distinct_point_count(dups) == 2);
    CHECK_THROWS_AS(kmeans(dups, 3, 1, 10), InvalidInputError);
    CHECK_THROWS_AS(kmeans(points, 0, 1, 10), InvalidInputError);
    CHECK_THROWS_AS(kmeans(points, 5, 1, 0), InvalidInputError);
}

TEST_CASE("cluster purity") {
    // each cluster single-class
    CHECK(cluster_purity({0, 0, 1, 1}, {3, 3, 7, 7}) == doctest::Approx(1.0));
    // one cluster with a 3/1 label split
    CHECK(cluster_purity({0, 0, 0, 0}, {1, 1, 1, 2}) == doctest::Approx(0.75));
    // identical labels are pure under any clustering
    CHECK(cluster_purity({0, 1, 2, 1}, {5, 5, 5, 5}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cluster_purity({0, 1}, {0}), InvalidInputError);
}

TEST_CASE("purity is bounded below by the majority class frequency") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 10 + static_cast<int>(rng.uniform_index(30));
        std::vector<int> assignments(static_cast<std::size_t>(n)), labels(static_cast<std::size_t>(n));
        std::vector<int> counts(4, 0);
        for (int i = 0; i < n; ++i) {
            assignments[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(3));
            labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(4));
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        const double purity = cluster_purity(assignments, labels);
        const double majority =
            static_cast<double>(*std::max_element(counts.begin(), counts.end())) / n;
        CHECK(purity >= majority - 1e-12);
        CHECK(purity <= 1.0 + 1e-12);
    }
}

TEST_CASE("knn loss") {
    const int c_count = 3;
    const double lambda = 0.5;
    // zero-radius teacher structure: predictions sit exactly on two points
    const Vec mu0 = {0.7, 0.2, 0.1};
    const Vec mu1 = {0.1, 0.1, 0.8};
    const std::vector<int> labels = {0, 1, 2, 0};
    const std::vector<int> ids = {0, 1, 2, 3};
    std::vector<ProbVector> teacher_preds = {ProbVector{Vec(mu0)}, ProbVector{Vec(mu1)},
                                             ProbVector{Vec(mu0)}, ProbVector{Vec(mu1)}};
    std::vector<Vec> teacher_points;
    for (const ProbVector& p : teacher_preds) teacher_points.push_back(p.values());
    const ClusterReport clusters = kmeans(teacher_points, 2, 11, 50);

    SUBCASE("student placed exactly on the propagated targets scores zero") {
        std::vector<ProbVector> student_preds;
        for (std::size_t i = 0; i < teacher_preds.size(); ++i)
            student_preds.push_back(optimal_target(one_hot(labels[i], c_count),
                                                   teacher_preds[i], lambda));
        const KnnLossReport report =
            knn_loss_report(student_preds, teacher_preds, labels, ids, clusters.centroids,
                            clusters.assignments, lambda, 0.3, c_count);
        CHECK(report.mean_distance == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(report.within_threshold == doctest::Approx(1.0));
        CHECK(report.active_centers <= 2 * c_count);
    }

    SUBCASE("student equal to the teacher at lambda zero reduces to kmeans residuals") {
        // with lambda = 0 the propagated target is the assigned centroid itself
        const double mean = knn_loss(teacher_preds, teacher_preds, labels, ids,
                                     clusters.centroids, clusters.assignments, 0.0, 0.3, c_count);
        double expected = 0.0;
        for (std::size_t i = 0; i < teacher_points.size(); ++i)
            expected += l2_distance(
                teacher_points[i],
                clusters.centroids[static_cast<std::size_t>(clusters.assignments[i])]);
        expected /= static_cast<double>(teacher_points.size());
        CHECK(mean == doctest::Approx(expected).epsilon(1e-12));
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));  // zero-radius clusters
    }

    SUBCASE("a fixed-norm perturbation shifts the mean by exactly that norm") {
        const double delta = 0.05;
        std::vector<ProbVector> student_preds;
        for (std::size_t i = 0; i < teacher_preds.size(); ++i) {
            Vec v = optimal_target(one_hot(labels[i], c_count), teacher_preds[i], lambda).values();
            // tangent direction (1,-1,0)/sqrt(2) keeps the simplex sum
            v[0] += delta / std::sqrt(2.0);
            v[1] -= delta / std::sqrt(2.0);
            student_preds.emplace_back(std::move(v));
        }
        const double mean = knn_loss(student_preds, teacher_preds, labels, ids,
                                     clusters.centroids, clusters.assignments, lambda, 0.3,
                                     c_count);
        CHECK(mean == doctest::Approx(delta).epsilon(1e-12));
    }

    SUBCASE("missing assignment is a protocol error") {
        CHECK_THROWS_AS(knn_loss_report(teacher_preds, teacher_preds, labels, ids,
                                        clusters.centroids, {0, 1}, lambda, 0.3, c_count),
                        ProtocolError);
    }
}

TEST_CASE("criteria bundle") {
    // pool: ids 0,1 labeled; 2,3,4 unlabeled
    Dataset ds;
    ds.class_count = 2;
    ds.feature_dim = 2;
    for (int i = 0; i < 5; ++i) {
        Sample s;
        s.id = i;
        s.label = i % 2;
        s.features = {static_cast<double>(i), 0.0};
        ds.samples.push_back(std::move(s));
    }
    PoolState pool;
    pool.class_count = 2;
    pool.labeled_ids = {0, 1};
    pool.unlabeled_ids = {2, 3, 4};

    std::vector<ProbVector> probs = {ProbVector{{1.0, 0.0}}, ProbVector{{0.0, 1.0}},
                                     ProbVector{{1.0, 0.0}}, ProbVector{{0.0, 1.0}},
                                     ProbVector{{1.0, 0.0}}};
    std::vector<Vec> features;
    for (const Sample& s : ds.samples) features.push_back(s.features);

    SelectionInput input;
    input.pool = &pool;
    input.dataset = &ds;
    input.probs = &probs;
    input.features = &features;
    input.query_size = 2;

    const double diameter = feature_diameter(features, 0);
    CHECK(diameter == doctest::Approx(4.0).epsilon(1e-12));  // ids 0 and 4

    SUBCASE("one-hot predictions give zero uncertainty") {
        SelectionResult sel;
        sel.chosen_ids = {2, 3};
        const CriteriaBundle bundle = criteria_bundle(sel, input, diameter);
        CHECK(bundle.uncertainty == doctest::Approx(0.0).epsilon(1e-12));
        // labels of 2,3 are {0,1}: perfectly balanced
        CHECK(bundle.class_balance == doctest::Approx(1.0).epsilon(1e-12));
        // prob vectors of 2,3 coincide with labeled ones: zero diversity
        CHECK(bundle.prob_diversity == doctest::Approx(0.0).epsilon(1e-12));
        // feature distances: id2 -> nearest labeled (1,0) at distance 1;
        // id3 -> distance 2; mean 1.5, normalized by 4
        CHECK(bundle.feature_diversity == doctest::Approx(1.5 / 4.0).epsilon(1e-12));
    }

    SUBCASE("single-class selection has zero class balance") {
        SelectionResult sel;
        sel.chosen_ids = {2, 4};  // labels 0 and 0
        const CriteriaBundle bundle = criteria_bundle(sel, input, diameter);
        CHECK(bundle.class_balance == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("uniform predictions give unit uncertainty") {
        for (auto& p : probs) p = ProbVector{{0.5, 0.5}};
        SelectionResult sel;
        sel.chosen_ids = {2, 3};
        const CriteriaBundle bundle = criteria_bundle(sel, input, diameter);
        CHECK(bundle.uncertainty == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("empty selection is rejected") {
        SelectionResult sel;
        CHECK_THROWS_AS(criteria_bundle(sel, input, diameter), InvalidInputError);
    }
}

TEST_CASE("pcoreset beats its reverse on probability diversity at q = 1") {
    Rng rng(501);
    for (int trial = 0; trial < 30; ++trial) {
        const int c_count = 3;
        const int n = 8;
        Dataset ds;
        ds.class_count = c_count;
        ds.feature_dim = 2;
        std::vector<ProbVector> probs;
        std::vector<Vec> features;
        for (int i = 0; i < n; ++i) {
            Sample s;
            s.id = i;
            s.label = static_cast<int>(rng.uniform_index(c_count));
            s.features = {rng.normal(), rng.normal()};
            features.push_back(s.features);
            ds.samples.push_back(std::move(s));
            probs.emplace_back(random_simplex_point(rng, c_count));
        }
        PoolState pool;
        pool.class_count = c_count;
        pool.labeled_ids = {0, 1};
        for (int i = 2; i < n; ++i) pool.unlabeled_ids.push_back(i);

        SelectionInput input;
        input.pool = &pool;
        input.dataset = &ds;
        input.probs = &probs;
        input.features = &features;
        input.query_size = 1;

        const double diameter = feature_diameter(features, 0);
        const CriteriaBundle fwd = criteria_bundle(select_pcoreset(input), input, diameter);
        const CriteriaBundle rev =
            criteria_bundle(select_pcoreset_reverse(input), input, diameter);
        CHECK(fwd.prob_diversity >= rev.prob_diversity - 1e-12);
    }
}

TEST_CASE("bias coverage check") {
    Rng rng(888);
    BiasStructure bias;
    const int c_count = 4;
    for (int k = 0; k < 3; ++k) {
        bias.centroids.emplace_back(random_simplex_point(rng, c_count));
        bias.radii.push_back(0.05 + 0.1 * rng.uniform01());
    }
    SyntheticBiasedTeacher teacher;
    teacher.bias = bias;
    teacher.class_count = c_count;
    teacher.seed = 31337;
    for (int c = 0; c < c_count; ++c) teacher.class_to_cluster.push_back(c % 3);
    const double lambda = 0.5;

    std::vector<int> labels;
    std::vector<ProbVector> teacher_preds, exact_students;
    for (int i = 0; i < 60; ++i) {
        Sample s;
        s.id = i;
        s.label = static_cast<int>(rng.uniform_index(c_count));
        s.features = {0.0, 0.0};
        labels.push_back(s.label);
        teacher_preds.push_back(teacher.predict(s));
        exact_students.push_back(
            optimal_target(one_hot(s.label, c_count), teacher_preds.back(), lambda));
    }

    SUBCASE("exact optimal students are fully covered with epsilon zero") {
        const PropagatedBias propagated = propagate_bias(bias, lambda, 0.0, c_count);
        const CoverageReport report = bias_coverage_check(exact_students, propagated);
        CHECK(report.fraction_inside == 1.0);
        CHECK(report.max_violation == 0.0);
        CHECK(report.active_centers <= 3 * c_count);
    }

    SUBCASE("zero radius with nonzero noise is detected") {
        BiasStructure tight;
        tight.centroids.emplace_back(Vec{0.25, 0.25, 0.25, 0.25});
        tight.radii.push_back(0.0);
        const PropagatedBias propagated = propagate_bias(tight, 0.0, 0.0, c_count);
        std::vector<ProbVector> noisy = {ProbVector{{0.3, 0.2, 0.25, 0.25}}};
        const CoverageReport report = bias_coverage_check(noisy, propagated);
        CHECK(report.fraction_inside < 1.0);
        CHECK(report.max_violation > 0.0);
    }
}

TEST_CASE("feature diameter subsampling stays within the exact diameter") {
    Rng rng(4);
    std::vector<Vec> features;
    for (int i = 0; i < 100; ++i) features.push_back({rng.normal(), rng.normal()});
    const double exact = feature_diameter(features, 0, 100000);
    const double sampled = feature_diameter(features, 0, 50);
    CHECK(sampled <= exact + 1e-12);
    CHECK(sampled > 0.0);
}
