#include "akd/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "akd/metrics.hpp"
#include "akd/rng.hpp"
#include "akd/selection.hpp"
#include "akd/student.hpp"
#include "akd/teacher.hpp"

namespace akd::verify {

namespace {

class Timer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
}

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

// f* nudged along a tangent direction, keeping the L1 move strictly inside
// the bound and the point on the simplex
ProbVector noisy_target(const ProbVector& target, double epsilon_bound, Rng& rng) {
    if (epsilon_bound == 0.0) return target;
    const std::size_t dim = target.size();
    Vec dir(dim);
    double mean = 0.0;
    for (double& x : dir) {
        x = rng.normal();
        mean += x;
    }
    mean /= static_cast<double>(dim);
    double l1 = 0.0;
    for (double& x : dir) {
        x -= mean;
        l1 += std::abs(x);
    }
    if (l1 < 1e-12) return target;
    const double scale = 0.999 * epsilon_bound / l1;
    double t = 1.0;
    for (std::size_t i = 0; i < dim; ++i)
        if (dir[i] < 0.0) t = std::min(t, target[i] / (scale * -dir[i]));
    t = std::max(t, 0.0);
    Vec out(dim);
    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        out[i] = std::max(0.0, target[i] + t * scale * dir[i]);  // clamp away ulp undershoot
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return ProbVector(std::move(out));
}

}  // namespace

std::pair<CheckResult, CheckResult> check_bias_propagation() {
    Timer timer;
    Rng rng(0xacce5501u);
    const double epsilons[] = {0.0, 0.05, 0.3};
    bool all_inside = true;
    bool bound_ok = true;
    double worst_violation = 0.0;
    int worst_excess = 0;

    for (int trial = 0; trial < 50; ++trial) {
        const int c_count = 3 + static_cast<int>(rng.uniform_index(8));  // 3..10
        const int k_count = 1 + static_cast<int>(rng.uniform_index(8));  // 1..8
        BiasStructure bias;
        for (int k = 0; k < k_count; ++k) {
            bias.centroids.emplace_back(random_simplex_point(rng, c_count));
            bias.radii.push_back(0.01 + 0.29 * rng.uniform01());
        }
        SyntheticBiasedTeacher teacher;
        teacher.bias = bias;
        teacher.class_count = c_count;
        teacher.seed = rng.next_u64();
        for (int c = 0; c < c_count; ++c)
            teacher.class_to_cluster.push_back(c % k_count);

        const int n = 40;
        std::vector<int> labels(n), ids(n);
        std::vector<ProbVector> teacher_preds, student_preds;
        const double lambda = rng.uniform01();
        const double eps_bound = epsilons[trial % 3];
        for (int i = 0; i < n; ++i) {
            ids[static_cast<std::size_t>(i)] = i;
            labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(
                static_cast<std::uint64_t>(c_count)));
            Sample s;
            s.id = i;
            s.label = labels[static_cast<std::size_t>(i)];
            s.features = {0.0, 0.0};
            teacher_preds.push_back(teacher.predict(s));
            const ProbVector target = optimal_target(
                one_hot(s.label, c_count), teacher_preds.back(), lambda);
            student_preds.push_back(noisy_target(target, eps_bound, rng));
        }

        const double eps_hat =
            convergence_error(student_preds, teacher_preds, labels, ids, lambda, c_count);
        const PropagatedBias propagated = propagate_bias(bias, lambda, eps_hat, c_count);
        const CoverageReport coverage = bias_coverage_check(student_preds, propagated);
        if (coverage.fraction_inside != 1.0) {
            all_inside = false;
            worst_violation = std::max(worst_violation, coverage.max_violation);
        }
        if (coverage.active_centers > c_count * k_count) {
            bound_ok = false;
            worst_excess = std::max(worst_excess, coverage.active_centers - c_count * k_count);
        }
        if (propagated.center_count() > c_count * k_count) bound_ok = false;
    }

    CheckResult prop;
    prop.name = "bias_propagation_exactness";
    prop.pass = all_inside;
    prop.detail = all_inside
                      ? "50/50 trials fully inside propagated balls"
                      : "violation beyond radius by " + sci(worst_violation);
    prop.elapsed_s = timer.seconds();

    CheckResult bound;
    bound.name = "propagated_center_bound";
    bound.pass = bound_ok;
    bound.detail = bound_ok ? "active centers <= C*K in all trials"
                            : "bound exceeded by " + std::to_string(worst_excess);
    bound.elapsed_s = timer.seconds();
    return {prop, bound};
}

CheckResult check_optimal_target_oracle() {
    Timer timer;
    Rng rng(0xacce5502u);
    const int c_count = 3;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int label = static_cast<int>(rng.uniform_index(c_count));
        Vec f = random_simplex_point(rng, c_count);
        for (double& x : f) x = 0.8 * x + 0.2 / c_count;  // keep f away from the boundary
        const ProbVector teacher_pred{Vec(f)};
        const double lambda = 0.05 + 0.9 * rng.uniform01();
        const ProbVector y = one_hot(label, c_count);

        // projected gradient descent on lambda*CE(p,y) + (1-lambda)*KL(f||p);
        // independent of the closed-form answer it is checking
        Vec p(static_cast<std::size_t>(c_count), 1.0 / c_count);
        const double step = 0.02;
        for (int iter = 0; iter < 30000; ++iter) {
            Vec g(static_cast<std::size_t>(c_count));
            for (int i = 0; i < c_count; ++i)
                g[static_cast<std::size_t>(i)] =
                    -(lambda * y[static_cast<std::size_t>(i)] +
                      (1.0 - lambda) * f[static_cast<std::size_t>(i)]) /
                    std::max(p[static_cast<std::size_t>(i)], 1e-12);
            for (int i = 0; i < c_count; ++i)
                p[static_cast<std::size_t>(i)] -= step * g[static_cast<std::size_t>(i)];
            p = project_to_simplex(p);
        }
        const ProbVector expected = optimal_target(y, teacher_pred, lambda);
        worst = std::max(worst, l1_distance(Vec(p), expected.values()));
    }
    CheckResult result;
    result.name = "optimal_target_oracle";
    result.pass = worst <= 1e-4;
    result.detail = "max L1 gap " + sci(worst) + " (tolerance 1e-4)";
    result.elapsed_s = timer.seconds();
    return result;
}

namespace {

// brute-force greedy farthest point: recompute all distances each step
std::vector<int> brute_force_k_center(const std::vector<int>& unlabeled,
                                      const std::vector<int>& labeled,
                                      const std::vector<Vec>& points, int q, bool reverse) {
    std::vector<int> chosen;
    for (int pick = 0; pick < q; ++pick) {
        int best_id = -1;
        double best_d = reverse ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
        for (int id : unlabeled) {
            if (std::find(chosen.begin(), chosen.end(), id) != chosen.end()) continue;
            double min_d = std::numeric_limits<double>::infinity();
            for (int lid : labeled)
                min_d = std::min(min_d, l2_distance(points[static_cast<std::size_t>(id)],
                                                    points[static_cast<std::size_t>(lid)]));
            for (int cid : chosen)
                min_d = std::min(min_d, l2_distance(points[static_cast<std::size_t>(id)],
                                                    points[static_cast<std::size_t>(cid)]));
            const bool better = reverse ? min_d < best_d : min_d > best_d;
            if (better) {
                best_d = min_d;
                best_id = id;
            }
        }
        chosen.push_back(best_id);
    }
    return chosen;
}

}  // namespace

CheckResult check_greedy_oracle() {
    Timer timer;
    Rng rng(0xacce5503u);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int c_count = 2 + static_cast<int>(rng.uniform_index(4));
        const int n_unlabeled = 2 + static_cast<int>(rng.uniform_index(19));  // 2..20
        const int n_labeled = 1 + static_cast<int>(rng.uniform_index(5));
        const int n = n_unlabeled + n_labeled;

        Dataset ds;
        ds.class_count = c_count;
        ds.feature_dim = 3;
        std::vector<ProbVector> probs;
        std::vector<Vec> features;
        for (int i = 0; i < n; ++i) {
            Sample s;
            s.id = i;
            s.label = 0;
            s.features = {rng.normal(), rng.normal(), rng.normal()};
            features.push_back(s.features);
            ds.samples.push_back(std::move(s));
            probs.emplace_back(random_simplex_point(rng, c_count));
        }
        PoolState pool;
        pool.class_count = c_count;
        for (int i = 0; i < n_labeled; ++i) pool.labeled_ids.push_back(i);
        for (int i = n_labeled; i < n; ++i) pool.unlabeled_ids.push_back(i);
        const int q = 1 + static_cast<int>(rng.uniform_index(
                              static_cast<std::uint64_t>(n_unlabeled)));

        SelectionInput input;
        input.pool = &pool;
        input.dataset = &ds;
        input.probs = &probs;
        input.features = &features;
        input.query_size = q;

        std::vector<Vec> prob_points;
        for (const ProbVector& p : probs) prob_points.push_back(p.values());
        if (select_pcoreset(input).chosen_ids !=
            brute_force_k_center(pool.unlabeled_ids, pool.labeled_ids, prob_points, q, false))
            ++mismatches;
        if (select_coreset(input).chosen_ids !=
            brute_force_k_center(pool.unlabeled_ids, pool.labeled_ids, features, q, false))
            ++mismatches;
    }
    CheckResult result;
    result.name = "greedy_oracle_equivalence";
    result.pass = mismatches == 0;
    result.detail = mismatches == 0 ? "200/200 instances match brute force exactly"
                                    : std::to_string(mismatches) + " mismatching instances";
    result.elapsed_s = timer.seconds();
    return result;
}

CheckResult check_gradients() {
    Timer timer;
    Rng rng(0xacce5504u);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const bool mlp = trial % 2 == 1;
        const int d = 3 + static_cast<int>(rng.uniform_index(3));
        const int c_count = 3 + static_cast<int>(rng.uniform_index(3));
        const int n_labeled = 3 + static_cast<int>(rng.uniform_index(3));
        const int n_unlabeled = 3 + static_cast<int>(rng.uniform_index(3));
        const int n = n_labeled + n_unlabeled;

        Dataset ds;
        ds.class_count = c_count;
        ds.feature_dim = d;
        KdTargets targets;
        std::vector<int> labeled, unlabeled;
        for (int i = 0; i < n; ++i) {
            Sample s;
            s.id = i;
            s.label = static_cast<int>(rng.uniform_index(c_count));
            for (int j = 0; j < d; ++j) s.features.push_back(rng.normal());
            ds.samples.push_back(std::move(s));
            targets.emplace_back(random_simplex_point(rng, c_count));
            (i < n_labeled ? labeled : unlabeled).push_back(i);
        }

        StudentArch arch;
        arch.feature_kind = mlp ? FeatureKind::MLP1 : FeatureKind::Identity;
        arch.input_dim = d;
        arch.hidden_dim = mlp ? 5 : 0;
        arch.feature_dim = mlp ? 4 : d;
        arch.class_count = c_count;
        DualHeadStudent student(arch, 2.0, 0.5, 1.0, rng.next_u64());
        const double lambda = 0.3 + 0.4 * rng.uniform01();

        const std::vector<double> analytic =
            combined_gradient(student, ds, labeled, unlabeled, &targets, lambda);
        const double h = 1e-5;
        auto& params = student.params();
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double original = params[i];
            params[i] = original + h;
            const double plus = combined_loss(student, ds, labeled, unlabeled, &targets, lambda);
            params[i] = original - h;
            const double minus = combined_loss(student, ds, labeled, unlabeled, &targets, lambda);
            params[i] = original;
            const double numeric = (plus - minus) / (2.0 * h);
            const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-10});
            worst_rel = std::max(worst_rel, std::abs(analytic[i] - numeric) / denom);
        }
    }
    CheckResult result;
    result.name = "gradient_check";
    result.pass = worst_rel <= 1e-4;
    result.detail = "max relative gap " + sci(worst_rel) + " (tolerance 1e-4)";
    result.elapsed_s = timer.seconds();
    return result;
}

std::vector<CheckResult> run_all() {
    std::vector<CheckResult> results;
    auto [prop, bound] = check_bias_propagation();
    results.push_back(std::move(prop));
    results.push_back(check_optimal_target_oracle());
    results.push_back(check_greedy_oracle());
    results.push_back(check_gradients());
    results.push_back(std::move(bound));
    return results;
}

}  // namespace akd::verify
