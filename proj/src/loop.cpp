#include "akd/loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "akd/rng.hpp"

namespace akd {

FrameworkKind framework_from_name(const std::string& name) {
    if (name == "no_distill") return FrameworkKind::NoDistill;
    if (name == "zero_shot") return FrameworkKind::ZeroShotDistill;
    if (name == "few_shot") return FrameworkKind::FewShotDistill;
    throw ConfigError("unknown framework '" + name + "'");
}

std::string framework_name(FrameworkKind f) {
    switch (f) {
        case FrameworkKind::NoDistill: return "no_distill";
        case FrameworkKind::ZeroShotDistill: return "zero_shot";
        case FrameworkKind::FewShotDistill: return "few_shot";
    }
    return "?";
}

double evaluate(const DualHeadStudent& student, const Dataset& test) {
    if (test.samples.empty()) throw InvalidInputError("evaluate: empty test set");
    int correct = 0;
    for (const Sample& s : test.samples)
        if (static_cast<int>(argmax_index(student.infer(s.features))) == s.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

namespace {

double teacher_accuracy_or(const Teacher& teacher, const Dataset& test, double fallback) {
    // frozen-logits tables are keyed by training-pool ids; they say nothing
    // about a held-out sample
    if (std::holds_alternative<FrozenLogitsTeacher>(teacher)) return fallback;
    int correct = 0;
    for (const Sample& s : test.samples)
        if (static_cast<int>(argmax_index(predict(teacher, s))) == s.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

int resolve_knn_k(const LoopConfig& config, const Teacher* teacher, int class_count) {
    if (config.knn_k > 0) return config.knn_k;
    if (teacher != nullptr)
        if (const auto* synth = std::get_if<SyntheticBiasedTeacher>(teacher))
            return synth->bias.cluster_count();
    return class_count;
}

std::vector<int> all_labels(const Dataset& ds) {
    std::vector<int> labels(ds.samples.size());
    for (const Sample& s : ds.samples) labels[static_cast<std::size_t>(s.id)] = s.label;
    return labels;
}

}  // namespace

ExperimentResult run_experiment(const Dataset& train_set, const Dataset& test_set,
                                const Teacher* teacher, const LoopConfig& config) {
    const int c_count = train_set.class_count;
    const int q = config.query_size > 0 ? config.query_size : c_count;
    const bool distill = config.framework != FrameworkKind::NoDistill;
    if (config.rounds < 1) throw RunError("run_experiment: rounds must be >= 1");
    if (distill && teacher == nullptr)
        throw RunError("run_experiment: distillation framework requires a teacher");
    if (config.framework == FrameworkKind::FewShotDistill &&
        (teacher == nullptr || !std::holds_alternative<PrototypeTeacher>(*teacher)))
        throw RunError("run_experiment: few-shot framework requires a prototype teacher");

    PoolState pool = initial_split(train_set, config.shots_per_class, config.seed);
    if (config.max_unlabeled > 0)
        subsample_unlabeled(pool, config.max_unlabeled, config.seed);
    if (static_cast<long>(q) * config.rounds > static_cast<long>(pool.unlabeled_ids.size()))
        throw RunError("run_experiment: budget " + std::to_string(q) + " x " +
                       std::to_string(config.rounds) + " rounds exceeds unlabeled pool of " +
                       std::to_string(pool.unlabeled_ids.size()));

    ExperimentResult result;
    const std::vector<int> labels = all_labels(train_set);
    const int knn_k = resolve_knn_k(config, teacher, c_count);

    // Frozen teachers predict identically across rounds; cache once.
    Teacher adapted;  // few-shot working copy
    std::vector<ProbVector> teacher_preds;
    KdTargets kd_targets;
    auto refresh_teacher_tables = [&](const Teacher& t) {
        teacher_preds.clear();
        kd_targets.clear();
        teacher_preds.reserve(train_set.samples.size());
        kd_targets.reserve(train_set.samples.size());
        for (const Sample& s : train_set.samples) {
            teacher_preds.push_back(predict(t, s));
            kd_targets.push_back(kd_target(t, s, config.eta));
            result.teacher_calls += 2;
        }
    };
    if (distill && config.framework == FrameworkKind::ZeroShotDistill)
        refresh_teacher_tables(*teacher);

    StudentArch arch;
    arch.feature_kind = config.feature_kind;
    arch.input_dim = train_set.feature_dim;
    arch.hidden_dim = config.hidden_dim;
    arch.feature_dim = config.feature_kind == FeatureKind::Identity
                           ? train_set.feature_dim
                           : (config.feature_dim > 0 ? config.feature_dim : train_set.feature_dim);
    arch.class_count = c_count;
    // the no-distillation arm is a plain classifier; a dual head would mix an
    // untrained KD head into every prediction
    arch.single_head = config.single_head || !distill;

    double cached_diameter = -1.0;  // identity features keep one diameter for the run
    DualHeadStudent student(arch, config.eta, config.alpha, config.beta,
                            substream_seed(config.seed, Stream::StudentInit, 1));

    for (int round = 1; round <= config.rounds; ++round) {
        const auto t0 = std::chrono::steady_clock::now();
        RoundLog log;
        log.round = round;

        if (config.framework == FrameworkKind::FewShotDistill) {
            adapted = adapt_prototypes(std::get<PrototypeTeacher>(*teacher), train_set,
                                       pool.labeled_ids);
            refresh_teacher_tables(adapted);
        }
        const Teacher* round_teacher =
            config.framework == FrameworkKind::FewShotDistill ? &adapted : teacher;

        if (!config.warm_start || round == 1)
            student = DualHeadStudent(arch, config.eta, config.alpha, config.beta,
                                      substream_seed(config.seed, Stream::StudentInit,
                                                     static_cast<std::uint64_t>(round)));

        TrainConfig tc = config.train;
        tc.seed = substream_seed(config.seed, Stream::TrainShuffle,
                                 static_cast<std::uint64_t>(round));
        if (round == config.rounds && config.final_round_epochs > 0)
            tc.epochs = config.final_round_epochs;
        const TrainResult tr =
            train(student, train_set, pool, distill ? &kd_targets : nullptr, tc);
        log.loss_trace = tr.loss_trace;
        log.final_train_loss = tr.loss_trace.empty() ? 0.0 : tr.loss_trace.back();

        const StudentOutputs outputs = batch_infer(student, train_set);
        log.test_accuracy = evaluate(student, test_set);
        if (distill) log.teacher_accuracy = teacher_accuracy_or(*round_teacher, test_set, -1.0);

        SelectionInput sin;
        sin.pool = &pool;
        sin.dataset = &train_set;
        sin.probs = &outputs.mixed;
        std::vector<Vec> raw_features;
        if (config.selection_raw_features) {
            raw_features.reserve(train_set.samples.size());
            for (const Sample& s : train_set.samples) raw_features.push_back(s.features);
            sin.features = &raw_features;
        } else {
            sin.features = &outputs.features;
        }
        sin.head_ce = &outputs.head_ce;
        sin.head_kd = outputs.head_kd.empty() ? nullptr : &outputs.head_kd;
        sin.query_size = q;

        const SelectionResult selection =
            select(config.strategy, sin,
                   substream_seed(config.seed, Stream::Strategy,
                                  static_cast<std::uint64_t>(round)));

        // diagnostics against the pre-selection pool
        if (cached_diameter < 0.0 || config.feature_kind != FeatureKind::Identity)
            cached_diameter = feature_diameter(*sin.features, config.seed);
        log.criteria = criteria_bundle(selection, sin, cached_diameter);

        {
            // purity over the full pool: per-strategy unlabeled pools diverge
            // across rounds, so clustering them would not compare like with like
            std::vector<Vec> student_points;
            student_points.reserve(outputs.mixed.size());
            for (const ProbVector& p : outputs.mixed) student_points.push_back(p.values());
            const int k_s =
                std::min<int>(knn_k, static_cast<int>(distinct_point_count(student_points)));
            const ClusterReport sc =
                kmeans(student_points, k_s,
                       substream_seed(config.seed, Stream::Metrics,
                                      static_cast<std::uint64_t>(round)),
                       config.kmeans_max_iters);
            log.purity = cluster_purity(sc.assignments, labels);
        }

        if (distill) {
            std::vector<Vec> teacher_points;
            teacher_points.reserve(pool.unlabeled_ids.size());
            for (int id : pool.unlabeled_ids)
                teacher_points.push_back(teacher_preds[static_cast<std::size_t>(id)].values());
            const int k_t =
                std::min<int>(knn_k, static_cast<int>(distinct_point_count(teacher_points)));
            const ClusterReport tc_report =
                kmeans(teacher_points, k_t,
                       substream_seed(config.seed, Stream::Metrics,
                                      0x10000u + static_cast<std::uint64_t>(round)),
                       config.kmeans_max_iters);
            const KnnLossReport knn = knn_loss_report(
                outputs.mixed, teacher_preds, labels, pool.unlabeled_ids, tc_report.centroids,
                tc_report.assignments, config.train.lambda, config.epsilon_threshold, c_count);
            log.knn_loss = knn.mean_distance;
            log.knn_within = knn.within_threshold;
            log.active_centers = knn.active_centers;

            std::vector<int> every_id(train_set.samples.size());
            for (std::size_t i = 0; i < every_id.size(); ++i) every_id[i] = static_cast<int>(i);
            log.epsilon_hat = convergence_error(outputs.mixed, teacher_preds, labels, every_id,
                                                config.train.lambda, c_count);
        }

        annotate(pool, selection.chosen_ids);
        pool.round = round;
        log.chosen_ids = selection.chosen_ids;
        log.labeled_size = static_cast<int>(pool.labeled_ids.size());
        log.unlabeled_size = static_cast<int>(pool.unlabeled_ids.size());
        log.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        result.rounds.push_back(std::move(log));
    }
    return result;
}

}  // namespace akd
