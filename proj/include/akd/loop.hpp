#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "akd/data.hpp"
#include "akd/metrics.hpp"
#include "akd/selection.hpp"
#include "akd/student.hpp"
#include "akd/teacher.hpp"

namespace akd {

enum class FrameworkKind { NoDistill, ZeroShotDistill, FewShotDistill };

FrameworkKind framework_from_name(const std::string& name);
std::string framework_name(FrameworkKind f);

// Per-(strategy, framework, seed) experiment configuration. Dataset and
// teacher are passed separately so one instantiation serves the whole grid.
struct LoopConfig {
    Strategy strategy = Strategy::PCoreSet;
    FrameworkKind framework = FrameworkKind::ZeroShotDistill;
    int rounds = 16;
    int query_size = 0;       // 0 -> one per class
    int shots_per_class = 1;
    int max_unlabeled = 0;    // 0 -> keep the whole pool
    TrainConfig train;        // per-round seed is filled by the driver
    int final_round_epochs = 0;  // 0 -> same as train.epochs
    FeatureKind feature_kind = FeatureKind::Identity;
    int hidden_dim = 0;
    int feature_dim = 0;      // 0 -> input dim
    bool single_head = false;
    double eta = 2.0;
    double alpha = 0.5;
    double beta = 1.0;
    bool warm_start = false;
    double epsilon_threshold = 0.3;
    int knn_k = 0;            // 0 -> teacher cluster count when known, else C
    int kmeans_max_iters = 100;
    bool selection_raw_features = false;  // h(x) by default
    std::uint64_t seed = 0;   // master; fans out to named substreams
};

struct RoundLog {
    int round = 0;
    std::vector<int> chosen_ids;
    std::vector<double> loss_trace;
    double final_train_loss = 0.0;
    double test_accuracy = 0.0;
    double teacher_accuracy = -1.0;  // -1 when not applicable
    double epsilon_hat = -1.0;       // max L1 gap to f*; -1 without a teacher
    double knn_loss = -1.0;
    double knn_within = -1.0;
    int active_centers = -1;
    double purity = 0.0;
    CriteriaBundle criteria;
    int labeled_size = 0;
    int unlabeled_size = 0;
    double wall_time_ms = 0.0;  // in-memory / manifest only, never in round CSVs
};

struct ExperimentResult {
    std::vector<RoundLog> rounds;
    std::uint64_t teacher_calls = 0;  // predict/kd_target invocations by the driver
};

// Top-1 accuracy of the student's inference output; argmax ties go to the
// lowest class index.
double evaluate(const DualHeadStudent& student, const Dataset& test);

// The round loop: (optionally adapt the teacher,) train a student, run the
// selection strategy, annotate, log. `teacher` may be null only for NoDistill.
ExperimentResult run_experiment(const Dataset& train_set, const Dataset& test_set,
                                const Teacher* teacher, const LoopConfig& config);

}  // namespace akd
