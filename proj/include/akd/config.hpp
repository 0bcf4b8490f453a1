#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace akd {

struct DatasetSpec {
    std::string kind = "synthetic";  // synthetic | files
    int classes = 10;
    int per_class = 200;
    int dim = 16;
    double spread = 3.0;
    int test_per_class = 50;
    std::uint64_t seed = 42;
    int max_unlabeled = 0;
    std::string features_path, labels_path, test_features_path, test_labels_path;
};

struct TeacherSpec {
    std::string kind = "synthetic_biased";  // synthetic_biased | frozen_logits | prototype
    int clusters = 0;  // 0 -> one per class
    double sharpness = 0.7;
    double sharpness_min = -1.0;  // < 0: uniform cluster confidence
    int flat_clusters = 0;        // clusters demoted to sharpness_min
    double radius = 0.05;
    double zeta = 0.01;
    std::uint64_t seed = 7;
    std::string logits_path;
};

// The full experiment grid: strategies x frameworks x seeds.
struct ExperimentConfig {
    DatasetSpec dataset;
    TeacherSpec teacher;

    std::vector<std::string> strategies{"pcoreset"};
    std::vector<std::string> frameworks{"zero_shot"};
    int rounds = 16;
    int query_size = 0;  // 0 -> one per class
    int shots_per_class = 1;

    std::string features = "identity";  // identity | linear | mlp1
    int hidden_dim = 32;
    int feature_dim = 0;  // 0 -> input dim
    bool single_head = false;
    bool warm_start = false;
    double lambda = 0.5;
    double eta = 2.0;
    double alpha = 0.5;
    double beta = 1.0;
    double learning_rate = 0.1;
    int epochs = 200;
    int final_round_epochs = 0;
    int batch_labeled = 64;
    int batch_unlabeled = 64;

    double epsilon_threshold = 0.3;
    int knn_k = 0;
    bool selection_raw_features = false;

    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::string output_dir = "out";
    int workers = 1;

    // Fixed-order key=value serialization; the config hash is taken over this,
    // so it is stable under reordering of the input file.
    std::string canonical_string() const;
    std::string hash() const;
};

// Parses the sectioned key=value format ([section], key = value, '#'
// comments, comma-separated lists). Unknown keys are rejected with a nearest-
// key suggestion; all range violations are reported together.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Range/consistency validation used by parse_config; throws ConfigError
// listing every violation.
void validate_config(const ExperimentConfig& config);

}  // namespace akd
