#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "akd/data.hpp"
#include "akd/numerics.hpp"

namespace akd {

// Teacher prediction structure: all predictions lie in the union of L2 balls
// (mu_k, r_k) on the simplex.
struct BiasStructure {
    std::vector<ProbVector> centroids;
    std::vector<double> radii;

    int cluster_count() const { return static_cast<int>(centroids.size()); }
    void validate() const;
};

// Student-side structure induced by distillation: centers lambda*e_c +
// (1-lambda)*mu_k with radius (1-lambda)*r_k + epsilon, at most C*K of them.
struct PropagatedBias {
    std::vector<ProbVector> centers;
    std::vector<double> radii;          // per center
    std::vector<int> source_cluster;    // k of each center
    std::vector<int> source_class;      // c of each center
    double lambda = 0.0;
    double epsilon = 0.0;

    int center_count() const { return static_cast<int>(centers.size()); }
};

struct BiasMembership {
    bool member = false;
    int nearest_center = -1;
    double distance = 0.0;  // to the nearest center
};

// Teacher whose prediction for a sample is a deterministic point inside the
// ball of the cluster its ground-truth class maps to. Embodies the bias
// structure exactly, which the propagation checks rely on.
struct SyntheticBiasedTeacher {
    BiasStructure bias;
    std::vector<int> class_to_cluster;  // default c -> c mod K
    int class_count = 0;
    std::uint64_t seed = 0;

    ProbVector predict(const Sample& s) const;
};

// Per-sample logit table ingested from disk; predict = softmax(logits / zeta).
struct FrozenLogitsTeacher {
    std::vector<Vec> logits;  // indexed by sample id
    double zeta = 0.01;

    ProbVector predict(const Sample& s, double temperature_multiplier = 1.0) const;
};

// Nearest-class-mean teacher over feature space: predict = softmax of cosine
// similarities to per-class prototypes divided by zeta. Stands in for a
// few-shot-adaptable model: it improves as the labeled pool grows.
struct PrototypeTeacher {
    std::vector<std::optional<Vec>> prototypes;  // one per class once adapted
    double zeta = 0.01;
    int feature_dim = 0;

    ProbVector predict(const Sample& s, double temperature_multiplier = 1.0) const;
};

using Teacher = std::variant<SyntheticBiasedTeacher, FrozenLogitsTeacher, PrototypeTeacher>;

double cosine_similarity(const Vec& a, const Vec& b);

// Canonical teacher prediction f(x).
ProbVector predict(const Teacher& teacher, const Sample& s);

// Distillation target: logit-based teachers re-soften with temperature
// zeta*eta; the synthetic teacher has no logits, so its target is f(x).
ProbVector kd_target(const Teacher& teacher, const Sample& s, double eta);

// New teacher with prototype_c = L2-normalized mean of class-c features;
// classes absent from the labeled set keep their previous prototype.
PrototypeTeacher adapt_prototypes(const PrototypeTeacher& teacher, const Dataset& dataset,
                                  const std::vector<int>& labeled_ids);

PropagatedBias propagate_bias(const BiasStructure& bias, double lambda, double epsilon,
                              int class_count);

BiasMembership bias_membership(const ProbVector& p, const BiasStructure& bias);
BiasMembership bias_membership(const ProbVector& p, const PropagatedBias& propagated);

// Loads one row of C logits per sample id (headerless CSV, row order = id order).
FrozenLogitsTeacher load_frozen_logits(const std::string& path, double zeta);

// Benchmark teacher construction: K clusters whose centroids mix a seeded
// global skew distribution q with a one-hot peak, mu_k = m_k * e_{c_k} +
// (1 - m_k) * q where c_k is the lowest class mapped to cluster k. A seeded
// choice of flat_clusters clusters gets the low sharpness_min confidence while
// the rest stay at `sharpness` - the head/tail confidence imbalance of large
// zero-shot teachers.
SyntheticBiasedTeacher make_synthetic_biased_teacher(int class_count, int cluster_count,
                                                     double sharpness, double radius,
                                                     std::uint64_t seed,
                                                     double sharpness_min = -1.0,
                                                     int flat_clusters = 0);

}  // namespace akd
