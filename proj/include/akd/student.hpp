#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "akd/data.hpp"
#include "akd/numerics.hpp"

namespace akd {

enum class FeatureKind { Identity, Linear, MLP1 };

struct StudentArch {
    FeatureKind feature_kind = FeatureKind::Identity;
    int input_dim = 0;
    int hidden_dim = 0;   // MLP1 inner width; unused otherwise
    int feature_dim = 0;  // H, the head input width (= input_dim for Identity)
    int class_count = 0;
    // One head trained on the combined loss directly, for the convergence
    // experiments; the loop default is the dual-head setup.
    bool single_head = false;

    void validate() const;
    std::size_t param_count() const;
};

struct TrainConfig {
    double lambda = 0.5;
    double learning_rate = 0.1;
    int epochs = 200;
    int batch_labeled = 64;
    int batch_unlabeled = 64;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainResult {
    std::vector<double> loss_trace;  // mean step loss per epoch
};

// Shared feature map with CE and KD heads; parameters live in one flat vector
// so plain gradient descent and finite-difference checks see the same thing.
class DualHeadStudent {
  public:
    DualHeadStudent(StudentArch arch, double eta, double alpha, double beta,
                    std::uint64_t init_seed);

    const StudentArch& arch() const { return arch_; }
    double eta() const { return eta_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    Vec features(const Vec& x) const;
    Vec ce_logits(const Vec& feat) const;
    Vec kd_logits(const Vec& feat) const;

    // alpha * sigma(g_ce(h)) + (1 - alpha) * sigma(g_kd(h) / beta);
    // single-head: sigma(g(h)).
    ProbVector infer(const Vec& x) const;

    ProbVector head_ce_prob(const Vec& x) const;
    ProbVector head_kd_prob(const Vec& x) const;  // at inference temperature beta

    void save_params(const std::string& path) const;
    static DualHeadStudent load_params(const std::string& path);

  private:
    friend struct StudentGradOps;
    StudentArch arch_;
    double eta_, alpha_, beta_;
    std::vector<double> params_;
    // flat layout offsets
    std::size_t off_w1_ = 0, off_b1_ = 0, off_w2_ = 0, off_b2_ = 0;
    std::size_t off_wce_ = 0, off_bce_ = 0, off_wkd_ = 0, off_bkd_ = 0;
    void compute_offsets();
};

// Per-id table of distillation targets covering every sample the round can
// touch; absent table means CE-only training (the teacher is never consulted).
using KdTargets = std::vector<ProbVector>;

double loss_ce(const DualHeadStudent& student, const Dataset& dataset,
               const std::vector<int>& ids);

// mean_labeled KL(t || sigma(g_kd(h)/eta)) + mean_unlabeled of the same;
// an empty side contributes zero, both empty is an error.
double loss_kd(const DualHeadStudent& student, const Dataset& dataset,
               const std::vector<int>& labeled_ids, const std::vector<int>& unlabeled_ids,
               const KdTargets& targets);

// lambda * L_CE + (1 - lambda) * L_KD over the given batches (targets may be
// null for the CE-only case). Exposed for the finite-difference tests.
double combined_loss(const DualHeadStudent& student, const Dataset& dataset,
                     const std::vector<int>& labeled_ids, const std::vector<int>& unlabeled_ids,
                     const KdTargets* targets, double lambda);

// Analytic gradient of combined_loss in the flat parameter layout.
std::vector<double> combined_gradient(const DualHeadStudent& student, const Dataset& dataset,
                                      const std::vector<int>& labeled_ids,
                                      const std::vector<int>& unlabeled_ids,
                                      const KdTargets* targets, double lambda);

// Mini-batch gradient descent per the round protocol: each step pairs one
// labeled batch with one batch drawn from labeled + unlabeled. targets ==
// nullptr trains on L_CE alone.
TrainResult train(DualHeadStudent& student, const Dataset& dataset, const PoolState& pool,
                  const KdTargets* targets, const TrainConfig& config);

// f*(x) = lambda * y + (1 - lambda) * f(x)
ProbVector optimal_target(const ProbVector& y_one_hot, const ProbVector& teacher_pred,
                          double lambda);
ProbVector one_hot(int label, int class_count);

// max over ids of || student_pred - (lambda y + (1 - lambda) teacher_pred) ||_1,
// the empirical convergence bound.
double convergence_error(const std::vector<ProbVector>& student_preds,
                         const std::vector<ProbVector>& teacher_preds,
                         const std::vector<int>& labels, const std::vector<int>& ids,
                         double lambda, int class_count);

// Everything the selection strategies and diagnostics need, indexed by id.
struct StudentOutputs {
    std::vector<ProbVector> mixed;    // f_r(x), the inference output
    std::vector<ProbVector> head_ce;
    std::vector<ProbVector> head_kd;  // at temperature beta
    std::vector<Vec> features;        // h(x)
};

StudentOutputs batch_infer(const DualHeadStudent& student, const Dataset& dataset);

}  // namespace akd
