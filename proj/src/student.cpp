#include "akd/student.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "akd/rng.hpp"

namespace akd {

void StudentArch::validate() const {
    if (input_dim < 1) throw InvalidInputError("StudentArch: input_dim must be >= 1");
    if (class_count < 2) throw InvalidInputError("StudentArch: class_count must be >= 2");
    if (feature_kind == FeatureKind::Identity && feature_dim != input_dim)
        throw InvalidInputError("StudentArch: Identity features require feature_dim == input_dim");
    if (feature_kind != FeatureKind::Identity && feature_dim < 1)
        throw InvalidInputError("StudentArch: feature_dim must be >= 1");
    if (feature_kind == FeatureKind::MLP1 && hidden_dim < 1)
        throw InvalidInputError("StudentArch: MLP1 requires hidden_dim >= 1");
}

std::size_t StudentArch::param_count() const {
    const std::size_t in = static_cast<std::size_t>(input_dim);
    const std::size_t mid = static_cast<std::size_t>(hidden_dim);
    const std::size_t h = static_cast<std::size_t>(feature_dim);
    const std::size_t c = static_cast<std::size_t>(class_count);
    std::size_t n = 0;
    if (feature_kind == FeatureKind::Linear) n += in * h + h;
    if (feature_kind == FeatureKind::MLP1) n += in * mid + mid + mid * h + h;
    n += h * c + c;                    // CE head
    if (!single_head) n += h * c + c;  // KD head
    return n;
}

void TrainConfig::validate() const {
    if (lambda < 0.0 || lambda > 1.0) throw InvalidInputError("TrainConfig: lambda in [0, 1]");
    if (!(learning_rate > 0.0)) throw InvalidInputError("TrainConfig: learning_rate > 0");
    if (epochs < 1) throw InvalidInputError("TrainConfig: epochs >= 1");
    if (batch_labeled < 1 || batch_unlabeled < 1)
        throw InvalidInputError("TrainConfig: batch sizes >= 1");
}

void DualHeadStudent::compute_offsets() {
    const std::size_t in = static_cast<std::size_t>(arch_.input_dim);
    const std::size_t mid = static_cast<std::size_t>(arch_.hidden_dim);
    const std::size_t h = static_cast<std::size_t>(arch_.feature_dim);
    const std::size_t c = static_cast<std::size_t>(arch_.class_count);
    std::size_t off = 0;
    if (arch_.feature_kind == FeatureKind::Linear) {
        off_w1_ = off; off += in * h;
        off_b1_ = off; off += h;
    } else if (arch_.feature_kind == FeatureKind::MLP1) {
        off_w1_ = off; off += in * mid;
        off_b1_ = off; off += mid;
        off_w2_ = off; off += mid * h;
        off_b2_ = off; off += h;
    }
    off_wce_ = off; off += h * c;
    off_bce_ = off; off += c;
    if (!arch_.single_head) {
        off_wkd_ = off; off += h * c;
        off_bkd_ = off; off += c;
    }
}

DualHeadStudent::DualHeadStudent(StudentArch arch, double eta, double alpha, double beta,
                                 std::uint64_t init_seed)
    : arch_(arch), eta_(eta), alpha_(alpha), beta_(beta) {
    arch_.validate();
    if (!(eta_ > 0.0) || !(beta_ > 0.0))
        throw InvalidInputError("DualHeadStudent: eta and beta must be positive");
    if (alpha_ < 0.0 || alpha_ > 1.0)
        throw InvalidInputError("DualHeadStudent: alpha must be in [0, 1]");
    compute_offsets();
    params_.resize(arch_.param_count());

    // seeded uniform [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer
    Rng rng(substream_seed(init_seed, Stream::StudentInit));
    auto fill = [&](std::size_t off, std::size_t count, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i) params_[off + i] = rng.uniform(-bound, bound);
    };
    const std::size_t in = static_cast<std::size_t>(arch_.input_dim);
    const std::size_t mid = static_cast<std::size_t>(arch_.hidden_dim);
    const std::size_t h = static_cast<std::size_t>(arch_.feature_dim);
    const std::size_t c = static_cast<std::size_t>(arch_.class_count);
    if (arch_.feature_kind == FeatureKind::Linear) {
        fill(off_w1_, in * h + h, arch_.input_dim);
    } else if (arch_.feature_kind == FeatureKind::MLP1) {
        fill(off_w1_, in * mid + mid, arch_.input_dim);
        fill(off_w2_, mid * h + h, arch_.hidden_dim);
    }
    fill(off_wce_, h * c + c, arch_.feature_dim);
    if (!arch_.single_head) fill(off_wkd_, h * c + c, arch_.feature_dim);
}

namespace {

// affine forward, weights row-major [in][out]
void affine(const double* w, const double* b, const Vec& x, Vec& out, std::size_t in,
            std::size_t n_out) {
    for (std::size_t j = 0; j < n_out; ++j) out[j] = b[j];
    for (std::size_t i = 0; i < in; ++i) {
        const double xi = x[i];
        const double* row = w + i * n_out;
        for (std::size_t j = 0; j < n_out; ++j) out[j] += xi * row[j];
    }
}

struct ForwardCache {
    Vec hidden_pre;  // MLP1 only
    Vec hidden;      // MLP1 post-relu
    Vec feat;
};

}  // namespace

struct StudentGradOps {
    const DualHeadStudent& s;
    const StudentArch& arch;

    explicit StudentGradOps(const DualHeadStudent& st) : s(st), arch(st.arch_) {}

    void forward_features(const Vec& x, ForwardCache& fc) const {
        const std::size_t in = static_cast<std::size_t>(arch.input_dim);
        const std::size_t mid = static_cast<std::size_t>(arch.hidden_dim);
        const std::size_t h = static_cast<std::size_t>(arch.feature_dim);
        const double* p = s.params_.data();
        switch (arch.feature_kind) {
            case FeatureKind::Identity:
                fc.feat = x;
                break;
            case FeatureKind::Linear:
                fc.feat.resize(h);
                affine(p + s.off_w1_, p + s.off_b1_, x, fc.feat, in, h);
                break;
            case FeatureKind::MLP1:
                fc.hidden_pre.resize(mid);
                affine(p + s.off_w1_, p + s.off_b1_, x, fc.hidden_pre, in, mid);
                fc.hidden.resize(mid);
                for (std::size_t i = 0; i < mid; ++i)
                    fc.hidden[i] = fc.hidden_pre[i] > 0.0 ? fc.hidden_pre[i] : 0.0;
                fc.feat.resize(h);
                affine(p + s.off_w2_, p + s.off_b2_, fc.hidden, fc.feat, mid, h);
                break;
        }
    }

    Vec head_logits(const ForwardCache& fc, bool kd) const {
        const std::size_t h = static_cast<std::size_t>(arch.feature_dim);
        const std::size_t c = static_cast<std::size_t>(arch.class_count);
        const double* p = s.params_.data();
        Vec z(c);
        if (kd)
            affine(p + s.off_wkd_, p + s.off_bkd_, fc.feat, z, h, c);
        else
            affine(p + s.off_wce_, p + s.off_bce_, fc.feat, z, h, c);
        return z;
    }

    // accumulate grad of `weight * loss_term(z_head)` given dL/dz, plus the
    // shared-feature backprop
    void backward_head(const ForwardCache& fc, const Vec& x, const Vec& dz, bool kd,
                       std::vector<double>& grad) const {
        const std::size_t h = static_cast<std::size_t>(arch.feature_dim);
        const std::size_t c = static_cast<std::size_t>(arch.class_count);
        const std::size_t w_off = kd ? s.off_wkd_ : s.off_wce_;
        const std::size_t b_off = kd ? s.off_bkd_ : s.off_bce_;
        const double* w = s.params_.data() + w_off;

        for (std::size_t i = 0; i < h; ++i) {
            const double fi = fc.feat[i];
            double* grow = grad.data() + w_off + i * c;
            for (std::size_t j = 0; j < c; ++j) grow[j] += fi * dz[j];
        }
        for (std::size_t j = 0; j < c; ++j) grad[b_off + j] += dz[j];

        if (arch.feature_kind == FeatureKind::Identity) return;
        Vec dfeat(h, 0.0);
        for (std::size_t i = 0; i < h; ++i) {
            const double* wrow = w + i * c;
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j) acc += wrow[j] * dz[j];
            dfeat[i] = acc;
        }
        backward_features(fc, x, dfeat, grad);
    }

    void backward_features(const ForwardCache& fc, const Vec& x, const Vec& dfeat,
                           std::vector<double>& grad) const {
        const std::size_t in = static_cast<std::size_t>(arch.input_dim);
        const std::size_t mid = static_cast<std::size_t>(arch.hidden_dim);
        const std::size_t h = static_cast<std::size_t>(arch.feature_dim);
        const double* p = s.params_.data();
        if (arch.feature_kind == FeatureKind::Linear) {
            for (std::size_t i = 0; i < in; ++i) {
                const double xi = x[i];
                double* grow = grad.data() + s.off_w1_ + i * h;
                for (std::size_t j = 0; j < h; ++j) grow[j] += xi * dfeat[j];
            }
            for (std::size_t j = 0; j < h; ++j) grad[s.off_b1_ + j] += dfeat[j];
        } else if (arch.feature_kind == FeatureKind::MLP1) {
            for (std::size_t a = 0; a < mid; ++a) {
                const double ha = fc.hidden[a];
                double* grow = grad.data() + s.off_w2_ + a * h;
                for (std::size_t j = 0; j < h; ++j) grow[j] += ha * dfeat[j];
            }
            for (std::size_t j = 0; j < h; ++j) grad[s.off_b2_ + j] += dfeat[j];
            Vec dpre(mid, 0.0);
            const double* w2 = p + s.off_w2_;
            for (std::size_t a = 0; a < mid; ++a) {
                if (fc.hidden_pre[a] <= 0.0) continue;  // relu gate
                const double* wrow = w2 + a * h;
                double acc = 0.0;
                for (std::size_t j = 0; j < h; ++j) acc += wrow[j] * dfeat[j];
                dpre[a] = acc;
            }
            for (std::size_t i = 0; i < in; ++i) {
                const double xi = x[i];
                double* grow = grad.data() + s.off_w1_ + i * mid;
                for (std::size_t a = 0; a < mid; ++a) grow[a] += xi * dpre[a];
            }
            for (std::size_t a = 0; a < mid; ++a) grad[s.off_b1_ + a] += dpre[a];
        }
    }
};

Vec DualHeadStudent::features(const Vec& x) const {
    ForwardCache fc;
    StudentGradOps(*this).forward_features(x, fc);
    return fc.feat;
}

Vec DualHeadStudent::ce_logits(const Vec& feat) const {
    ForwardCache fc;
    fc.feat = feat;
    return StudentGradOps(*this).head_logits(fc, false);
}

Vec DualHeadStudent::kd_logits(const Vec& feat) const {
    if (arch_.single_head) throw InvalidInputError("kd_logits: single-head student has no KD head");
    ForwardCache fc;
    fc.feat = feat;
    return StudentGradOps(*this).head_logits(fc, true);
}

ProbVector DualHeadStudent::infer(const Vec& x) const {
    const Vec feat = features(x);
    const ProbVector p_ce = softmax(ce_logits(feat), 1.0);
    if (arch_.single_head) return p_ce;
    const ProbVector p_kd = softmax(kd_logits(feat), beta_);
    Vec mix(p_ce.size());
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = alpha_ * p_ce[i] + (1.0 - alpha_) * p_kd[i];
    return ProbVector(std::move(mix));
}

ProbVector DualHeadStudent::head_ce_prob(const Vec& x) const {
    return softmax(ce_logits(features(x)), 1.0);
}

ProbVector DualHeadStudent::head_kd_prob(const Vec& x) const {
    return softmax(kd_logits(features(x)), beta_);
}

double loss_ce(const DualHeadStudent& student, const Dataset& dataset,
               const std::vector<int>& ids) {
    if (ids.empty()) throw InvalidInputError("loss_ce: empty batch");
    StudentGradOps ops(student);
    double acc = 0.0;
    ForwardCache fc;
    for (int id : ids) {
        const Sample& s = dataset.sample(id);
        ops.forward_features(s.features, fc);
        const ProbVector p = softmax(ops.head_logits(fc, false), 1.0);
        acc += -std::log(std::max(p[static_cast<std::size_t>(s.label)], kKlFloor));
    }
    return acc / static_cast<double>(ids.size());
}

double loss_kd(const DualHeadStudent& student, const Dataset& dataset,
               const std::vector<int>& labeled_ids, const std::vector<int>& unlabeled_ids,
               const KdTargets& targets) {
    if (labeled_ids.empty() && unlabeled_ids.empty())
        throw InvalidInputError("loss_kd: both batches empty");
    StudentGradOps ops(student);
    const bool kd_head = !student.arch().single_head;
    ForwardCache fc;
    auto side = [&](const std::vector<int>& ids) {
        double acc = 0.0;
        for (int id : ids) {
            const Sample& s = dataset.sample(id);
            ops.forward_features(s.features, fc);
            const ProbVector q =
                softmax(ops.head_logits(fc, kd_head), kd_head ? student.eta() : 1.0);
            acc += kl_divergence(targets[static_cast<std::size_t>(id)], q);
        }
        return ids.empty() ? 0.0 : acc / static_cast<double>(ids.size());
    };
    return side(labeled_ids) + side(unlabeled_ids);
}

namespace {

// One pass over both batches producing the combined loss and, when grad is
// non-null, its analytic gradient. Loss = lambda * mean_CE(labeled) +
// (1 - lambda) * (mean_KL(labeled) + mean_KL(unlabeled)); a null target table
// reduces it to plain mean CE.
double eval_batches(const DualHeadStudent& student, const Dataset& dataset,
                    const std::vector<int>& labeled_ids, const std::vector<int>& unlabeled_ids,
                    const KdTargets* targets, double lambda, std::vector<double>* grad) {
    if (labeled_ids.empty()) throw InvalidInputError("combined loss: empty labeled batch");
    StudentGradOps ops(student);
    const StudentArch& arch = student.arch();
    const std::size_t c = static_cast<std::size_t>(arch.class_count);
    const bool dual = !arch.single_head;
    const double eta = student.eta();
    ForwardCache fc;
    Vec dz(c);

    const double nl = static_cast<double>(labeled_ids.size());
    const double ce_w = (targets == nullptr ? 1.0 : lambda) / nl;
    const double kd_l_w = targets == nullptr ? 0.0 : (1.0 - lambda) / nl;
    double ce_sum = 0.0, kd_l_sum = 0.0, kd_u_sum = 0.0;

    for (int id : labeled_ids) {
        const Sample& s = dataset.sample(id);
        ops.forward_features(s.features, fc);
        const ProbVector p = softmax(ops.head_logits(fc, false), 1.0);
        ce_sum += -std::log(std::max(p[static_cast<std::size_t>(s.label)], kKlFloor));
        const ProbVector* t =
            targets ? &(*targets)[static_cast<std::size_t>(id)] : nullptr;
        if (t != nullptr) {
            if (dual) {
                const ProbVector q = softmax(ops.head_logits(fc, true), eta);
                kd_l_sum += kl_divergence(*t, q);
                if (grad) {
                    // d KL(t||softmax(z/eta)) / dz = (q - t) / eta
                    for (std::size_t j = 0; j < c; ++j)
                        dz[j] = kd_l_w * (q[j] - (*t)[j]) / eta;
                    ops.backward_head(fc, s.features, dz, true, *grad);
                }
            } else {
                kd_l_sum += kl_divergence(*t, p);
            }
        }
        if (grad) {
            for (std::size_t j = 0; j < c; ++j) dz[j] = ce_w * p[j];
            dz[static_cast<std::size_t>(s.label)] -= ce_w;
            if (t != nullptr && !dual)
                // single head folds KD into the same logits: d KL(t||p)/dz = p - t
                for (std::size_t j = 0; j < c; ++j) dz[j] += kd_l_w * (p[j] - (*t)[j]);
            ops.backward_head(fc, s.features, dz, false, *grad);
        }
    }

    if (targets != nullptr && !unlabeled_ids.empty()) {
        const double kd_u_w = (1.0 - lambda) / static_cast<double>(unlabeled_ids.size());
        for (int id : unlabeled_ids) {
            const Sample& s = dataset.sample(id);
            ops.forward_features(s.features, fc);
            const ProbVector& t = (*targets)[static_cast<std::size_t>(id)];
            if (dual) {
                const ProbVector q = softmax(ops.head_logits(fc, true), eta);
                kd_u_sum += kl_divergence(t, q);
                if (grad) {
                    for (std::size_t j = 0; j < c; ++j) dz[j] = kd_u_w * (q[j] - t[j]) / eta;
                    ops.backward_head(fc, s.features, dz, true, *grad);
                }
            } else {
                const ProbVector p = softmax(ops.head_logits(fc, false), 1.0);
                kd_u_sum += kl_divergence(t, p);
                if (grad) {
                    for (std::size_t j = 0; j < c; ++j) dz[j] = kd_u_w * (p[j] - t[j]);
                    ops.backward_head(fc, s.features, dz, false, *grad);
                }
            }
        }
    }

    if (targets == nullptr) return ce_sum / nl;
    const double nu = std::max<double>(1.0, static_cast<double>(unlabeled_ids.size()));
    return lambda * ce_sum / nl + (1.0 - lambda) * (kd_l_sum / nl + kd_u_sum / nu);
}

}  // namespace

double combined_loss(const DualHeadStudent& student, const Dataset& dataset,
                     const std::vector<int>& labeled_ids, const std::vector<int>& unlabeled_ids,
                     const KdTargets* targets, double lambda) {
    return eval_batches(student, dataset, labeled_ids, unlabeled_ids, targets, lambda, nullptr);
}

std::vector<double> combined_gradient(const DualHeadStudent& student, const Dataset& dataset,
                                      const std::vector<int>& labeled_ids,
                                      const std::vector<int>& unlabeled_ids,
                                      const KdTargets* targets, double lambda) {
    std::vector<double> grad(student.params().size(), 0.0);
    eval_batches(student, dataset, labeled_ids, unlabeled_ids, targets, lambda, &grad);
    return grad;
}

TrainResult train(DualHeadStudent& student, const Dataset& dataset, const PoolState& pool,
                  const KdTargets* targets, const TrainConfig& config) {
    config.validate();
    if (pool.labeled_ids.empty()) throw InvalidInputError("train: labeled pool is empty");

    Rng rng(substream_seed(config.seed, Stream::TrainShuffle));
    std::vector<int> labeled_order = pool.labeled_ids;
    std::vector<int> mixed_order;  // D^(l) union D^(u)
    if (targets != nullptr) {
        mixed_order = pool.labeled_ids;
        mixed_order.insert(mixed_order.end(), pool.unlabeled_ids.begin(),
                           pool.unlabeled_ids.end());
        rng.shuffle(mixed_order);
    }
    std::size_t mixed_cursor = 0;
    auto next_mixed = [&]() {
        if (mixed_cursor == mixed_order.size()) {
            rng.shuffle(mixed_order);
            mixed_cursor = 0;
        }
        return mixed_order[mixed_cursor++];
    };

    const std::size_t bl = static_cast<std::size_t>(config.batch_labeled);
    const std::size_t bu = static_cast<std::size_t>(config.batch_unlabeled);
    TrainResult result;
    result.loss_trace.reserve(static_cast<std::size_t>(config.epochs));
    std::vector<int> lbatch, ubatch;
    std::vector<double> grad(student.params().size(), 0.0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(labeled_order);
        const std::size_t steps = (labeled_order.size() + bl - 1) / bl;
        double epoch_loss = 0.0;
        for (std::size_t step = 0; step < steps; ++step) {
            lbatch.assign(labeled_order.begin() + static_cast<std::ptrdiff_t>(step * bl),
                          labeled_order.begin() +
                              static_cast<std::ptrdiff_t>(std::min((step + 1) * bl,
                                                                   labeled_order.size())));
            ubatch.clear();
            if (targets != nullptr)
                for (std::size_t i = 0; i < bu; ++i) ubatch.push_back(next_mixed());

            std::fill(grad.begin(), grad.end(), 0.0);
            double step_loss = 0.0;
            try {
                step_loss =
                    eval_batches(student, dataset, lbatch, ubatch, targets, config.lambda, &grad);
            } catch (const InvalidInputError&) {
                // diverged parameters surface as non-finite logits downstream
                throw TrainingError("train: divergence at epoch " + std::to_string(epoch), epoch);
            }
            if (!std::isfinite(step_loss))
                throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch),
                                    epoch);
            auto& params = student.params();
            for (std::size_t i = 0; i < params.size(); ++i)
                params[i] -= config.learning_rate * grad[i];
            epoch_loss += step_loss;
        }
        result.loss_trace.push_back(epoch_loss / static_cast<double>(steps));
    }
    return result;
}

ProbVector optimal_target(const ProbVector& y_one_hot, const ProbVector& teacher_pred,
                          double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw InvalidInputError("optimal_target: lambda in [0, 1]");
    if (y_one_hot.size() != teacher_pred.size())
        throw InvalidInputError("optimal_target: length mismatch");
    Vec out(y_one_hot.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = lambda * y_one_hot[i] + (1.0 - lambda) * teacher_pred[i];
    return ProbVector(std::move(out));
}

ProbVector one_hot(int label, int class_count) {
    if (label < 0 || label >= class_count) throw InvalidInputError("one_hot: label out of range");
    Vec v(static_cast<std::size_t>(class_count), 0.0);
    v[static_cast<std::size_t>(label)] = 1.0;
    return ProbVector(std::move(v));
}

double convergence_error(const std::vector<ProbVector>& student_preds,
                         const std::vector<ProbVector>& teacher_preds,
                         const std::vector<int>& labels, const std::vector<int>& ids,
                         double lambda, int class_count) {
    double worst = 0.0;
    for (int id : ids) {
        const std::size_t i = static_cast<std::size_t>(id);
        const ProbVector target =
            optimal_target(one_hot(labels[i], class_count), teacher_preds[i], lambda);
        worst = std::max(worst, l1_distance(student_preds[i], target));
    }
    return worst;
}

StudentOutputs batch_infer(const DualHeadStudent& student, const Dataset& dataset) {
    StudentOutputs out;
    const std::size_t n = dataset.samples.size();
    out.mixed.reserve(n);
    out.head_ce.reserve(n);
    out.features.reserve(n);
    const bool dual = !student.arch().single_head;
    if (dual) out.head_kd.reserve(n);
    StudentGradOps ops(student);
    ForwardCache fc;
    for (const Sample& s : dataset.samples) {
        ops.forward_features(s.features, fc);
        const ProbVector p_ce = softmax(ops.head_logits(fc, false), 1.0);
        if (dual) {
            const ProbVector p_kd = softmax(ops.head_logits(fc, true), student.beta());
            Vec mix(p_ce.size());
            for (std::size_t i = 0; i < mix.size(); ++i)
                mix[i] = student.alpha() * p_ce[i] + (1.0 - student.alpha()) * p_kd[i];
            out.mixed.emplace_back(std::move(mix));
            out.head_kd.push_back(p_kd);
        } else {
            out.mixed.push_back(p_ce);
        }
        out.head_ce.push_back(p_ce);
        out.features.push_back(fc.feat);
    }
    return out;
}

void DualHeadStudent::save_params(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw InvalidInputError("save_params: cannot write " + path);
    f << "kind=" << static_cast<int>(arch_.feature_kind) << ",input_dim=" << arch_.input_dim
      << ",hidden_dim=" << arch_.hidden_dim << ",feature_dim=" << arch_.feature_dim
      << ",class_count=" << arch_.class_count << ",single_head=" << (arch_.single_head ? 1 : 0)
      << ",eta=" << eta_ << ",alpha=" << alpha_ << ",beta=" << beta_ << "\n";
    char buf[40];
    for (double v : params_) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        f << buf << '\n';
    }
}

DualHeadStudent DualHeadStudent::load_params(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInputError("load_params: cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw InvalidInputError("load_params: missing header");

    StudentArch arch;
    double eta = 2.0, alpha = 0.5, beta = 1.0;
    std::stringstream ss(header);
    std::string field;
    while (std::getline(ss, field, ',')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError("load_params: malformed header field " + field);
        const std::string key = field.substr(0, eq);
        const std::string val = field.substr(eq + 1);
        if (key == "kind") arch.feature_kind = static_cast<FeatureKind>(std::stoi(val));
        else if (key == "input_dim") arch.input_dim = std::stoi(val);
        else if (key == "hidden_dim") arch.hidden_dim = std::stoi(val);
        else if (key == "feature_dim") arch.feature_dim = std::stoi(val);
        else if (key == "class_count") arch.class_count = std::stoi(val);
        else if (key == "single_head") arch.single_head = std::stoi(val) != 0;
        else if (key == "eta") eta = std::stod(val);
        else if (key == "alpha") alpha = std::stod(val);
        else if (key == "beta") beta = std::stod(val);
        else throw InvalidInputError("load_params: unknown header field " + key);
    }

    DualHeadStudent student(arch, eta, alpha, beta, 0);
    std::string line;
    std::size_t i = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (i >= student.params_.size()) throw InvalidInputError("load_params: too many values");
        student.params_[i++] = std::stod(line);
    }
    if (i != student.params_.size())
        throw InvalidInputError("load_params: expected " + std::to_string(student.params_.size()) +
                                " values, got " + std::to_string(i));
    return student;
}

}  // namespace akd
