#include "akd/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "akd/rng.hpp"

namespace akd {

void BiasStructure::validate() const {
    if (centroids.empty()) throw InvalidInputError("BiasStructure: needs at least one cluster");
    if (centroids.size() != radii.size())
        throw InvalidInputError("BiasStructure: centroid/radius count mismatch");
    // r = 0 is accepted as the degenerate point-ball
    for (double r : radii)
        if (!(r >= 0.0)) throw InvalidInputError("BiasStructure: radii must be non-negative");
    for (const ProbVector& mu : centroids)
        if (mu.size() != centroids.front().size())
            throw InvalidInputError("BiasStructure: centroid dimension mismatch");
}

double cosine_similarity(const Vec& a, const Vec& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0)
        throw InvalidInputError("cosine_similarity: zero-norm input");
    return dot(a, b) / (na * nb);
}

ProbVector SyntheticBiasedTeacher::predict(const Sample& s) const {
    const int k = class_to_cluster.empty()
                      ? s.label % bias.cluster_count()
                      : class_to_cluster[static_cast<std::size_t>(s.label)];
    const Vec& mu = bias.centroids[static_cast<std::size_t>(k)].values();
    const double r = bias.radii[static_cast<std::size_t>(k)];
    const std::size_t dim = mu.size();

    // Deterministic per-sample draw inside the ball: tangent-space direction
    // (components sum to zero), radius scaled u^(1/(C-1)) for uniformity.
    Rng rng(substream_seed(seed, Stream::TeacherBall, static_cast<std::uint64_t>(s.id)));
    Vec dir(dim);
    double norm = 0.0;
    while (norm < 1e-12) {
        double mean = 0.0;
        for (double& x : dir) {
            x = rng.normal();
            mean += x;
        }
        mean /= static_cast<double>(dim);
        for (double& x : dir) x -= mean;
        norm = l2_norm(dir);
    }
    const double u = rng.uniform01();
    const double radius = r * std::pow(u, 1.0 / static_cast<double>(dim - 1));

    Vec candidate(dim);
    for (std::size_t i = 0; i < dim; ++i) candidate[i] = mu[i] + radius * dir[i] / norm;
    bool nonneg = true;
    for (double x : candidate)
        if (x < 0.0) nonneg = false;
    if (!nonneg) {
        candidate = project_to_simplex(candidate);
        if (l2_distance(candidate, mu) > r) candidate = mu;  // keep the ball guarantee exact
    }
    return ProbVector(std::move(candidate));
}

ProbVector FrozenLogitsTeacher::predict(const Sample& s, double temperature_multiplier) const {
    if (s.id < 0 || s.id >= static_cast<int>(logits.size()))
        throw LookupError("FrozenLogitsTeacher: no logits for sample id " + std::to_string(s.id));
    return softmax(logits[static_cast<std::size_t>(s.id)], zeta * temperature_multiplier);
}

ProbVector PrototypeTeacher::predict(const Sample& s, double temperature_multiplier) const {
    if (static_cast<int>(s.features.size()) != feature_dim)
        throw InvalidInputError("PrototypeTeacher: feature dimension mismatch");
    Vec sims(prototypes.size());
    for (std::size_t c = 0; c < prototypes.size(); ++c)
        // an unadapted class behaves like an orthogonal prototype
        sims[c] = prototypes[c] ? cosine_similarity(s.features, *prototypes[c]) : 0.0;
    return softmax(sims, zeta * temperature_multiplier);
}

ProbVector predict(const Teacher& teacher, const Sample& s) {
    return std::visit([&](const auto& t) { return t.predict(s); }, teacher);
}

ProbVector kd_target(const Teacher& teacher, const Sample& s, double eta) {
    if (const auto* frozen = std::get_if<FrozenLogitsTeacher>(&teacher))
        return frozen->predict(s, eta);
    if (const auto* proto = std::get_if<PrototypeTeacher>(&teacher))
        return proto->predict(s, eta);
    return std::get<SyntheticBiasedTeacher>(teacher).predict(s);
}

PrototypeTeacher adapt_prototypes(const PrototypeTeacher& teacher, const Dataset& dataset,
                                  const std::vector<int>& labeled_ids) {
    if (labeled_ids.empty()) throw ProtocolError("adapt_prototypes: empty labeled set");
    PrototypeTeacher out = teacher;
    if (out.prototypes.size() != static_cast<std::size_t>(dataset.class_count))
        out.prototypes.resize(static_cast<std::size_t>(dataset.class_count));
    out.feature_dim = dataset.feature_dim;

    std::vector<Vec> sums(static_cast<std::size_t>(dataset.class_count),
                          Vec(static_cast<std::size_t>(dataset.feature_dim), 0.0));
    std::vector<int> counts(static_cast<std::size_t>(dataset.class_count), 0);
    for (int id : labeled_ids) {
        const Sample& s = dataset.sample(id);
        for (int i = 0; i < dataset.feature_dim; ++i)
            sums[static_cast<std::size_t>(s.label)][static_cast<std::size_t>(i)] +=
                s.features[static_cast<std::size_t>(i)];
        ++counts[static_cast<std::size_t>(s.label)];
    }
    for (int c = 0; c < dataset.class_count; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) continue;
        Vec proto = sums[static_cast<std::size_t>(c)];
        for (double& x : proto) x /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
        const double norm = l2_norm(proto);
        if (norm > 0.0)
            for (double& x : proto) x /= norm;
        out.prototypes[static_cast<std::size_t>(c)] = std::move(proto);
    }
    return out;
}

PropagatedBias propagate_bias(const BiasStructure& bias, double lambda, double epsilon,
                              int class_count) {
    if (lambda < 0.0 || lambda > 1.0)
        throw InvalidInputError("propagate_bias: lambda must be in [0, 1]");
    if (epsilon < 0.0) throw InvalidInputError("propagate_bias: epsilon must be >= 0");
    bias.validate();

    PropagatedBias out;
    out.lambda = lambda;
    out.epsilon = epsilon;
    const std::size_t dim = bias.centroids.front().size();
    for (int k = 0; k < bias.cluster_count(); ++k) {
        const Vec& mu = bias.centroids[static_cast<std::size_t>(k)].values();
        for (int c = 0; c < class_count; ++c) {
            Vec center(dim);
            for (std::size_t i = 0; i < dim; ++i) center[i] = (1.0 - lambda) * mu[i];
            center[static_cast<std::size_t>(c)] += lambda;
            out.centers.emplace_back(std::move(center));
            out.radii.push_back((1.0 - lambda) * bias.radii[static_cast<std::size_t>(k)] + epsilon);
            out.source_cluster.push_back(k);
            out.source_class.push_back(c);
        }
    }
    return out;
}

namespace {

BiasMembership nearest_ball(const ProbVector& p, const std::vector<ProbVector>& centers,
                            const std::vector<double>& radii) {
    BiasMembership m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double d = l2_distance(p, centers[i]);
        if (d < best) {
            best = d;
            m.nearest_center = static_cast<int>(i);
        }
        if (d <= radii[i]) m.member = true;
    }
    m.distance = best;
    return m;
}

}  // namespace

BiasMembership bias_membership(const ProbVector& p, const BiasStructure& bias) {
    return nearest_ball(p, bias.centroids, bias.radii);
}

BiasMembership bias_membership(const ProbVector& p, const PropagatedBias& propagated) {
    return nearest_ball(p, propagated.centers, propagated.radii);
}

FrozenLogitsTeacher load_frozen_logits(const std::string& path, double zeta) {
    std::ifstream f(path);
    if (!f) throw IngestError("load_frozen_logits: cannot open " + path);
    FrozenLogitsTeacher teacher;
    teacher.zeta = zeta;
    std::string line;
    int row = 0;
    std::size_t width = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        Vec logits;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                logits.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IngestError("load_frozen_logits: bad value at row " + std::to_string(row));
            }
        }
        if (width == 0) width = logits.size();
        if (logits.size() != width || logits.empty())
            throw IngestError("load_frozen_logits: ragged row " + std::to_string(row));
        teacher.logits.push_back(std::move(logits));
        ++row;
    }
    if (teacher.logits.empty()) throw IngestError("load_frozen_logits: no rows in " + path);
    return teacher;
}

SyntheticBiasedTeacher make_synthetic_biased_teacher(int class_count, int cluster_count,
                                                     double sharpness, double radius,
                                                     std::uint64_t seed, double sharpness_min,
                                                     int flat_clusters) {
    if (class_count < 2) throw ConfigError("make_synthetic_biased_teacher: class_count >= 2");
    if (cluster_count < 1 || cluster_count > class_count)
        throw ConfigError("make_synthetic_biased_teacher: cluster_count in [1, class_count]");
    if (sharpness < 0.0 || sharpness > 1.0)
        throw ConfigError("make_synthetic_biased_teacher: sharpness in [0, 1]");
    if (sharpness_min > sharpness)
        throw ConfigError("make_synthetic_biased_teacher: sharpness_min <= sharpness");
    if (!(radius > 0.0)) throw ConfigError("make_synthetic_biased_teacher: radius > 0");
    if (flat_clusters < 0 || flat_clusters > cluster_count)
        throw ConfigError("make_synthetic_biased_teacher: flat_clusters in [0, cluster_count]");
    if (sharpness_min < 0.0) sharpness_min = sharpness;

    // global skew q: seeded point on the simplex, shared by every centroid
    Rng rng(splitmix64(seed ^ 0x7f4a7c15ull));
    Vec skew(static_cast<std::size_t>(class_count));
    double sum = 0.0;
    for (double& x : skew) {
        x = -std::log(1.0 - rng.uniform01());
        sum += x;
    }
    for (double& x : skew) x /= sum;

    // seeded order in which clusters lose confidence
    std::vector<int> order(static_cast<std::size_t>(cluster_count));
    for (int k = 0; k < cluster_count; ++k) order[static_cast<std::size_t>(k)] = k;
    rng.shuffle(order);

    SyntheticBiasedTeacher teacher;
    teacher.class_count = class_count;
    teacher.seed = seed;
    teacher.class_to_cluster.resize(static_cast<std::size_t>(class_count));
    for (int c = 0; c < class_count; ++c)
        teacher.class_to_cluster[static_cast<std::size_t>(c)] = c % cluster_count;
    teacher.bias.centroids.resize(static_cast<std::size_t>(cluster_count));
    teacher.bias.radii.assign(static_cast<std::size_t>(cluster_count), radius);
    for (int rank = 0; rank < cluster_count; ++rank) {
        const int k = order[static_cast<std::size_t>(rank)];
        // two-level confidence profile: the last flat_clusters in the seeded
        // order get the flat sharpness, the rest stay confident
        const double m = rank >= cluster_count - flat_clusters ? sharpness_min : sharpness;
        Vec mu = skew;
        for (double& x : mu) x *= (1.0 - m);
        mu[static_cast<std::size_t>(k)] += m;  // c_k = k: lowest class mapped to k
        teacher.bias.centroids[static_cast<std::size_t>(k)] = ProbVector(std::move(mu));
    }
    teacher.bias.validate();
    return teacher;
}

}  // namespace akd
