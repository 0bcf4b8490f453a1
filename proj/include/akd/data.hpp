#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "akd/numerics.hpp"

namespace akd {

// One datapoint. The label is ground truth known to the simulated oracle;
// selection strategies must only ever see it through annotation.
struct Sample {
    int id = 0;
    Vec features;
    int label = 0;
};

struct Dataset {
    std::vector<Sample> samples;  // samples[i].id == i
    int class_count = 0;
    int feature_dim = 0;

    int size() const { return static_cast<int>(samples.size()); }
    const Sample& sample(int id) const { return samples[static_cast<std::size_t>(id)]; }
    int label_of(int id) const { return samples[static_cast<std::size_t>(id)].label; }
};

// Labeled/unlabeled partition of a dataset's ids. Both lists are kept sorted
// ascending; a single loop driver owns mutation.
struct PoolState {
    std::vector<int> labeled_ids;
    std::vector<int> unlabeled_ids;
    int class_count = 0;
    int round = 0;

    bool is_labeled(int id) const;
    bool is_unlabeled(int id) const;
};

// C isotropic unit-variance Gaussian clusters around orthonormal directions
// scaled by `spread`; labels are the generating component. Requires C <= d.
Dataset generate_gaussian_mixture(int class_count, int per_class, int dim, double spread,
                                  std::uint64_t seed);

// Headerless CSV of doubles plus one integer label per line; row counts must
// match. class_count == 0 infers C = max label + 1.
Dataset load_embeddings(const std::string& features_path, const std::string& labels_path,
                        int class_count = 0);

// Writer for the same format (round-trip partner of load_embeddings).
void save_embeddings(const Dataset& dataset, const std::string& features_path,
                     const std::string& labels_path);

// Uniformly picks shots_per_class labeled ids per class under `seed`;
// everything else starts unlabeled.
PoolState initial_split(const Dataset& dataset, int shots_per_class, std::uint64_t seed);

// Drops unlabeled ids beyond max_unlabeled by a seeded uniform subsample.
// Removed ids leave the experiment entirely. No-op when the pool already fits.
void subsample_unlabeled(PoolState& pool, int max_unlabeled, std::uint64_t seed);

// Moves query ids from unlabeled to labeled (oracle annotation). Each id must
// currently be unlabeled and appear once.
void annotate(PoolState& pool, const std::vector<int>& query_ids);

}  // namespace akd
