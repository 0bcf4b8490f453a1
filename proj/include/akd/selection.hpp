#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "akd/data.hpp"
#include "akd/numerics.hpp"

namespace akd {

enum class Strategy {
    Random,
    Entropy,
    Coreset,
    PCoreSet,
    PCoreSetReverse,
    ClassBalanced,
    Badge,
};

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);
const std::vector<std::string>& all_strategy_names();

// Everything a strategy may look at. probs/features are indexed by sample id
// and cover the whole dataset. dataset supplies oracle labels; strategies may
// read labels of *labeled* ids only (class-balanced needs its n_c counts).
struct SelectionInput {
    const PoolState* pool = nullptr;
    const Dataset* dataset = nullptr;
    const std::vector<ProbVector>* probs = nullptr;     // f_r(x)
    const std::vector<Vec>* features = nullptr;          // h(x)
    const std::vector<ProbVector>* head_ce = nullptr;    // BADGE only
    const std::vector<ProbVector>* head_kd = nullptr;    // BADGE only; null if single-head
    int query_size = 0;
};

struct SelectionResult {
    std::vector<int> chosen_ids;       // pick order, exactly Q distinct unlabeled ids
    std::vector<double> step_scores;   // strategy-specific value at each pick
};

// Q uniform draws without replacement; the draw sequence is exactly
// Rng(seed).sample_without_replacement over the ascending unlabeled ids.
SelectionResult select_random(const SelectionInput& input, std::uint64_t seed);

// top-Q by Shannon entropy of f_r, ties to the lowest id
SelectionResult select_entropy(const SelectionInput& input);

// Greedy farthest-point in feature space against labeled + already chosen.
SelectionResult select_coreset(const SelectionInput& input);

// Same greedy procedure with distances between student output distributions.
SelectionResult select_pcoreset(const SelectionInput& input);

// argmin variant of select_pcoreset
SelectionResult select_pcoreset_reverse(const SelectionInput& input);

// Inverse-frequency per-class budgets over pseudo-labeled pool partitions.
SelectionResult select_class_balanced(const SelectionInput& input, std::uint64_t seed);

// k-means++ seeding over concatenated dual-head gradient embeddings
// (p_head - e_yhat) (x) h(x), 2*H*C entries per sample (H*C single-head).
SelectionResult select_badge(const SelectionInput& input, std::uint64_t seed);

SelectionResult select(Strategy strategy, const SelectionInput& input, std::uint64_t seed);

// BADGE gradient embedding for one sample, exposed for tests.
Vec badge_embedding(const ProbVector& p_ce, const ProbVector* p_kd, const Vec& feat,
                    int pseudo_label);

}  // namespace akd
