#include "akd/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "akd/rng.hpp"

namespace akd {

Strategy strategy_from_name(const std::string& name) {
    if (name == "random") return Strategy::Random;
    if (name == "entropy") return Strategy::Entropy;
    if (name == "coreset") return Strategy::Coreset;
    if (name == "pcoreset") return Strategy::PCoreSet;
    if (name == "pcoreset_reverse") return Strategy::PCoreSetReverse;
    if (name == "class_balanced") return Strategy::ClassBalanced;
    if (name == "badge") return Strategy::Badge;
    throw ConfigError("unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Random: return "random";
        case Strategy::Entropy: return "entropy";
        case Strategy::Coreset: return "coreset";
        case Strategy::PCoreSet: return "pcoreset";
        case Strategy::PCoreSetReverse: return "pcoreset_reverse";
        case Strategy::ClassBalanced: return "class_balanced";
        case Strategy::Badge: return "badge";
    }
    return "?";
}

const std::vector<std::string>& all_strategy_names() {
    static const std::vector<std::string> names = {
        "random", "entropy", "coreset", "pcoreset", "pcoreset_reverse", "class_balanced",
        "badge"};
    return names;
}

namespace {

void check_budget(const SelectionInput& input) {
    if (input.pool == nullptr) throw InvalidInputError("selection: missing pool");
    if (input.query_size < 1) throw BudgetError("selection: query size must be >= 1");
    if (input.query_size > static_cast<int>(input.pool->unlabeled_ids.size()))
        throw BudgetError("selection: query size " + std::to_string(input.query_size) +
                          " exceeds unlabeled pool of " +
                          std::to_string(input.pool->unlabeled_ids.size()));
}

// ids with the Q highest scores, ties to the lowest id
std::vector<int> top_q_by_score(const std::vector<int>& ids, const std::vector<double>& scores,
                                int q) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return ids[a] < ids[b];
    });
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) out.push_back(ids[order[static_cast<std::size_t>(i)]]);
    return out;
}

// Greedy k-center: repeatedly take the candidate whose min distance to the
// covered set (labeled points + picks so far) is extremal, maintaining the
// incremental min-distance array. `point` maps a sample id to its location in
// the chosen space; `seed_score` breaks the cold start when nothing is
// labeled yet (that pick counts toward Q).
template <typename PointFn, typename SeedScoreFn>
SelectionResult greedy_k_center(const SelectionInput& input, PointFn point,
                                SeedScoreFn seed_score, bool reverse) {
    check_budget(input);
    const std::vector<int>& unlabeled = input.pool->unlabeled_ids;
    const std::vector<int>& labeled = input.pool->labeled_ids;
    const int q = input.query_size;

    SelectionResult result;
    std::vector<double> min_dist(unlabeled.size(), std::numeric_limits<double>::infinity());
    std::vector<char> picked(unlabeled.size(), 0);

    std::size_t start = 0;
    if (labeled.empty()) {
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < unlabeled.size(); ++i) {
            const double s = seed_score(unlabeled[i]);
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
        picked[best] = 1;
        result.chosen_ids.push_back(unlabeled[best]);
        result.step_scores.push_back(best_score);
        for (std::size_t i = 0; i < unlabeled.size(); ++i)
            if (!picked[i])
                min_dist[i] = l2_distance(point(unlabeled[i]), point(unlabeled[best]));
        start = 1;
    } else {
        for (std::size_t i = 0; i < unlabeled.size(); ++i)
            for (int lid : labeled)
                min_dist[i] = std::min(min_dist[i], l2_distance(point(unlabeled[i]), point(lid)));
    }

    for (std::size_t pick = start; pick < static_cast<std::size_t>(q); ++pick) {
        std::size_t best = unlabeled.size();
        double best_d = reverse ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < unlabeled.size(); ++i) {
            if (picked[i]) continue;
            // strict comparison keeps the lowest id on ties (ids ascend with i)
            if (reverse ? min_dist[i] < best_d : min_dist[i] > best_d) {
                best_d = min_dist[i];
                best = i;
            }
        }
        picked[best] = 1;
        result.chosen_ids.push_back(unlabeled[best]);
        result.step_scores.push_back(best_d);
        for (std::size_t i = 0; i < unlabeled.size(); ++i)
            if (!picked[i])
                min_dist[i] =
                    std::min(min_dist[i], l2_distance(point(unlabeled[i]), point(unlabeled[best])));
    }
    return result;
}

}  // namespace

SelectionResult select_random(const SelectionInput& input, std::uint64_t seed) {
    check_budget(input);
    Rng rng(seed);
    SelectionResult result;
    result.chosen_ids = rng.sample_without_replacement(
        input.pool->unlabeled_ids, static_cast<std::size_t>(input.query_size));
    result.step_scores.assign(result.chosen_ids.size(), 0.0);
    return result;
}

SelectionResult select_entropy(const SelectionInput& input) {
    check_budget(input);
    if (input.probs == nullptr) throw InvalidInputError("select_entropy: missing probabilities");
    const std::vector<int>& unlabeled = input.pool->unlabeled_ids;
    std::vector<double> scores(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i)
        scores[i] = shannon_entropy((*input.probs)[static_cast<std::size_t>(unlabeled[i])]);
    SelectionResult result;
    result.chosen_ids = top_q_by_score(unlabeled, scores, input.query_size);
    for (int id : result.chosen_ids)
        result.step_scores.push_back(shannon_entropy((*input.probs)[static_cast<std::size_t>(id)]));
    return result;
}

SelectionResult select_coreset(const SelectionInput& input) {
    if (input.features == nullptr) throw InvalidInputError("select_coreset: missing features");
    auto point = [&](int id) -> const Vec& {
        return (*input.features)[static_cast<std::size_t>(id)];
    };
    auto seed_score = [&](int id) { return l2_norm(point(id)); };
    return greedy_k_center(input, point, seed_score, false);
}

SelectionResult select_pcoreset(const SelectionInput& input) {
    if (input.probs == nullptr) throw InvalidInputError("select_pcoreset: missing probabilities");
    auto point = [&](int id) -> const Vec& {
        return (*input.probs)[static_cast<std::size_t>(id)].values();
    };
    auto seed_score = [&](int id) {
        return shannon_entropy((*input.probs)[static_cast<std::size_t>(id)]);
    };
    return greedy_k_center(input, point, seed_score, false);
}

SelectionResult select_pcoreset_reverse(const SelectionInput& input) {
    if (input.probs == nullptr)
        throw InvalidInputError("select_pcoreset_reverse: missing probabilities");
    auto point = [&](int id) -> const Vec& {
        return (*input.probs)[static_cast<std::size_t>(id)].values();
    };
    auto seed_score = [&](int id) {
        return shannon_entropy((*input.probs)[static_cast<std::size_t>(id)]);
    };
    return greedy_k_center(input, point, seed_score, true);
}

SelectionResult select_class_balanced(const SelectionInput& input, std::uint64_t seed) {
    check_budget(input);
    if (input.probs == nullptr || input.dataset == nullptr)
        throw InvalidInputError("select_class_balanced: missing probabilities or dataset");
    const PoolState& pool = *input.pool;
    const int c_count = pool.class_count;
    const int q = input.query_size;

    // labeled class counts (these labels are known post-annotation)
    std::vector<int> n_c(static_cast<std::size_t>(c_count), 0);
    for (int id : pool.labeled_ids) ++n_c[static_cast<std::size_t>(input.dataset->label_of(id))];

    std::vector<double> weights(static_cast<std::size_t>(c_count));
    double weight_sum = 0.0;
    for (int c = 0; c < c_count; ++c) {
        weights[static_cast<std::size_t>(c)] =
            n_c[static_cast<std::size_t>(c)] > 0 ? 1.0 / n_c[static_cast<std::size_t>(c)] : 1.0;
        weight_sum += weights[static_cast<std::size_t>(c)];
    }

    // pseudo-label partition of the unlabeled pool
    std::vector<std::vector<int>> partition(static_cast<std::size_t>(c_count));
    for (int id : pool.unlabeled_ids)
        partition[argmax_index((*input.probs)[static_cast<std::size_t>(id)])].push_back(id);

    Rng rng(seed);
    SelectionResult result;
    std::vector<char> taken_flag(input.dataset->samples.size(), 0);
    int remaining = q;
    for (int c = 0; c < c_count && remaining > 0; ++c) {
        const long budget = std::lround(weights[static_cast<std::size_t>(c)] / weight_sum *
                                        static_cast<double>(q));
        const std::size_t take = std::min<std::size_t>(
            {static_cast<std::size_t>(std::max<long>(budget, 0)),
             partition[static_cast<std::size_t>(c)].size(), static_cast<std::size_t>(remaining)});
        if (take == 0) continue;
        for (int id : rng.sample_without_replacement(partition[static_cast<std::size_t>(c)], take)) {
            result.chosen_ids.push_back(id);
            taken_flag[static_cast<std::size_t>(id)] = 1;
            --remaining;
        }
    }

    // rounding/availability can under-fill; top up from the leftover pool
    if (remaining > 0) {
        std::vector<int> leftovers;
        for (int id : pool.unlabeled_ids)
            if (!taken_flag[static_cast<std::size_t>(id)]) leftovers.push_back(id);
        for (int id :
             rng.sample_without_replacement(leftovers, static_cast<std::size_t>(remaining)))
            result.chosen_ids.push_back(id);
    }
    result.step_scores.assign(result.chosen_ids.size(), 0.0);
    return result;
}

Vec badge_embedding(const ProbVector& p_ce, const ProbVector* p_kd, const Vec& feat,
                    int pseudo_label) {
    const std::size_t c = p_ce.size();
    const std::size_t h = feat.size();
    Vec g((p_kd ? 2 : 1) * h * c);
    std::size_t off = 0;
    auto emit = [&](const ProbVector& p) {
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < c; ++j)
                g[off + i * c + j] =
                    (p[j] - (j == static_cast<std::size_t>(pseudo_label) ? 1.0 : 0.0)) * feat[i];
        off += h * c;
    };
    emit(p_ce);
    if (p_kd) emit(*p_kd);
    return g;
}

SelectionResult select_badge(const SelectionInput& input, std::uint64_t seed) {
    check_budget(input);
    if (input.probs == nullptr || input.features == nullptr || input.head_ce == nullptr)
        throw InvalidInputError("select_badge: missing probabilities, features or head outputs");
    const std::vector<int>& unlabeled = input.pool->unlabeled_ids;
    const std::size_t m = unlabeled.size();

    std::vector<Vec> embeddings(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t id = static_cast<std::size_t>(unlabeled[i]);
        const int pseudo = static_cast<int>(argmax_index((*input.probs)[id]));
        const ProbVector* kd = input.head_kd ? &(*input.head_kd)[id] : nullptr;
        embeddings[i] =
            badge_embedding((*input.head_ce)[id], kd, (*input.features)[id], pseudo);
    }

    auto dist2 = [](const Vec& a, const Vec& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return acc;
    };

    // k-means++ seeding: first center proportional to ||g||^2, then classic
    // D^2 weighting; a candidate set with zero total weight falls back to the
    // lowest unpicked id.
    Rng rng(seed);
    std::vector<double> weight(m);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (double v : embeddings[i]) acc += v * v;
        weight[i] = acc;
    }
    std::vector<char> picked(m, 0);
    SelectionResult result;

    auto weighted_pick = [&]() -> std::size_t {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (!picked[i]) total += weight[i];
        if (total <= 0.0) {
            for (std::size_t i = 0; i < m; ++i)
                if (!picked[i]) return i;
        }
        const double r = rng.uniform01() * total;
        double cum = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (picked[i]) continue;
            cum += weight[i];
            last = i;
            if (cum > r) return i;
        }
        return last;
    };

    for (int pick = 0; pick < input.query_size; ++pick) {
        const std::size_t chosen = weighted_pick();
        picked[chosen] = 1;
        result.chosen_ids.push_back(unlabeled[chosen]);
        result.step_scores.push_back(weight[chosen]);
        for (std::size_t i = 0; i < m; ++i) {
            if (picked[i]) continue;
            if (result.chosen_ids.size() == 1)
                weight[i] = dist2(embeddings[i], embeddings[chosen]);
            else
                weight[i] = std::min(weight[i], dist2(embeddings[i], embeddings[chosen]));
        }
    }
    return result;
}

SelectionResult select(Strategy strategy, const SelectionInput& input, std::uint64_t seed) {
    switch (strategy) {
        case Strategy::Random: return select_random(input, seed);
        case Strategy::Entropy: return select_entropy(input);
        case Strategy::Coreset: return select_coreset(input);
        case Strategy::PCoreSet: return select_pcoreset(input);
        case Strategy::PCoreSetReverse: return select_pcoreset_reverse(input);
        case Strategy::ClassBalanced: return select_class_balanced(input, seed);
        case Strategy::Badge: return select_badge(input, seed);
    }
    throw InvalidInputError("select: bad strategy");
}

}  // namespace akd
