#include "akd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace akd {

ProbVector::ProbVector(Vec values) : p_(std::move(values)) {
    if (p_.empty()) throw InvalidInputError("ProbVector: empty vector");
    double sum = 0.0;
    for (double v : p_) {
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidInputError("ProbVector: entries must be finite and non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexSumTol)
        throw InvalidInputError("ProbVector: entries sum to " + std::to_string(sum) +
                                ", expected 1");
}

ProbVector softmax(const Vec& logits, double temperature) {
    if (logits.empty()) throw InvalidInputError("softmax: empty logits");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw InvalidInputError("softmax: temperature must be positive and finite");
    for (double v : logits)
        if (!std::isfinite(v)) throw InvalidInputError("softmax: non-finite logit");

    const double hi = *std::max_element(logits.begin(), logits.end());
    Vec out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp((logits[i] - hi) / temperature);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return ProbVector(std::move(out));
}

double kl_divergence(const ProbVector& p, const ProbVector& q) {
    if (p.size() != q.size()) throw InvalidInputError("kl_divergence: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;  // 0 log 0 := 0
        acc += p[i] * std::log(p[i] / std::max(q[i], kKlFloor));
    }
    return acc;
}

double shannon_entropy(const ProbVector& p, bool normalized) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) acc -= p[i] * std::log(p[i]);
    if (normalized) {
        if (p.size() < 2) return 0.0;
        acc /= std::log(static_cast<double>(p.size()));
    }
    return acc;
}

double l2_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw InvalidInputError("l2_distance: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double l1_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw InvalidInputError("l1_distance: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw InvalidInputError("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double l2_norm(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

Vec project_to_simplex(const Vec& v) {
    // Find tau such that sum(max(v_i - tau, 0)) = 1, then clip.
    Vec sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumulative = 0.0;
    double tau = 0.0;
    int support = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - candidate > 0.0) {
            tau = candidate;
            support = static_cast<int>(i + 1);
        }
    }
    (void)support;
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
    // renormalize away the last-ulp drift so the result passes ProbVector checks
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (sum > 0.0)
        for (double& x : out) x /= sum;
    return out;
}

std::size_t argmax_index(const Vec& v) {
    if (v.empty()) throw InvalidInputError("argmax_index: empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace akd
