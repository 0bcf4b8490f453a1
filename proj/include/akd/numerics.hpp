#pragma once

#include <cstddef>
#include <vector>

#include "akd/errors.hpp"

namespace akd {

using Vec = std::vector<double>;

// Floor applied to the second argument of a KL term before taking the log,
// so hard (near one-hot) targets keep the loss finite.
inline constexpr double kKlFloor = 1e-12;

// Tolerance on |sum(p) - 1| for a valid probability vector.
inline constexpr double kSimplexSumTol = 1e-9;

// A point on the probability simplex: non-negative entries summing to one
// within kSimplexSumTol. Construction validates; arithmetic that is closed
// over the simplex (softmax output, convex combinations) goes through the
// checked constructor too, since the check is O(C) like everything else here.
class ProbVector {
  public:
    ProbVector() = default;
    explicit ProbVector(Vec values);

    const Vec& values() const { return p_; }
    double operator[](std::size_t i) const { return p_[i]; }
    std::size_t size() const { return p_.size(); }

    bool operator==(const ProbVector& o) const { return p_ == o.p_; }

  private:
    Vec p_;
};

// sigma(logits / temperature), stabilized by max subtraction.
ProbVector softmax(const Vec& logits, double temperature);

// sum_c p_c log(p_c / q_c) with 0 log 0 := 0 and q floored at kKlFloor.
double kl_divergence(const ProbVector& p, const ProbVector& q);

// -sum_c p_c log p_c; divided by log C when normalized (0 for C == 1).
double shannon_entropy(const ProbVector& p, bool normalized = false);

double l2_distance(const Vec& a, const Vec& b);
double l1_distance(const Vec& a, const Vec& b);
inline double l2_distance(const ProbVector& a, const ProbVector& b) {
    return l2_distance(a.values(), b.values());
}
inline double l1_distance(const ProbVector& a, const ProbVector& b) {
    return l1_distance(a.values(), b.values());
}

double dot(const Vec& a, const Vec& b);
double l2_norm(const Vec& v);

// Euclidean projection onto the probability simplex (sort-based algorithm).
Vec project_to_simplex(const Vec& v);

// argmax with ties resolved to the lowest index
std::size_t argmax_index(const Vec& v);
inline std::size_t argmax_index(const ProbVector& p) { return argmax_index(p.values()); }

}  // namespace akd
