#pragma once

#include "lqs/core.hpp"
#include "lqs/datagen.hpp"
#include "lqs/formulations.hpp"

#include <cstdint>
#include <vector>

namespace lqs {

/// Cluster reduction of a dataset: k representative rows with member
/// index sets and weights, plus the aggregation radius used by the
/// approximation bound.
struct AggregateDataset {
    Dataset reps;                                 // k representative rows
    std::vector<std::vector<std::size_t>> members; // partition of {0..n-1}
    std::vector<std::size_t> weights;              // N_i = |members[i]|
    double radius = 0.0;                           // D, residual units
    std::uint64_t source_hash = 0;

    std::size_t k() const { return reps.n(); }
    std::size_t total() const;
};

/// Seeded k-means over the joint (x, y) points, standardized coordinates,
/// k-means++ start, at most 100 iterations, tolerance 1e-8; empty
/// clusters are repaired by splitting the largest. Deterministic for a
/// fixed seed. radius is left at zero; call compute_D to fill it.
AggregateDataset aggregate(const Dataset& d, std::size_t k, std::uint64_t seed);

enum class RadiusMode {
    BetaBox,   // |y - yhat| + ||x - xhat||_1 * B, valid for every beta in the box
    Geometric, // Euclidean distance between joint points
};

/// Uniform bound on how much any residual can change when a point is
/// replaced by its representative.
double compute_D(const Dataset& d, const AggregateDataset& a,
                 const BigMBounds& beta_box,
                 RadiusMode mode = RadiusMode::BetaBox);

/// Threshold counting model over the representatives with cluster
/// weights: sum_i N_i z_i <= n - q and shat_i <= omega + M_i z_i.
FormulationArtifact build_weighted_formulation(const AggregateDataset& a,
                                               std::size_t q,
                                               const BigMBounds& b);

struct Theorem2Check {
    bool pass = false;
    double lhs = 0.0;   // |fq_exact - fq_aggregate_beta|
    double bound = 0.0; // 2D + tolerance
};

Theorem2Check theorem2_check(double fq_exact, double fq_aggregate_beta, double D);

/// AggregateDataset serialization in the instance container format.
std::string aggregate_to_string(const AggregateDataset& a);
AggregateDataset aggregate_from_string(const std::string& text);

} // namespace lqs
