#pragma once

#include "lqs/core.hpp"
#include "lqs/formulations.hpp"

#include <cstdint>
#include <vector>

namespace lqs {

struct LocationOptimum {
    double beta = 0.0;
    double objective = 0.0;
};

/// Exact intercept-only optimum: the midpoint of the shortest window
/// covering q consecutive sorted responses, with half the window length
/// as objective. Requires 2 <= q <= n.
LocationOptimum lqs_location_oracle(const std::vector<double>& y, std::size_t q);

struct OracleFit {
    std::vector<double> beta;
    double objective = 0.0;
    std::size_t subsets_scanned = 0;
};

/// Exhaustive reference solver: minimax fit on every (p+1)-subset of
/// observations, each evaluated through the q-th order statistic on the
/// full data; extra candidate fits (baselines, warm starts) may be
/// supplied and are evaluated the same way. Guarded at C(n, p+1) <= 200000.
OracleFit lqs_subset_oracle(
    const Dataset& d, std::size_t q,
    const std::vector<std::vector<double>>& extra_candidates = {});

/// Greedy refinement of a fit: repeatedly minimax-fit the q currently
/// smallest magnitudes and keep the result while the q-th order statistic
/// improves. Never worsens the input.
struct PolishedFit {
    std::vector<double> beta;
    double objective = 0.0;
    std::size_t rounds = 0;
};
PolishedFit polish_fit(const Dataset& d, std::size_t q,
                       const std::vector<double>& beta);

/// Recomputes the certificate for a claimed fit.
CertificateReport verify_fit(const Dataset& d, std::size_t q, const FitResult& fit);

} // namespace lqs
