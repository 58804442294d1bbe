#pragma once

#include "lqs/core.hpp"
#include "lqs/milp.hpp"
#include "lqs/solver.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqs {

/// Coefficient box and per-observation residual bounds used by every
/// big-M construct. Derived from a reference fit beta0: the box has
/// half-width 2*eta*||beta0||_inf around zero plus |beta0_j| per
/// coordinate, and M_i bounds |y_i - x_i'beta| over the box.
struct BigMBounds {
    std::vector<double> beta_lo;
    std::vector<double> beta_hi;
    std::vector<double> residual_bound; // M_i, one per observation
    double eta = 1.5;
    std::vector<double> beta0;

    double max_residual_bound() const;
    /// Largest coefficient magnitude allowed by the box.
    double coeff_bound() const;
    bool contains(const std::vector<double>& beta, double tol = 1e-7) const;
};

BigMBounds derive_bigm_bounds(const Dataset& d, const std::vector<double>& beta0,
                              double eta = 1.5);

/// LAD-referenced bounds (LS fallback when the LAD LP fails).
BigMBounds derive_default_bounds(const Dataset& d, MilpSolver& solver,
                                 double eta = 1.5);

enum class FormulationTag {
    Bm,        // deviation-split model with SOS1 triples
    SlPerm,    // full position-assignment model
    SlCount,   // selector/counter model
    SlBigm,    // order-statistic threshold model
    Ksum,      // tail-sum difference model
    Bilevel,   // indicator counting reformulation
    Chebyshev, // degenerate q = n route (pure LP)
    WeightedBigm,
};

std::string formulation_name(FormulationTag tag);

enum class SortingCutMode { CoefficientSort, Lemma1Static, Lemma1Iterative };

/// A MILP plus the variable handles and metadata needed to decode raw
/// solutions into fits.
struct FormulationArtifact {
    MilpModel model;
    FormulationTag tag = FormulationTag::Bm;
    SortingCutMode cut_mode = SortingCutMode::CoefficientSort;
    std::size_t n = 0, p = 0, q = 0;
    std::vector<VarId> beta_ids;
    std::map<std::string, VarId> vmap; // gamma/omega, z[i], s[i], ... as applicable
    BigMBounds bounds;
    bool valid_inequality = false; // tail-sum model only
};

struct CertificateReport {
    double recomputed = 0.0;   // s_(q) at the decoded beta
    bool objective_matches = false;
    std::size_t count_le = 0;  // #{ s_i <= recomputed + 1e-7 }
    std::size_t count_lt = 0;  // #{ s_i <  recomputed - 1e-7 }
    bool order_statistic_ok = false;
};

struct FitResult {
    std::vector<double> beta;
    double objective = 0.0;        // recomputed s_(q)(beta), the honest UB
    double solver_objective = 0.0; // raw solver incumbent value
    double bound = 0.0;            // best proven lower bound
    SolveStatus status = SolveStatus::Error;
    double time_total = 0.0;
    double time_to_best = 0.0;
    bool objective_mismatch = false;
    std::string formulation;
    std::size_t q = 0;
    std::size_t cut_rounds = 0; // sorting-cut loop iterations
    std::string message;

    bool has_incumbent() const {
        return status == SolveStatus::Optimal ||
               status == SolveStatus::FeasibleTimeout;
    }
};

// ---- builders ----
// Every builder routes q == n to the plain minimax LP; q == 1 is allowed.

FormulationArtifact build_bm(const Dataset& d, std::size_t q, const BigMBounds& b);

/// Position-assignment model, O(n^2) binaries; guarded by default at
/// n <= 60 (n <= 30 for the static cut family, which is cubic in rows).
FormulationArtifact build_sl_perm(const Dataset& d, std::size_t q,
                                  SortingCutMode mode, const BigMBounds& b,
                                  std::size_t guard = 60);

FormulationArtifact build_sl_count(const Dataset& d, std::size_t q,
                                   const BigMBounds& b);

FormulationArtifact build_sl_bigm(const Dataset& d, std::size_t q,
                                  const BigMBounds& b);

FormulationArtifact build_ksum(const Dataset& d, std::size_t q, const BigMBounds& b,
                               bool with_valid_inequality);

FormulationArtifact build_bilevel_indicator(const Dataset& d, std::size_t q,
                                            const BigMBounds& b);

/// Always throws UnsupportedFormulation: the strong-duality single-level
/// model multiplies residual magnitudes by dual prices, a bilinear form
/// with no McCormick linearization.
struct UnsupportedFormulation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
FormulationArtifact build_strong_duality(const Dataset& d, std::size_t q,
                                         const BigMBounds& b);

// ---- sorting cuts ----

struct SortingCut {
    std::size_t i = 0;   // observation that must not sit at-or-below ell ...
    std::size_t j = 0;   // ... while j sits above ell
    std::size_t ell = 0; // position threshold, 1-based
    double violation = 0.0;
};

/// All triples whose assignment pattern contradicts the residual order of
/// s (observation i at-or-below position ell, j above, with s_i > s_j),
/// most violated first. z is the n x n assignment matrix, rows =
/// observations, columns = positions.
std::vector<SortingCut> separate_sorting_cuts(
    const std::vector<std::vector<double>>& z, const std::vector<double>& s,
    double tol = 1e-6);

// ---- solving & decoding ----

/// Applies the SOS policy, runs the backend, and for the lazy-cut mode
/// iterates separation rounds until no sorting cut is violated.
FitResult solve_formulation(const FormulationArtifact& artifact, const Dataset& d,
                            MilpSolver& solver, const SolveParams& params);

/// Extracts beta, recomputes residuals independently, and flags a
/// mismatch when the solver objective strays from the recomputed one.
FitResult decode(const FormulationArtifact& artifact, const SolveResult& solve_result,
                 const Dataset& d);

CertificateReport certify(const Dataset& d, std::size_t q, const FitResult& fit);

} // namespace lqs
