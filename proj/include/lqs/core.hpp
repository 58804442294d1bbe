#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lqs {

/// A regression sample: response vector y and n-by-p design matrix X.
/// When has_intercept is set, column 0 of X is all ones.
struct Dataset {
    std::vector<double> y;
    std::vector<std::vector<double>> X;
    bool has_intercept = false;

    std::size_t n() const { return y.size(); }
    std::size_t p() const { return X.empty() ? 0 : X[0].size(); }

    /// Throws std::invalid_argument on shape/finiteness violations.
    void validate() const;
};

/// Signed residuals r_i = y_i - x_i'beta and their magnitudes s_i = |r_i|.
struct ResidualVector {
    std::vector<double> r;
    std::vector<double> s;
};

/// Rank weights for ordered-weighted objectives; entries may be negative.
struct LambdaVector {
    std::vector<double> lambda;
};

ResidualVector residuals(const Dataset& d, const std::vector<double>& beta);

/// q-th smallest entry of an absolute-residual vector, 1-based, ties kept
/// with multiplicity.
double qth_abs_residual(const std::vector<double>& s, std::size_t q);

/// Sum of the n-k+1 largest entries of x (k = 1 gives the full sum,
/// k = n the maximum).
double k_sum(const std::vector<double>& x, std::size_t k);

/// Asymmetric deviation of x around gamma at level tau; zero iff every
/// entry equals gamma.
double quantile_loss(const std::vector<double>& x, double gamma, double tau);

/// lambda' * sort(s). Diagnostic evaluation only, never optimized.
double ordered_weighted_objective(const LambdaVector& lam,
                                  const std::vector<double>& s);

/// Report for the algebraic link between the quantile loss at the q-th
/// order statistic and the tail sum: lhs = rhs + correction, with
/// correction = x_(q) * (q - 1 - tau*n).
struct KsumQuantileReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double correction = 0.0;
    bool identity_holds = false;   // lhs == rhs + correction to 1e-12 relative
    bool lower_bound_holds = true; // lhs >= rhs whenever q >= tau*n + 1
};

KsumQuantileReport ksum_quantile_identity(const std::vector<double>& x,
                                          double tau, std::size_t q);

/// Named lambda vectors matching classical estimators, for diagnostics.
LambdaVector lambda_lad(std::size_t n);
LambdaVector lambda_chebyshev(std::size_t n);
LambdaVector lambda_kmax(std::size_t n, std::size_t q);
LambdaVector lambda_gini(std::size_t n);

} // namespace lqs
