#include "lqs/oracle.hpp"

#include "lqs/baselines.hpp"
#include "lqs/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lqs {

LocationOptimum lqs_location_oracle(const std::vector<double>& y, std::size_t q) {
    const std::size_t n = y.size();
    if (q < 2 || q > n)
        throw std::invalid_argument("lqs_location_oracle: q must lie in [2, n]");
    std::vector<double> s(y);
    std::sort(s.begin(), s.end());
    LocationOptimum best;
    best.objective = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + q <= n; ++i) {
        const double len = s[i + q - 1] - s[i];
        if (len / 2.0 < best.objective) {
            best.objective = len / 2.0;
            best.beta = (s[i] + s[i + q - 1]) / 2.0;
        }
    }
    return best;
}

namespace {

double evaluate(const Dataset& d, std::size_t q, const std::vector<double>& beta) {
    return qth_abs_residual(residuals(d, beta).s, q);
}

std::size_t binomial_guarded(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) return 0;
    std::size_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

} // namespace

OracleFit lqs_subset_oracle(const Dataset& d, std::size_t q,
                            const std::vector<std::vector<double>>& extra_candidates) {
    d.validate();
    const std::size_t n = d.n(), p = d.p();
    if (q < 1 || q > n)
        throw std::invalid_argument("lqs_subset_oracle: q out of range");
    const std::size_t subset_size = std::min(p + 1, n);
    constexpr std::size_t kGuard = 200000;
    if (binomial_guarded(n, subset_size, kGuard) > kGuard)
        throw std::invalid_argument(
            "lqs_subset_oracle: C(n, p+1) exceeds the enumeration guard");

    OracleFit best;
    best.objective = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& beta) {
        if (beta.size() != p) return;
        const double obj = evaluate(d, q, beta);
        if (obj < best.objective) {
            best.objective = obj;
            best.beta = beta;
        }
    };

    // Least squares is solver-free; callers add LAD/quantile fits through
    // extra_candidates when they want the full safeguard set.
    consider(fit_ls(d).beta);
    for (const auto& beta : extra_candidates) consider(beta);

    std::vector<std::size_t> pick(subset_size);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<std::vector<double>> Xs(subset_size);
    std::vector<double> ys(subset_size);
    for (;;) {
        for (std::size_t t = 0; t < subset_size; ++t) {
            Xs[t] = d.X[pick[t]];
            ys[t] = d.y[pick[t]];
        }
        ChebyshevFit fit = chebyshev_fit(Xs, ys);
        if (fit.ok) consider(fit.beta);
        ++best.subsets_scanned;

        // next combination
        std::size_t t = subset_size;
        while (t > 0 && pick[t - 1] == n - subset_size + t - 1) --t;
        if (t == 0) break;
        ++pick[t - 1];
        for (std::size_t u = t; u < subset_size; ++u) pick[u] = pick[u - 1] + 1;
    }

    PolishedFit polished = polish_fit(d, q, best.beta);
    if (polished.objective < best.objective) {
        best.objective = polished.objective;
        best.beta = polished.beta;
    }
    return best;
}

PolishedFit polish_fit(const Dataset& d, std::size_t q,
                       const std::vector<double>& beta) {
    d.validate();
    PolishedFit out;
    out.beta = beta;
    out.objective = evaluate(d, q, beta);
    for (std::size_t round = 0; round < 50; ++round) {
        ResidualVector rv = residuals(d, out.beta);
        std::vector<std::size_t> order(d.n());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rv.s[a] < rv.s[b]; });
        std::vector<std::vector<double>> Xs(q);
        std::vector<double> ys(q);
        for (std::size_t t = 0; t < q; ++t) {
            Xs[t] = d.X[order[t]];
            ys[t] = d.y[order[t]];
        }
        ChebyshevFit fit = chebyshev_fit(Xs, ys);
        if (!fit.ok) break;
        const double obj = evaluate(d, q, fit.beta);
        if (obj < out.objective - 1e-15) {
            out.objective = obj;
            out.beta = fit.beta;
            out.rounds = round + 1;
        } else {
            break;
        }
    }
    return out;
}

CertificateReport verify_fit(const Dataset& d, std::size_t q, const FitResult& fit) {
    return certify(d, q, fit);
}

} // namespace lqs
