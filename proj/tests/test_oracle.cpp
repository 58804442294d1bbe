#include "lqs/oracle.hpp"

#include "lqs/datagen.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace lqs;

TEST_CASE("location oracle: window scan by hand") {
    LocationOptimum opt = lqs_location_oracle({0, 1, 2, 10}, 3);
    CHECK(opt.beta == doctest::Approx(1.0));
    CHECK(opt.objective == doctest::Approx(1.0));

    opt = lqs_location_oracle({5, 5, 5, 5}, 3);
    CHECK(opt.objective == doctest::Approx(0.0));

    opt = lqs_location_oracle({-3, 0, 7}, 3); // q = n gives the midrange
    CHECK(opt.beta == doctest::Approx(2.0));
    CHECK(opt.objective == doctest::Approx(5.0));

    CHECK_THROWS_AS(lqs_location_oracle({1, 2, 3}, 1), std::invalid_argument);
    CHECK_THROWS_AS(lqs_location_oracle({1, 2, 3}, 4), std::invalid_argument);
}

TEST_CASE("subset oracle agrees with the location oracle on intercept-only data") {
    Rng rng(501);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.below(12);
        Dataset d;
        d.has_intercept = true;
        d.X.assign(n, {1.0});
        d.y.resize(n);
        const double mu = rng.normal(0, 10);
        for (double& y : d.y) y = mu + rng.normal(0, 2);
        const std::size_t q = 2 + rng.below(n - 1);
        LocationOptimum loc = lqs_location_oracle(d.y, q);
        OracleFit sub = lqs_subset_oracle(d, q);
        CHECK(sub.objective == doctest::Approx(loc.objective).epsilon(1e-9));
    }
}

TEST_CASE("subset oracle: consistent system at full rank") {
    // n = p+1 points in general position, q = n: the subset fit is the
    // minimax fit of the whole sample.
    Dataset d;
    d.has_intercept = true;
    d.X = {{1.0, 0.0}, {1.0, 1.0}, {1.0, 3.0}};
    d.y = {1.0, 2.0, 2.5};
    OracleFit fit = lqs_subset_oracle(d, 3);
    ResidualVector rv = residuals(d, fit.beta);
    CHECK(qth_abs_residual(rv.s, 3) == doctest::Approx(fit.objective));
    CHECK(fit.subsets_scanned == 1);
}

TEST_CASE("subset oracle: guard trips on huge enumerations") {
    Dataset d;
    d.has_intercept = false;
    const std::size_t n = 300;
    d.X.assign(n, std::vector<double>(4, 0.0));
    d.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            d.X[i][j] = static_cast<double>((i * 7 + j * 3) % 13) - 6.0;
    CHECK_THROWS_AS(lqs_subset_oracle(d, n / 2), std::invalid_argument);
}

TEST_CASE("polish never worsens and verify_fit reports honestly") {
    Rng rng(502);
    SyntheticSpec spec;
    spec.n = 14;
    spec.p = 2;
    spec.pi = 0.3;
    spec.kind = CorruptionKind::A;
    spec.seed = 77;
    Dataset d = generate_synthetic(spec).data;
    const std::size_t q = 8;

    std::vector<double> rough = {0.5, 1.5};
    const double before = qth_abs_residual(residuals(d, rough).s, q);
    PolishedFit polished = polish_fit(d, q, rough);
    CHECK(polished.objective <= before + 1e-12);

    FitResult fit;
    fit.beta = polished.beta;
    fit.objective = polished.objective;
    CertificateReport rep = verify_fit(d, q, fit);
    CHECK(rep.objective_matches);
    CHECK(rep.count_le >= q);
    CHECK(rep.order_statistic_ok);

    // a perturbed beta no longer matches its claimed objective
    fit.beta[0] += 0.37;
    CertificateReport broken = verify_fit(d, q, fit);
    CHECK_FALSE(broken.objective_matches);
}
