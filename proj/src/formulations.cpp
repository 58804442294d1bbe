#include "lqs/formulations.hpp"

#include "lqs/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace lqs {

double BigMBounds::max_residual_bound() const {
    double m = 0.0;
    for (double v : residual_bound) m = std::max(m, v);
    return m;
}

double BigMBounds::coeff_bound() const {
    double b = 0.0;
    for (std::size_t j = 0; j < beta_lo.size(); ++j)
        b = std::max(b, std::max(std::abs(beta_lo[j]), std::abs(beta_hi[j])));
    return b;
}

bool BigMBounds::contains(const std::vector<double>& beta, double tol) const {
    if (beta.size() != beta_lo.size()) return false;
    for (std::size_t j = 0; j < beta.size(); ++j)
        if (beta[j] < beta_lo[j] - tol || beta[j] > beta_hi[j] + tol) return false;
    return true;
}

BigMBounds derive_bigm_bounds(const Dataset& d, const std::vector<double>& beta0,
                              double eta) {
    d.validate();
    if (!(eta >= 1.0 && eta <= 2.0))
        throw std::invalid_argument("derive_bigm_bounds: eta must lie in [1,2]");
    if (beta0.size() != d.p())
        throw std::invalid_argument("derive_bigm_bounds: beta0 size mismatch");
    for (double b : beta0)
        if (!std::isfinite(b))
            throw std::invalid_argument("derive_bigm_bounds: non-finite beta0");

    double norm = 0.0;
    for (double b : beta0) norm = std::max(norm, std::abs(b));
    double mbar = eta * norm;
    if (mbar == 0.0) {
        // Degenerate reference fit; fall back to the response scale so the
        // box keeps a nonempty interior.
        double yscale = 1.0;
        for (double v : d.y) yscale = std::max(yscale, std::abs(v));
        mbar = eta * yscale;
    }

    BigMBounds b;
    b.eta = eta;
    b.beta0 = beta0;
    b.beta_lo.resize(d.p());
    b.beta_hi.resize(d.p());
    for (std::size_t j = 0; j < d.p(); ++j) {
        b.beta_hi[j] = 2.0 * mbar + std::abs(beta0[j]);
        b.beta_lo[j] = -b.beta_hi[j];
    }
    b.residual_bound.resize(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) {
        double pos = 0.0, neg = 0.0;
        for (std::size_t j = 0; j < d.p(); ++j) {
            const double x = d.X[i][j];
            if (x > 0.0) pos += b.beta_hi[j] * x;
            else if (x < 0.0) neg += b.beta_lo[j] * x;
        }
        b.residual_bound[i] = std::abs(d.y[i]) + std::abs(pos) + std::abs(neg);
    }
    return b;
}

BigMBounds derive_default_bounds(const Dataset& d, MilpSolver& solver, double eta) {
    std::vector<double> beta0;
    try {
        beta0 = fit_lad(d, solver).beta;
    } catch (const std::exception&) {
        beta0 = fit_ls(d).beta;
    }
    return derive_bigm_bounds(d, beta0, eta);
}

std::string formulation_name(FormulationTag tag) {
    switch (tag) {
        case FormulationTag::Bm: return "bm";
        case FormulationTag::SlPerm: return "slperm";
        case FormulationTag::SlCount: return "slcount";
        case FormulationTag::SlBigm: return "slbigm";
        case FormulationTag::Ksum: return "ksum";
        case FormulationTag::Bilevel: return "bilevel";
        case FormulationTag::Chebyshev: return "chebyshev";
        case FormulationTag::WeightedBigm: return "weighted";
    }
    return "?";
}

namespace {

std::string idx(const std::string& base, std::size_t i) {
    return base + std::to_string(i);
}

// Residual split shared by every builder: beta in the box,
// rpos_i - rneg_i + x_i'beta = y_i, and optionally s_i = rpos_i + rneg_i.
struct ResidualBlock {
    std::vector<VarId> beta, rpos, rneg, s;
};

ResidualBlock add_residual_block(MilpModel& m, const Dataset& d,
                                 const BigMBounds& b, bool with_s) {
    const std::size_t n = d.n(), p = d.p();
    ResidualBlock blk;
    blk.beta.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        blk.beta[j] = m.add_continuous(idx("beta", j), b.beta_lo[j], b.beta_hi[j]);
    blk.rpos.resize(n);
    blk.rneg.resize(n);
    if (with_s) blk.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double Mi = b.residual_bound[i];
        blk.rpos[i] = m.add_continuous(idx("rpos", i), 0.0, Mi);
        blk.rneg[i] = m.add_continuous(idx("rneg", i), 0.0, Mi);
        if (with_s) blk.s[i] = m.add_continuous(idx("s", i), 0.0, Mi);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<LinTerm> terms{{blk.rpos[i], 1.0}, {blk.rneg[i], -1.0}};
        for (std::size_t j = 0; j < p; ++j)
            if (d.X[i][j] != 0.0) terms.push_back({blk.beta[j], d.X[i][j]});
        m.add_eq(idx("resid", i), std::move(terms), d.y[i]);
        if (with_s)
            m.add_eq(idx("abs", i),
                     {{blk.rpos[i], 1.0}, {blk.rneg[i], 1.0}, {blk.s[i], -1.0}}, 0.0);
    }
    return blk;
}

void fill_common(FormulationArtifact& a, const Dataset& d, std::size_t q,
                 const BigMBounds& b, FormulationTag tag) {
    a.tag = tag;
    a.n = d.n();
    a.p = d.p();
    a.q = q;
    a.bounds = b;
}

void check_rank(const Dataset& d, std::size_t q) {
    d.validate();
    if (q < 1 || q > d.n())
        throw std::invalid_argument("formulation: rank q=" + std::to_string(q) +
                                    " out of range [1, " + std::to_string(d.n()) + "]");
}

// Degenerate q = n: minimize the largest magnitude, a plain LP.
FormulationArtifact build_chebyshev(const Dataset& d, const BigMBounds& b,
                                    FormulationTag requested) {
    FormulationArtifact a;
    fill_common(a, d, d.n(), b, requested);
    ResidualBlock blk = add_residual_block(a.model, d, b, /*with_s=*/false);
    VarId gamma = a.model.add_continuous("gamma", 0.0, b.max_residual_bound());
    for (std::size_t i = 0; i < d.n(); ++i)
        a.model.add_le(idx("cap", i),
                       {{blk.rpos[i], 1.0}, {blk.rneg[i], 1.0}, {gamma, -1.0}}, 0.0);
    a.model.set_objective({{gamma, 1.0}});
    a.beta_ids = blk.beta;
    a.vmap["gamma"] = gamma;
    a.cut_mode = SortingCutMode::CoefficientSort;
    return a;
}

} // namespace

FormulationArtifact build_bm(const Dataset& d, std::size_t q, const BigMBounds& b) {
    check_rank(d, q);
    if (q == d.n()) return build_chebyshev(d, b, FormulationTag::Bm);
    FormulationArtifact a;
    fill_common(a, d, q, b, FormulationTag::Bm);
    MilpModel& m = a.model;
    const std::size_t n = d.n();
    const double gmax = b.max_residual_bound();

    ResidualBlock blk = add_residual_block(m, d, b, /*with_s=*/false);
    VarId gamma = m.add_continuous("gamma", 0.0, gmax);
    std::vector<VarId> z(n), excess(n), deficit(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = m.add_binary(idx("z", i));
        // excess = (|r_i| - gamma)+ and deficit = (gamma - |r_i|)+
        excess[i] = m.add_continuous(idx("exc", i), 0.0, b.residual_bound[i]);
        deficit[i] = m.add_continuous(idx("def", i), 0.0, gmax);
    }
    for (std::size_t i = 0; i < n; ++i) {
        m.add_eq(idx("dev", i),
                 {{blk.rpos[i], 1.0}, {blk.rneg[i], 1.0}, {gamma, -1.0},
                  {excess[i], -1.0}, {deficit[i], 1.0}}, 0.0);
        m.add_le(idx("defcap", i), {{deficit[i], 1.0}, {gamma, -1.0}}, 0.0);
    }
    std::vector<LinTerm> count;
    for (std::size_t i = 0; i < n; ++i) count.push_back({z[i], 1.0});
    m.add_eq("count", std::move(count), static_cast<double>(q));
    for (std::size_t i = 0; i < n; ++i) {
        m.add_sos1(idx("sosdev", i), {excess[i], deficit[i]});
        m.add_sos1(idx("sossplit", i), {blk.rpos[i], blk.rneg[i]});
        // z_i = 1 marks a residual counted at or below gamma, so the
        // excess above gamma must vanish for it.
        m.add_sos1(idx("soscnt", i), {z[i], excess[i]});
    }
    m.set_objective({{gamma, 1.0}});

    a.beta_ids = blk.beta;
    a.vmap["gamma"] = gamma;
    for (std::size_t i = 0; i < n; ++i) {
        a.vmap[idx("z", i)] = z[i];
        a.vmap[idx("exc", i)] = excess[i];
        a.vmap[idx("def", i)] = deficit[i];
    }
    return a;
}

FormulationArtifact build_sl_perm(const Dataset& d, std::size_t q,
                                  SortingCutMode mode, const BigMBounds& b,
                                  std::size_t guard) {
    check_rank(d, q);
    const std::size_t n = d.n();
    const std::size_t effective_guard =
        mode == SortingCutMode::Lemma1Static ? std::min<std::size_t>(guard, 30) : guard;
    if (n > effective_guard)
        throw std::invalid_argument(
            "build_sl_perm: n=" + std::to_string(n) + " exceeds the guard " +
            std::to_string(effective_guard) + " for this cut mode");
    if (q == n) return build_chebyshev(d, b, FormulationTag::SlPerm);

    FormulationArtifact a;
    fill_common(a, d, q, b, FormulationTag::SlPerm);
    a.cut_mode = mode;
    MilpModel& m = a.model;

    ResidualBlock blk = add_residual_block(m, d, b, /*with_s=*/true);
    std::vector<std::vector<VarId>> z(n, std::vector<VarId>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            z[i][k] = m.add_binary("z" + std::to_string(i) + "_" + std::to_string(k));

    for (std::size_t k = 0; k < n; ++k) {
        std::vector<LinTerm> terms;
        for (std::size_t i = 0; i < n; ++i) terms.push_back({z[i][k], 1.0});
        m.add_eq(idx("pos", k), std::move(terms), 1.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<LinTerm> terms;
        for (std::size_t k = 0; k < n; ++k) terms.push_back({z[i][k], 1.0});
        m.add_eq(idx("asg", i), std::move(terms), 1.0);
    }

    auto product = [&](std::size_t i, std::size_t k) {
        return add_mccormick_product(
            m, z[i][k], blk.s[i], "w" + std::to_string(i) + "_" + std::to_string(k));
    };

    std::vector<LinTerm> obj;
    if (mode == SortingCutMode::CoefficientSort) {
        // one linearized product per assignment cell, column sums sorted
        std::vector<std::vector<VarId>> w(n, std::vector<VarId>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) w[i][k] = product(i, k);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            std::vector<LinTerm> terms;
            for (std::size_t i = 0; i < n; ++i) {
                terms.push_back({w[i][k], 1.0});
                terms.push_back({w[i][k + 1], -1.0});
            }
            m.add_le(idx("sort", k), std::move(terms), 0.0);
        }
        for (std::size_t i = 0; i < n; ++i) obj.push_back({w[i][q - 1], 1.0});
    } else {
        for (std::size_t i = 0; i < n; ++i) obj.push_back({product(i, q - 1), 1.0});
        if (mode == SortingCutMode::Lemma1Static) {
            // complete lifted family: the pattern "i at-or-below ell, j
            // above ell" forces s_i <= s_j
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    for (std::size_t ell = 0; ell + 1 < n; ++ell) {
                        const double Mi = b.residual_bound[i];
                        std::vector<LinTerm> terms{{blk.s[i], 1.0}, {blk.s[j], -1.0}};
                        for (std::size_t k = ell + 1; k < n; ++k)
                            terms.push_back({z[j][k], Mi});
                        for (std::size_t k = 0; k <= ell; ++k)
                            terms.push_back({z[i][k], Mi});
                        m.add_le("ord" + std::to_string(i) + "_" + std::to_string(j) +
                                     "_" + std::to_string(ell),
                                 std::move(terms), 2.0 * Mi);
                    }
                }
        }
    }
    m.set_objective(std::move(obj));

    a.beta_ids = blk.beta;
    for (std::size_t i = 0; i < n; ++i) {
        a.vmap[idx("s", i)] = blk.s[i];
        for (std::size_t k = 0; k < n; ++k)
            a.vmap["z" + std::to_string(i) + "_" + std::to_string(k)] = z[i][k];
    }
    return a;
}

FormulationArtifact build_sl_count(const Dataset& d, std::size_t q,
                                   const BigMBounds& b) {
    check_rank(d, q);
    if (q == d.n()) return build_chebyshev(d, b, FormulationTag::SlCount);
    FormulationArtifact a;
    fill_common(a, d, q, b, FormulationTag::SlCount);
    MilpModel& m = a.model;
    const std::size_t n = d.n();

    ResidualBlock blk = add_residual_block(m, d, b, /*with_s=*/true);
    std::vector<VarId> delta(n), z(n), wsel(n), wcnt(n);
    for (std::size_t i = 0; i < n; ++i) {
        delta[i] = m.add_binary(idx("delta", i));
        z[i] = m.add_binary(idx("z", i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        wsel[i] = add_mccormick_product(m, delta[i], blk.s[i], idx("wsel", i));
        wcnt[i] = add_mccormick_product(m, z[i], blk.s[i], idx("wcnt", i));
    }
    std::vector<LinTerm> one, count;
    for (std::size_t i = 0; i < n; ++i) {
        one.push_back({delta[i], 1.0});
        count.push_back({z[i], 1.0});
    }
    m.add_eq("selone", std::move(one), 1.0);
    m.add_eq("count", std::move(count), static_cast<double>(q));
    // every counted magnitude stays at or below the selected one
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<LinTerm> terms{{wcnt[i], 1.0}};
        for (std::size_t j = 0; j < n; ++j) terms.push_back({wsel[j], -1.0});
        m.add_le(idx("below", i), std::move(terms), 0.0);
    }
    for (std::size_t i = 0; i < n; ++i)
        m.add_sos1(idx("sossplit", i), {blk.rpos[i], blk.rneg[i]});

    std::vector<LinTerm> obj;
    for (std::size_t i = 0; i < n; ++i) obj.push_back({wsel[i], 1.0});
    m.set_objective(std::move(obj));

    a.beta_ids = blk.beta;
    for (std::size_t i = 0; i < n; ++i) {
        a.vmap[idx("delta", i)] = delta[i];
        a.vmap[idx("z", i)] = z[i];
        a.vmap[idx("s", i)] = blk.s[i];
    }
    return a;
}

FormulationArtifact build_sl_bigm(const Dataset& d, std::size_t q,
                                  const BigMBounds& b) {
    check_rank(d, q);
    if (q == d.n()) return build_chebyshev(d, b, FormulationTag::SlBigm);
    FormulationArtifact a;
    fill_common(a, d, q, b, FormulationTag::SlBigm);
    MilpModel& m = a.model;
    const std::size_t n = d.n();

    ResidualBlock blk = add_residual_block(m, d, b, /*with_s=*/true);
    VarId omega = m.add_continuous("omega", 0.0, b.max_residual_bound());
    std::vector<VarId> z(n);
    std::vector<LinTerm> count;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = m.add_binary(idx("z", i));
        count.push_back({z[i], 1.0});
    }
    m.add_le("count", std::move(count), static_cast<double>(n - q));
    for (std::size_t i = 0; i < n; ++i)
        m.add_le(idx("cap", i),
                 {{blk.s[i], 1.0}, {omega, -1.0}, {z[i], -b.residual_bound[i]}}, 0.0);
    m.set_objective({{omega, 1.0}});

    a.beta_ids = blk.beta;
    a.vmap["omega"] = omega;
    for (std::size_t i = 0; i < n; ++i) {
        a.vmap[idx("z", i)] = z[i];
        a.vmap[idx("s", i)] = blk.s[i];
    }
    return a;
}

FormulationArtifact build_ksum(const Dataset& d, std::size_t q, const BigMBounds& b,
                               bool with_valid_inequality) {
    check_rank(d, q);
    if (q == d.n()) return build_chebyshev(d, b, FormulationTag::Ksum);
    FormulationArtifact a;
    fill_common(a, d, q, b, FormulationTag::Ksum);
    a.valid_inequality = with_valid_inequality;
    MilpModel& m = a.model;
    const std::size_t n = d.n();
    const double nq = static_cast<double>(n - q);

    ResidualBlock blk = add_residual_block(m, d, b, /*with_s=*/true);
    VarId t = m.add_continuous("t", 0.0, b.max_residual_bound());
    std::vector<VarId> v(n), dsel(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = m.add_continuous(idx("v", i), 0.0, b.residual_bound[i]);
        dsel[i] = m.add_binary(idx("d", i));
    }
    for (std::size_t i = 0; i < n; ++i)
        w[i] = add_mccormick_product(m, dsel[i], blk.s[i], idx("w", i));

    for (std::size_t i = 0; i < n; ++i)
        m.add_ge(idx("cover", i),
                 {{t, 1.0}, {v[i], 1.0}, {blk.rpos[i], -1.0}, {blk.rneg[i], -1.0}},
                 0.0);
    std::vector<LinTerm> budget;
    for (std::size_t i = 0; i < n; ++i) budget.push_back({dsel[i], 1.0});
    m.add_eq("budget", std::move(budget), nq);
    for (std::size_t i = 0; i < n; ++i)
        m.add_sos1(idx("sossplit", i), {blk.rpos[i], blk.rneg[i]});

    if (with_valid_inequality) {
        // tail-sum of the n-q largest magnitudes never exceeds the shorter
        // dual value: (n-q) t + sum v >= sum w
        std::vector<LinTerm> terms{{t, nq}};
        for (std::size_t i = 0; i < n; ++i) {
            terms.push_back({v[i], 1.0});
            terms.push_back({w[i], -1.0});
        }
        m.add_ge("tailbound", std::move(terms), 0.0);
    }

    std::vector<LinTerm> obj{{t, nq + 1.0}};
    for (std::size_t i = 0; i < n; ++i) {
        obj.push_back({v[i], 1.0});
        obj.push_back({w[i], -1.0});
    }
    m.set_objective(std::move(obj));

    a.beta_ids = blk.beta;
    a.vmap["t"] = t;
    for (std::size_t i = 0; i < n; ++i) {
        a.vmap[idx("v", i)] = v[i];
        a.vmap[idx("d", i)] = dsel[i];
        a.vmap[idx("s", i)] = blk.s[i];
    }
    return a;
}

FormulationArtifact build_bilevel_indicator(const Dataset& d, std::size_t q,
                                            const BigMBounds& b) {
    check_rank(d, q);
    if (q == d.n()) return build_chebyshev(d, b, FormulationTag::Bilevel);
    FormulationArtifact a;
    fill_common(a, d, q, b, FormulationTag::Bilevel);
    MilpModel& m = a.model;
    const std::size_t n = d.n();

    ResidualBlock blk = add_residual_block(m, d, b, /*with_s=*/true);
    VarId gamma = m.add_continuous("gamma", 0.0, b.max_residual_bound());
    std::vector<VarId> kappa(n);
    std::vector<LinTerm> count;
    for (std::size_t i = 0; i < n; ++i) {
        kappa[i] = m.add_binary(idx("kappa", i));
        count.push_back({kappa[i], 1.0});
    }
    m.add_ge("count", std::move(count), static_cast<double>(q));
    for (std::size_t i = 0; i < n; ++i) {
        LinearConstraint body;
        body.name = idx("below", i);
        body.terms = {{blk.s[i], 1.0}, {gamma, -1.0}};
        body.sense = ConstraintSense::LessEqual;
        body.rhs = 0.0;
        m.add_indicator(kappa[i], 1, std::move(body));
        m.add_sos1(idx("sossplit", i), {blk.rpos[i], blk.rneg[i]});
    }
    m.set_objective({{gamma, 1.0}});

    a.beta_ids = blk.beta;
    a.vmap["gamma"] = gamma;
    for (std::size_t i = 0; i < n; ++i) {
        a.vmap[idx("kappa", i)] = kappa[i];
        a.vmap[idx("s", i)] = blk.s[i];
    }
    return a;
}

FormulationArtifact build_strong_duality(const Dataset&, std::size_t,
                                         const BigMBounds&) {
    throw UnsupportedFormulation(
        "unsupported: bilinear — the strong-duality reformulation multiplies "
        "residual magnitudes by dual prices, and such products admit no "
        "McCormick linearization; use the indicator counting model instead");
}

std::vector<SortingCut> separate_sorting_cuts(
    const std::vector<std::vector<double>>& z, const std::vector<double>& s,
    double tol) {
    const std::size_t n = z.size();
    if (s.size() != n)
        throw std::invalid_argument("separate_sorting_cuts: size mismatch");
    // prefix[i][ell] = sum_{k <= ell} z_ik  (1-based ell, prefix[i][0] = 0)
    std::vector<std::vector<double>> prefix(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i].size() != n)
            throw std::invalid_argument("separate_sorting_cuts: ragged assignment");
        for (std::size_t k = 0; k < n; ++k)
            prefix[i][k + 1] = prefix[i][k] + z[i][k];
    }
    std::vector<SortingCut> cuts;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !(s[i] > s[j] + 1e-9)) continue;
            const double total_j = prefix[j][n];
            for (std::size_t ell = 1; ell < n; ++ell) {
                const double pattern = (total_j - prefix[j][ell]) + prefix[i][ell];
                if (pattern > 1.0 + tol)
                    cuts.push_back({i, j, ell, pattern - 1.0});
            }
        }
    }
    std::sort(cuts.begin(), cuts.end(), [](const SortingCut& a, const SortingCut& b) {
        if (a.violation != b.violation) return a.violation > b.violation;
        return std::tie(a.i, a.j, a.ell) < std::tie(b.i, b.j, b.ell);
    });
    return cuts;
}

FitResult decode(const FormulationArtifact& artifact, const SolveResult& solve_result,
                 const Dataset& d) {
    FitResult fit;
    fit.formulation = formulation_name(artifact.tag);
    fit.q = artifact.q;
    fit.status = solve_result.status;
    fit.bound = solve_result.bound;
    fit.solver_objective = solve_result.objective;
    fit.time_total = solve_result.time_total;
    fit.time_to_best = solve_result.time_to_best;
    fit.message = solve_result.message;
    if (!solve_result.has_incumbent()) return fit;

    fit.beta.resize(artifact.beta_ids.size());
    for (std::size_t j = 0; j < artifact.beta_ids.size(); ++j) {
        const std::string& name = artifact.model.var(artifact.beta_ids[j]).name;
        auto it = solve_result.incumbent.find(name);
        if (it == solve_result.incumbent.end())
            throw std::runtime_error("decode: incumbent is missing variable " + name);
        fit.beta[j] = it->second;
    }
    ResidualVector rv = residuals(d, fit.beta);
    fit.objective = qth_abs_residual(rv.s, artifact.q);
    fit.objective_mismatch =
        std::abs(solve_result.objective - fit.objective) >
        1e-6 * (1.0 + std::abs(fit.objective));
    return fit;
}

CertificateReport certify(const Dataset& d, std::size_t q, const FitResult& fit) {
    CertificateReport rep;
    ResidualVector rv = residuals(d, fit.beta);
    rep.recomputed = qth_abs_residual(rv.s, q);
    rep.objective_matches =
        std::abs(rep.recomputed - fit.objective) <=
        1e-7 * (1.0 + std::abs(fit.objective));
    for (double s : rv.s) {
        if (s <= rep.recomputed + 1e-7) ++rep.count_le;
        if (s < rep.recomputed - 1e-7) ++rep.count_lt;
    }
    rep.order_statistic_ok = rep.count_le >= q && rep.count_lt <= q - 1;
    return rep;
}

namespace {

MilpModel apply_policy(const MilpModel& m, const SolveParams& params) {
    if (params.sos_policy == SosPolicy::BigM) return lower_all(m);
    return m; // native constructs kept; the backend decides whether it copes
}

std::vector<std::vector<double>> extract_assignment(
    const FormulationArtifact& artifact, const SolveResult& res) {
    const std::size_t n = artifact.n;
    std::vector<std::vector<double>> z(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const std::string name = "z" + std::to_string(i) + "_" + std::to_string(k);
            auto it = res.incumbent.find(name);
            z[i][k] = it == res.incumbent.end() ? 0.0 : it->second;
        }
    return z;
}

} // namespace

FitResult solve_formulation(const FormulationArtifact& artifact, const Dataset& d,
                            MilpSolver& solver, const SolveParams& params) {
    params.validate();
    const bool lazy = artifact.tag == FormulationTag::SlPerm &&
                      artifact.cut_mode == SortingCutMode::Lemma1Iterative;
    if (!lazy) {
        SolveResult res = solver.solve(apply_policy(artifact.model, params), params);
        return decode(artifact, res, d);
    }

    // Lazy sorting cuts: solve, separate against the recomputed residual
    // order, lift violated patterns into rows, repeat. Each added row is
    // globally valid, so the working model stays a relaxation and the
    // final incumbent value is the exact optimum. A violated pair gets the
    // rows for every position threshold at once, which keeps the number of
    // separation rounds small.
    MilpModel working = artifact.model;
    const auto t0 = std::chrono::steady_clock::now();
    FitResult fit;
    std::size_t round = 0;
    const std::size_t max_rounds = 20 + artifact.n * artifact.n;
    double time_spent = 0.0;
    std::set<std::pair<std::size_t, std::size_t>> lifted_pairs;
    for (;; ++round) {
        SolveParams round_params = params;
        round_params.time_limit = std::max(1.0, params.time_limit - time_spent);
        SolveResult res = solver.solve(apply_policy(working, round_params), round_params);
        time_spent = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0).count();
        fit = decode(artifact, res, d);
        fit.cut_rounds = round + 1;
        fit.time_total = time_spent;
        if (!res.has_incumbent()) break;

        ResidualVector rv = residuals(d, fit.beta);
        std::vector<SortingCut> cuts =
            separate_sorting_cuts(extract_assignment(artifact, res), rv.s);
        if (cuts.empty()) {
            // assignment consistent with the residual order: the model
            // optimum certifies the decoded value
            fit.objective_mismatch = false;
            break;
        }
        if (round + 1 >= max_rounds || time_spent >= params.time_limit) {
            fit.status = SolveStatus::FeasibleTimeout;
            fit.message = "sorting-cut loop stopped after " +
                          std::to_string(round + 1) + " rounds";
            break;
        }
        for (const SortingCut& cut : cuts) {
            if (!lifted_pairs.insert({cut.i, cut.j}).second) continue;
            const double Mi = artifact.bounds.residual_bound[cut.i];
            VarId si = artifact.vmap.at(idx("s", cut.i));
            VarId sj = artifact.vmap.at(idx("s", cut.j));
            for (std::size_t ell = 1; ell < artifact.n; ++ell) {
                std::vector<LinTerm> terms{{si, 1.0}, {sj, -1.0}};
                for (std::size_t k = ell; k < artifact.n; ++k)
                    terms.push_back({artifact.vmap.at("z" + std::to_string(cut.j) +
                                                      "_" + std::to_string(k)),
                                     Mi});
                for (std::size_t k = 0; k < ell; ++k)
                    terms.push_back({artifact.vmap.at("z" + std::to_string(cut.i) +
                                                      "_" + std::to_string(k)),
                                     Mi});
                working.add_le("cut" + std::to_string(cut.i) + "_" +
                                   std::to_string(cut.j) + "_" + std::to_string(ell),
                               std::move(terms), 2.0 * Mi);
            }
        }
    }
    return fit;
}

} // namespace lqs
