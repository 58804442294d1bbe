#include "lqs/scale.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

using nlohmann::json;

namespace lqs {

std::size_t AggregateDataset::total() const {
    std::size_t n = 0;
    for (std::size_t w : weights) n += w;
    return n;
}

namespace {

// Joint (x, y) rows in standardized coordinates for clustering.
std::vector<std::vector<double>> standardized_points(const Dataset& d) {
    const std::size_t n = d.n(), p = d.p(), dim = p + 1;
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) pts[i][j] = d.X[i][j];
        pts[i][p] = d.y[i];
    }
    for (std::size_t j = 0; j < dim; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += pts[i][j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = pts[i][j] - mean;
            var += c * c;
        }
        double sd = std::sqrt(var / static_cast<double>(n));
        if (sd == 0.0) sd = 1.0;
        for (std::size_t i = 0; i < n; ++i) pts[i][j] = (pts[i][j] - mean) / sd;
    }
    return pts;
}

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double c = a[j] - b[j];
        s += c * c;
    }
    return s;
}

} // namespace

AggregateDataset aggregate(const Dataset& d, std::size_t k, std::uint64_t seed) {
    d.validate();
    const std::size_t n = d.n();
    if (k < 1 || k > n)
        throw std::invalid_argument("aggregate: k must lie in [1, n]");

    const std::vector<std::vector<double>> pts = standardized_points(d);
    const std::size_t dim = pts[0].size();
    Rng rng(seed);

    // k-means++ seeding
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    centers.push_back(pts[rng.below(n)]);
    std::vector<double> dist2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = sqdist(pts[i], centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c)
                best = std::min(best, sqdist(pts[i], centers[c]));
            dist2[i] = best;
            total += best;
        }
        std::size_t chosen;
        if (total <= 0.0) {
            chosen = rng.below(n);
        } else {
            double target = rng.uniform() * total;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= dist2[i];
                if (target <= 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        centers.push_back(pts[chosen]);
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (int iter = 0; iter < 100; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bestd = sqdist(pts[i], centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double dd = sqdist(pts[i], centers[c]);
                if (dd < bestd) {
                    bestd = dd;
                    best = c;
                }
            }
            assign[i] = best;
        }
        for (std::size_t c = 0; c < k; ++c) {
            std::fill(sums[c].begin(), sums[c].end(), 0.0);
            counts[c] = 0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (std::size_t j = 0; j < dim; ++j) sums[assign[i]][j] += pts[i][j];
        }
        // repair empty clusters with the farthest point of the largest one
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t big = 0;
            for (std::size_t c2 = 1; c2 < k; ++c2)
                if (counts[c2] > counts[big]) big = c2;
            std::size_t far = n;
            double fard = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i] != big) continue;
                const double dd = sqdist(pts[i], centers[big]);
                if (dd > fard) {
                    fard = dd;
                    far = i;
                }
            }
            if (far == n) continue;
            for (std::size_t j = 0; j < dim; ++j) {
                sums[big][j] -= pts[far][j];
                sums[c][j] += pts[far][j];
            }
            --counts[big];
            counts[c] = 1;
            assign[far] = c;
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < dim; ++j) {
                const double next = sums[c][j] / static_cast<double>(counts[c]);
                shift = std::max(shift, std::abs(next - centers[c][j]));
                centers[c][j] = next;
            }
        }
        if (shift <= 1e-8) break;
    }

    AggregateDataset a;
    a.members.assign(k, {});
    for (std::size_t i = 0; i < n; ++i) a.members[assign[i]].push_back(i);
    // drop any still-empty cluster (k was larger than distinct points)
    a.members.erase(std::remove_if(a.members.begin(), a.members.end(),
                                   [](const auto& m) { return m.empty(); }),
                    a.members.end());
    a.weights.resize(a.members.size());
    a.reps.has_intercept = d.has_intercept;
    for (std::size_t c = 0; c < a.members.size(); ++c) {
        a.weights[c] = a.members[c].size();
        std::vector<double> rep(d.p(), 0.0);
        double repy = 0.0;
        for (std::size_t i : a.members[c]) {
            for (std::size_t j = 0; j < d.p(); ++j) rep[j] += d.X[i][j];
            repy += d.y[i];
        }
        for (double& v : rep) v /= static_cast<double>(a.weights[c]);
        repy /= static_cast<double>(a.weights[c]);
        if (d.has_intercept) rep[0] = 1.0; // mean of an all-ones column
        a.reps.X.push_back(std::move(rep));
        a.reps.y.push_back(repy);
    }
    a.source_hash = dataset_hash(d);
    return a;
}

double compute_D(const Dataset& d, const AggregateDataset& a,
                 const BigMBounds& beta_box, RadiusMode mode) {
    if (a.total() != d.n())
        throw std::invalid_argument("compute_D: aggregate does not cover the dataset");
    const double B = beta_box.coeff_bound();
    double D = 0.0;
    for (std::size_t c = 0; c < a.k(); ++c) {
        for (std::size_t i : a.members[c]) {
            if (mode == RadiusMode::BetaBox) {
                double l1 = 0.0;
                for (std::size_t j = 0; j < d.p(); ++j)
                    l1 += std::abs(d.X[i][j] - a.reps.X[c][j]);
                D = std::max(D, std::abs(d.y[i] - a.reps.y[c]) + l1 * B);
            } else {
                double sq = 0.0;
                for (std::size_t j = 0; j < d.p(); ++j) {
                    const double dx = d.X[i][j] - a.reps.X[c][j];
                    sq += dx * dx;
                }
                const double dy = d.y[i] - a.reps.y[c];
                D = std::max(D, std::sqrt(sq + dy * dy));
            }
        }
    }
    return D;
}

FormulationArtifact build_weighted_formulation(const AggregateDataset& a,
                                               std::size_t q, const BigMBounds& b) {
    a.reps.validate();
    const std::size_t k = a.k();
    const std::size_t n = a.total();
    if (q < 1 || q > n)
        throw std::invalid_argument("build_weighted_formulation: q out of range");
    if (b.residual_bound.size() != k)
        throw std::invalid_argument(
            "build_weighted_formulation: bounds must be derived on the representatives");

    FormulationArtifact art;
    art.tag = FormulationTag::WeightedBigm;
    art.n = k;
    art.p = a.reps.p();
    art.q = q;
    art.bounds = b;
    MilpModel& m = art.model;

    std::vector<VarId> beta(art.p), rpos(k), rneg(k), s(k), z(k);
    for (std::size_t j = 0; j < art.p; ++j)
        beta[j] = m.add_continuous("beta" + std::to_string(j), b.beta_lo[j],
                                   b.beta_hi[j]);
    for (std::size_t i = 0; i < k; ++i) {
        const double Mi = b.residual_bound[i];
        rpos[i] = m.add_continuous("rpos" + std::to_string(i), 0.0, Mi);
        rneg[i] = m.add_continuous("rneg" + std::to_string(i), 0.0, Mi);
        s[i] = m.add_continuous("s" + std::to_string(i), 0.0, Mi);
        z[i] = m.add_binary("z" + std::to_string(i));
    }
    VarId omega = m.add_continuous("omega", 0.0, b.max_residual_bound());
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<LinTerm> terms{{rpos[i], 1.0}, {rneg[i], -1.0}};
        for (std::size_t j = 0; j < art.p; ++j)
            if (a.reps.X[i][j] != 0.0) terms.push_back({beta[j], a.reps.X[i][j]});
        m.add_eq("resid" + std::to_string(i), std::move(terms), a.reps.y[i]);
        m.add_eq("abs" + std::to_string(i),
                 {{rpos[i], 1.0}, {rneg[i], 1.0}, {s[i], -1.0}}, 0.0);
        m.add_le("cap" + std::to_string(i),
                 {{s[i], 1.0}, {omega, -1.0}, {z[i], -b.residual_bound[i]}}, 0.0);
    }
    std::vector<LinTerm> count;
    for (std::size_t i = 0; i < k; ++i)
        count.push_back({z[i], static_cast<double>(a.weights[i])});
    m.add_le("count", std::move(count), static_cast<double>(n - q));
    m.set_objective({{omega, 1.0}});

    art.beta_ids = beta;
    art.vmap["omega"] = omega;
    for (std::size_t i = 0; i < k; ++i) {
        art.vmap["z" + std::to_string(i)] = z[i];
        art.vmap["s" + std::to_string(i)] = s[i];
    }
    return art;
}

Theorem2Check theorem2_check(double fq_exact, double fq_aggregate_beta, double D) {
    Theorem2Check c;
    c.lhs = std::abs(fq_exact - fq_aggregate_beta);
    c.bound = 2.0 * D + 1e-6;
    c.pass = c.lhs <= c.bound;
    return c;
}

std::string aggregate_to_string(const AggregateDataset& a) {
    std::ostringstream out;
    out << json{{"type", "agg_meta"},
                {"version", 1},
                {"k", a.k()},
                {"n", a.total()},
                {"p", a.reps.p()},
                {"has_intercept", a.reps.has_intercept},
                {"radius", a.radius},
                {"source_hash", a.source_hash}}
               .dump()
        << "\n";
    for (std::size_t c = 0; c < a.k(); ++c) {
        out << json{{"type", "rep"},
                    {"x", a.reps.X[c]},
                    {"y", a.reps.y[c]},
                    {"weight", a.weights[c]},
                    {"members", a.members[c]}}
                   .dump()
            << "\n";
    }
    return out.str();
}

AggregateDataset aggregate_from_string(const std::string& text) {
    AggregateDataset a;
    std::istringstream in(text);
    std::string line;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj = json::parse(line);
        const std::string type = obj.at("type");
        if (type == "agg_meta") {
            have_meta = true;
            a.reps.has_intercept = obj.at("has_intercept");
            a.radius = obj.at("radius");
            a.source_hash = obj.at("source_hash");
        } else if (type == "rep") {
            a.reps.X.push_back(obj.at("x").get<std::vector<double>>());
            a.reps.y.push_back(obj.at("y").get<double>());
            a.weights.push_back(obj.at("weight").get<std::size_t>());
            a.members.push_back(obj.at("members").get<std::vector<std::size_t>>());
        } else {
            throw std::runtime_error("aggregate: unknown record type '" + type + "'");
        }
    }
    if (!have_meta) throw std::runtime_error("aggregate: missing meta record");
    return a;
}

} // namespace lqs
