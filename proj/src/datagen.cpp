#include "lqs/datagen.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

using nlohmann::json;

namespace lqs {

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

namespace {

// Rational approximation to the standard normal quantile (Acklam); the
// absolute error is ~1e-9, well inside what seeded reproducibility needs.
double normal_quantile(double u) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    if (u < plow) {
        const double t = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
               ((((dd[0] * t + dd[1]) * t + dd[2]) * t + dd[3]) * t + 1.0);
    }
    if (u > phigh) {
        const double t = std::sqrt(-2.0 * std::log(1.0 - u));
        return -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
               ((((dd[0] * t + dd[1]) * t + dd[2]) * t + dd[3]) * t + 1.0);
    }
    const double t = u - 0.5;
    const double r = t * t;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double Rng::normal(double mean, double sd) {
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    return mean + sd * normal_quantile(u);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t v = eng_();
        if (v < limit) return v % bound;
    }
}

SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n < 1 || spec.p < 1 || spec.n < spec.p)
        throw std::invalid_argument("generate_synthetic: need n >= p >= 1");
    if (!(spec.pi >= 0.0 && spec.pi <= 1.0))
        throw std::invalid_argument("generate_synthetic: pi must lie in [0,1]");

    const double sx = spec.sigma_mode == SigmaMode::Variance ? std::sqrt(100.0) : 100.0;
    const double se = spec.sigma_mode == SigmaMode::Variance ? std::sqrt(10.0) : 10.0;

    Rng rng(spec.seed);
    SyntheticInstance inst;
    inst.spec = spec;
    inst.true_beta.assign(spec.p, 1.0);
    inst.data.has_intercept = false;
    inst.data.X.assign(spec.n, std::vector<double>(spec.p));
    inst.data.y.assign(spec.n, 0.0);
    // draw order: design row-major, then noise, then corruption choices
    for (std::size_t i = 0; i < spec.n; ++i)
        for (std::size_t j = 0; j < spec.p; ++j)
            inst.data.X[i][j] = rng.normal(0.0, sx);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double fit = std::inner_product(inst.data.X[i].begin(), inst.data.X[i].end(),
                                        inst.true_beta.begin(), 0.0);
        inst.data.y[i] = fit + rng.normal(0.0, se);
    }

    const std::size_t m = static_cast<std::size_t>(spec.pi * static_cast<double>(spec.n));
    std::vector<std::size_t> order(spec.n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(spec.n - i));
        std::swap(order[i], order[j]);
    }
    if (spec.kind == CorruptionKind::A) {
        for (std::size_t i = 0; i < m; ++i) {
            inst.data.X[order[i]][0] += 1000.0;
            inst.corrupted_covariate.push_back(order[i]);
        }
    } else {
        const std::size_t half = m / 2;
        for (std::size_t i = 0; i < half; ++i) {
            inst.data.X[order[i]][0] += 1000.0;
            inst.corrupted_covariate.push_back(order[i]);
        }
        for (std::size_t i = half; i < m; ++i) {
            inst.data.y[order[i]] += 1000.0;
            inst.corrupted_response.push_back(order[i]);
        }
    }
    return inst;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    if (quoted)
        throw std::runtime_error("csv: unterminated quote at line " +
                                 std::to_string(lineno));
    fields.push_back(cur);
    return fields;
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& response_column,
                 const std::vector<std::string>& covariate_columns,
                 bool add_intercept) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
    std::vector<std::string> header = split_csv_line(line, 1);

    auto column_of = [&](const std::string& name) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        throw std::runtime_error("csv: missing column '" + name + "' in " + path);
    };
    const std::size_t ycol = column_of(response_column);
    std::vector<std::size_t> xcols;
    for (const std::string& name : covariate_columns) xcols.push_back(column_of(name));

    Dataset d;
    d.has_intercept = add_intercept;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line, lineno);
        auto cell = [&](std::size_t j) {
            if (j >= fields.size())
                throw std::runtime_error("csv: row " + std::to_string(lineno) +
                                         " has only " + std::to_string(fields.size()) +
                                         " columns");
            try {
                std::size_t used = 0;
                double v = std::stod(fields[j], &used);
                if (used != fields[j].size()) throw std::invalid_argument(fields[j]);
                return v;
            } catch (const std::exception&) {
                throw std::runtime_error("csv: non-numeric cell '" + fields[j] +
                                         "' at row " + std::to_string(lineno) +
                                         ", column " + header[j]);
            }
        };
        std::vector<double> row;
        if (add_intercept) row.push_back(1.0);
        for (std::size_t j : xcols) row.push_back(cell(j));
        d.y.push_back(cell(ycol));
        d.X.push_back(std::move(row));
    }
    d.validate();
    return d;
}

std::string instance_to_string(const SyntheticInstance& inst) {
    std::ostringstream out;
    json meta = {
        {"type", "meta"},
        {"version", 1},
        {"n", inst.data.n()},
        {"p", inst.data.p()},
        {"has_intercept", inst.data.has_intercept},
        {"kind", inst.spec.kind == CorruptionKind::A ? "A" : "B"},
        {"pi", inst.spec.pi},
        {"seed", inst.spec.seed},
        {"sigma_mode",
         inst.spec.sigma_mode == SigmaMode::Variance ? "variance" : "stddev"},
    };
    out << meta.dump() << "\n";
    for (std::size_t i = 0; i < inst.data.n(); ++i) {
        json row = {{"type", "row"}, {"x", inst.data.X[i]}, {"y", inst.data.y[i]}};
        out << row.dump() << "\n";
    }
    if (!inst.true_beta.empty())
        out << json{{"type", "true_beta"}, {"beta", inst.true_beta}}.dump() << "\n";
    if (!inst.corrupted_covariate.empty() || !inst.corrupted_response.empty())
        out << json{{"type", "corrupted"},
                    {"covariate", inst.corrupted_covariate},
                    {"response", inst.corrupted_response}}
                   .dump()
            << "\n";
    return out.str();
}

SyntheticInstance instance_from_string(const std::string& text) {
    SyntheticInstance inst;
    std::istringstream in(text);
    std::string line;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj = json::parse(line);
        const std::string type = obj.at("type");
        if (type == "meta") {
            have_meta = true;
            inst.data.has_intercept = obj.at("has_intercept");
            inst.spec.n = obj.at("n");
            inst.spec.p = obj.at("p");
            inst.spec.pi = obj.at("pi");
            inst.spec.seed = obj.at("seed");
            inst.spec.kind =
                obj.at("kind") == "A" ? CorruptionKind::A : CorruptionKind::B;
            inst.spec.sigma_mode = obj.at("sigma_mode") == "variance"
                                       ? SigmaMode::Variance
                                       : SigmaMode::StdDev;
        } else if (type == "row") {
            inst.data.X.push_back(obj.at("x").get<std::vector<double>>());
            inst.data.y.push_back(obj.at("y").get<double>());
        } else if (type == "true_beta") {
            inst.true_beta = obj.at("beta").get<std::vector<double>>();
        } else if (type == "corrupted") {
            inst.corrupted_covariate =
                obj.at("covariate").get<std::vector<std::size_t>>();
            inst.corrupted_response =
                obj.at("response").get<std::vector<std::size_t>>();
        } else {
            throw std::runtime_error("instance: unknown record type '" + type + "'");
        }
    }
    if (!have_meta) throw std::runtime_error("instance: missing meta record");
    inst.data.validate();
    return inst;
}

void save_instance(const SyntheticInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("instance: cannot write " + path);
    out << instance_to_string(inst);
}

SyntheticInstance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("instance: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return instance_from_string(ss.str());
}

double relative_accuracy(double f_m, double f_star) {
    if (!(f_star > 0.0))
        throw std::invalid_argument(
            "relative_accuracy: reference objective must be positive");
    return (f_m - f_star) / f_star * 100.0;
}

std::uint64_t dataset_hash(const Dataset& d) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int s = 0; s < 64; s += 8) {
            h ^= (bits >> s) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<double>(d.n()));
    mix(static_cast<double>(d.p()));
    for (std::size_t i = 0; i < d.n(); ++i) {
        mix(d.y[i]);
        for (double x : d.X[i]) mix(x);
    }
    return h;
}

} // namespace lqs
