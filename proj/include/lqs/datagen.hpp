#pragma once

#include "lqs/core.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lqs {

/// Deterministic cross-platform randomness: the bit-exact mt19937_64
/// stream with inverse-CDF sampling, so the same seed reproduces the same
/// instance on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform();                       // [0, 1)
    double normal(double mean, double sd);  // inverse-CDF
    std::uint64_t below(std::uint64_t bound); // unbiased integer in [0, bound)
  private:
    std::mt19937_64 eng_;
};

enum class CorruptionKind { A, B };

/// How the Gaussian scale parameters are read: Variance treats N(0, v)
/// as variance v, StdDev as standard deviation v.
enum class SigmaMode { Variance, StdDev };

struct SyntheticSpec {
    std::size_t n = 0;
    std::size_t p = 0;
    double pi = 0.0; // corrupted fraction in [0, 1]
    CorruptionKind kind = CorruptionKind::A;
    std::uint64_t seed = 0;
    SigmaMode sigma_mode = SigmaMode::Variance;
};

struct SyntheticInstance {
    Dataset data;
    std::vector<double> true_beta;
    std::vector<std::size_t> corrupted_covariate; // first coordinate shifted
    std::vector<std::size_t> corrupted_response;  // response shifted
    SyntheticSpec spec;
};

/// Gaussian design, unit coefficients, Gaussian noise; then exactly
/// floor(pi*n) rows corrupted by a +1000 shift: kind A shifts the first
/// covariate of all of them, kind B shifts the covariate for the first
/// half (rounded down) and the response for the rest.
SyntheticInstance generate_synthetic(const SyntheticSpec& spec);

/// RFC-4180-style CSV with a header row; selected columns must parse as
/// numbers. Errors name the offending row and column.
Dataset load_csv(const std::string& path, const std::string& response_column,
                 const std::vector<std::string>& covariate_columns,
                 bool add_intercept);

/// Self-describing JSON-lines instance container.
void save_instance(const SyntheticInstance& inst, const std::string& path);
SyntheticInstance load_instance(const std::string& path);
std::string instance_to_string(const SyntheticInstance& inst);
SyntheticInstance instance_from_string(const std::string& text);

/// (f_m - f_star) / f_star * 100; f_star must be positive.
double relative_accuracy(double f_m, double f_star);

/// FNV-1a over the serialized dataset; identifies the aggregation source.
std::uint64_t dataset_hash(const Dataset& d);

} // namespace lqs
