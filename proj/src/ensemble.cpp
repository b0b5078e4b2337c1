#include "bidomain/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "bidomain/noise.hpp"

namespace bidomain {

void EnsembleSpec::validate() const {
    if (paths < 1) throw std::invalid_argument("ensemble: paths must be >= 1");
    if (threads < 0) throw std::invalid_argument("ensemble: threads must be >= 0");
}

const Moments& EnsembleStats::at(const std::string& key) const {
    auto it = functionals.find(key);
    if (it == functionals.end())
        throw std::out_of_range("ensemble stats: no functional named " + key);
    return it->second;
}

PathFailure::PathFailure(int path_, std::uint64_t seed_, const std::string& why)
    : std::runtime_error("path " + std::to_string(path_) + " (seed " +
                         std::to_string(seed_) + ") failed: " + why),
      path(path_),
      seed(seed_) {}

EnsembleStats run_ensemble(const EnsembleSpec& spec, const PathFn& fn,
                           std::vector<PathResult>* per_path) {
    spec.validate();
    const int M = spec.paths;

    std::vector<std::uint64_t> seeds(M);
    for (int i = 0; i < M; ++i) seeds[i] = derive_seed(spec.master_seed, i);

    std::vector<PathResult> results(M);
    std::vector<std::string> errors(M);

    if (spec.exec == ExecMode::Serial) {
        for (int i = 0; i < M; ++i) {
            try {
                results[i] = fn(i, seeds[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    } else {
        const int nthreads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
        for (int i = 0; i < M; ++i) {
            try {
                results[i] = fn(i, seeds[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    }

    for (int i = 0; i < M; ++i)
        if (!errors[i].empty()) throw PathFailure(i, seeds[i], errors[i]);

    // index-ordered reduction: two passes for mean/variance, deterministic
    EnsembleStats stats;
    stats.paths = M;
    stats.master_seed = spec.master_seed;
    stats.seeds = seeds;

    for (const auto& [key, val] : results[0]) {
        (void)val;
        for (int i = 1; i < M; ++i)
            if (!results[i].count(key))
                throw PathFailure(i, seeds[i], "missing functional " + key);
        Moments m;
        double sum = 0.0;
        m.min = results[0].at(key);
        m.max = m.min;
        for (int i = 0; i < M; ++i) {
            const double x = results[i].at(key);
            sum += x;
            m.min = std::min(m.min, x);
            m.max = std::max(m.max, x);
        }
        m.mean = sum / M;
        double ss = 0.0;
        for (int i = 0; i < M; ++i) {
            const double d = results[i].at(key) - m.mean;
            ss += d * d;
        }
        m.variance = M > 1 ? ss / (M - 1) : 0.0;
        m.std_error = M > 1 ? std::sqrt(m.variance / M) : 0.0;
        stats.functionals[key] = m;
    }

    if (per_path) *per_path = std::move(results);
    return stats;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> pair_paths(const EnsembleSpec& spec) {
    spec.validate();
    if (spec.pairing != Pairing::CommonIncrements)
        throw std::invalid_argument("pair_paths: spec must request common-increments pairing");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out(spec.paths);
    for (int k = 0; k < spec.paths; ++k) {
        const std::uint64_t s = derive_seed(spec.master_seed, k);
        out[k] = {s, s};
    }
    return out;
}

}  // namespace bidomain
