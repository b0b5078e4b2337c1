#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidomain {

enum class Pairing { Independent, CommonIncrements };
enum class ExecMode { Serial, OpenMP };

struct EnsembleSpec {
    int paths = 1;
    std::uint64_t master_seed = 0;
    Pairing pairing = Pairing::Independent;
    ExecMode exec = ExecMode::OpenMP;
    int threads = 0;  // 0 = runtime default

    void validate() const;
};

/// Named scalar functionals produced by one path solve.
using PathResult = std::map<std::string, double>;
/// (path index, derived seed) -> functionals. Must be pure w.r.t. its inputs.
using PathFn = std::function<PathResult(int, std::uint64_t)>;

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double std_error = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct EnsembleStats {
    int paths = 0;
    std::uint64_t master_seed = 0;
    std::map<std::string, Moments> functionals;
    std::vector<std::uint64_t> seeds;  // per path, in index order

    const Moments& at(const std::string& key) const;
};

class PathFailure : public std::runtime_error {
public:
    PathFailure(int path, std::uint64_t seed, const std::string& why);
    int path;
    std::uint64_t seed;
};

/// Runs `fn` over all path indices and aggregates in fixed index order, so
/// serial and OpenMP execution produce bit-identical statistics. Any path
/// failure aborts the whole ensemble with the offending index and seed.
EnsembleStats run_ensemble(const EnsembleSpec& spec, const PathFn& fn,
                           std::vector<PathResult>* per_path = nullptr);

/// Seed pairs whose members share one increment stream (common random
/// numbers); pair k uses derive_seed(master, k) for both members.
std::vector<std::pair<std::uint64_t, std::uint64_t>> pair_paths(const EnsembleSpec& spec);

}  // namespace bidomain
