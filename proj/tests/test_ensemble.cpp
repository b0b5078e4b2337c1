#include <doctest.h>

#include <cmath>
#include <set>

#include "bidomain/config.hpp"
#include "bidomain/ensemble.hpp"
#include "bidomain/noise.hpp"
#include "bidomain/verify.hpp"

using namespace bidomain;

namespace {

PathResult toy_path(int idx, std::uint64_t seed) {
    NormalSampler z(seed);
    (void)idx;
    double s = 0.0;
    for (int i = 0; i < 100; ++i) s += z.next();
    return {{"sum", s}, {"abs", std::fabs(s)}};
}

}  // namespace

TEST_CASE("single-path ensemble reproduces the path's functionals") {
    EnsembleSpec spec;
    spec.paths = 1;
    spec.master_seed = 5;
    EnsembleStats st = run_ensemble(spec, toy_path);
    PathResult direct = toy_path(0, derive_seed(5, 0));
    CHECK(st.at("sum").mean == direct.at("sum"));
    CHECK(st.at("sum").variance == 0.0);
    CHECK(st.at("sum").min == st.at("sum").max);
}

TEST_CASE("ensembles are bit-reproducible and mode-independent") {
    EnsembleSpec spec;
    spec.paths = 16;
    spec.master_seed = 17;
    spec.exec = ExecMode::OpenMP;
    EnsembleStats a = run_ensemble(spec, toy_path);
    EnsembleStats b = run_ensemble(spec, toy_path);
    CHECK(a.at("sum").mean == b.at("sum").mean);
    CHECK(a.at("sum").variance == b.at("sum").variance);

    spec.exec = ExecMode::Serial;
    EnsembleStats c = run_ensemble(spec, toy_path);
    CHECK(a.at("sum").mean == c.at("sum").mean);
    CHECK(a.at("sum").std_error == c.at("sum").std_error);
    CHECK(a.at("abs").max == c.at("abs").max);
    CHECK(a.seeds == c.seeds);
}

TEST_CASE("constant functionals have zero variance") {
    EnsembleSpec spec;
    spec.paths = 8;
    EnsembleStats st = run_ensemble(spec, [](int, std::uint64_t) -> PathResult {
        return {{"const", 3.25}};
    });
    CHECK(st.at("const").mean == 3.25);
    CHECK(st.at("const").variance == 0.0);
}

TEST_CASE("path failures carry the index and seed") {
    EnsembleSpec spec;
    spec.paths = 8;
    spec.master_seed = 23;
    auto fn = [](int idx, std::uint64_t) -> PathResult {
        if (idx == 3) throw std::runtime_error("synthetic failure");
        return {{"x", 1.0}};
    };
    try {
        run_ensemble(spec, fn);
        FAIL("expected PathFailure");
    } catch (const PathFailure& e) {
        CHECK(e.path == 3);
        CHECK(e.seed == derive_seed(23, 3));
    }
}

TEST_CASE("standard error decays like 1/sqrt(M) on a doubling ladder") {
    auto se_at = [&](int paths) {
        EnsembleSpec spec;
        spec.paths = paths;
        spec.master_seed = 99;
        return run_ensemble(spec, toy_path).at("sum").std_error;
    };
    const double se64 = se_at(64);
    const double se256 = se_at(256);
    // ratio should be near 1/2 (doubling twice); generous statistical band
    CHECK(se256 / se64 > 0.3);
    CHECK(se256 / se64 < 0.8);
}

TEST_CASE("standard error ladder on the additive-noise linear scenario") {
    ScenarioConfig cfg = default_config();
    cfg.basis.n = 2;
    cfg.membrane.enabled = false;
    cfg.noise_v = {"additive", 0.5, 1.0, 0.0};
    cfg.noise_w = {"additive", 0.0, 1.0, 0.0};
    cfg.initial.v_profile = "rest";
    cfg.initial.w_profile = "rest";
    cfg.time.T = 0.25;
    cfg.time.stepper = "euler-maruyama";
    Scenario sc = build_scenario(cfg);
    auto solver = std::make_shared<PathSolver>(sc.op, sc.run);
    auto fn = [&sc, solver](int, std::uint64_t seed) -> PathResult {
        TrajectoryRecord rec = solver->solve(sc.initial_state(seed), seed);
        return {{"v_final_sq", rec.c.col(rec.snapshots() - 1).squaredNorm()}};
    };
    auto se_at = [&](int paths) {
        EnsembleSpec spec;
        spec.paths = paths;
        spec.master_seed = cfg.ensemble.master_seed;
        return run_ensemble(spec, fn).at("v_final_sq").std_error;
    };
    const double ratio = se_at(256) / se_at(64);
    CHECK(ratio > 0.3);
    CHECK(ratio < 0.8);
}

TEST_CASE("common-increment pairs share seeds within and differ across pairs") {
    EnsembleSpec spec;
    spec.paths = 16;
    spec.master_seed = 7;
    spec.pairing = Pairing::CommonIncrements;
    auto pairs = pair_paths(spec);
    std::set<std::uint64_t> seen;
    for (const auto& [a, b] : pairs) {
        CHECK(a == b);
        CHECK(seen.insert(a).second);
    }
    spec.pairing = Pairing::Independent;
    CHECK_THROWS_AS(pair_paths(spec), std::invalid_argument);
}

TEST_CASE("paired scenario solves with identical data coincide") {
    ScenarioConfig cfg = default_config();
    cfg.basis.n = 4;
    cfg.time.T = 0.05;
    cfg.noise_v.kind = "multiplicative-affine";
    cfg.noise_v.strength = 0.3;
    cfg.noise_v.b1 = 0.5;
    Scenario sc = build_scenario(cfg);
    PathSolver solver(sc.op, sc.run);

    EnsembleSpec spec;
    spec.paths = 2;
    spec.master_seed = cfg.ensemble.master_seed;
    spec.pairing = Pairing::CommonIncrements;
    auto pairs = pair_paths(spec);
    WienerIncrements inc = sample_increments(4, sc.run.steps(), sc.run.dt, pairs[0].first);
    TrajectoryRecord a = solver.solve(sc.initial_state(pairs[0].first), inc);
    TrajectoryRecord b = solver.solve(sc.initial_state(pairs[0].second), inc);
    CHECK(a.c == b.c);
    CHECK(a.a == b.a);
}

TEST_CASE("ensemble spec validation") {
    EnsembleSpec spec;
    spec.paths = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
