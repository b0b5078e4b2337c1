#include "bidomain/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bidomain {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error([&] {
          std::string s = "invalid config:";
          for (const auto& e : v) s += "\n  " + e;
          return s;
      }()),
      violations(std::move(v)) {}

ScenarioConfig default_config() { return ScenarioConfig{}; }

namespace {

const std::set<std::string> kFaces1D = {"x-", "x+"};
const std::set<std::string> kFaces2D = {"x-", "x+", "y-", "y+"};

struct Reader {
    std::vector<std::string> errs;

    void check_keys(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            errs.push_back(path + ": expected an object");
            return;
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) errs.push_back(path + "/" + it.key() + ": unknown key");
    }

    template <typename T>
    void get(const json& j, const std::string& path, const char* key, T& out) {
        if (!j.is_object() || !j.contains(key)) return;
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception&) {
            errs.push_back(path + "/" + key + ": wrong type");
        }
    }

    void require(bool cond, const std::string& msg) {
        if (!cond) errs.push_back(msg);
    }
};

void read_noise_channel(Reader& r, const json& j, const std::string& path,
                        NoiseChannelConfig& nc) {
    r.check_keys(j, path, {"kind", "strength", "b0", "b1"});
    r.get(j, path, "kind", nc.kind);
    r.get(j, path, "strength", nc.strength);
    r.get(j, path, "b0", nc.b0);
    r.get(j, path, "b1", nc.b1);
    r.require(nc.kind == "additive" || nc.kind == "multiplicative-affine",
              path + "/kind: must be \"additive\" or \"multiplicative-affine\"");
    r.require(nc.strength >= 0.0, path + "/strength: must be >= 0");
    if (nc.kind == "additive")
        r.require(nc.b1 == 0.0, path + "/b1: must be 0 for additive noise");
}

ScenarioConfig parse_json(const json& root) {
    Reader r;
    ScenarioConfig c;

    r.check_keys(root, "", {"version", "domain", "basis", "epsilon", "membrane",
                            "conductivity", "noise", "initial", "time", "ensemble",
                            "output"});
    r.get(root, "", "version", c.version);
    r.require(c.version == 1, "/version: must be 1");

    if (root.contains("domain")) {
        const json& j = root["domain"];
        r.check_keys(j, "/domain", {"dim", "lengths", "dirichlet_faces", "neumann_faces"});
        r.get(j, "/domain", "dim", c.domain.dim);
        r.get(j, "/domain", "lengths", c.domain.lengths);
        r.get(j, "/domain", "dirichlet_faces", c.domain.dirichlet_faces);
        if (j.is_object() && j.contains("neumann_faces")) {
            c.domain.neumann_given = true;
            r.get(j, "/domain", "neumann_faces", c.domain.neumann_faces);
        }
    }
    r.require(c.domain.dim == 1 || c.domain.dim == 2, "/domain/dim: must be 1 or 2");
    if (c.domain.dim == 1 || c.domain.dim == 2) {
        r.require(static_cast<int>(c.domain.lengths.size()) == c.domain.dim,
                  "/domain/lengths: need one entry per axis");
        for (double L : c.domain.lengths)
            r.require(L > 0.0, "/domain/lengths: must be strictly positive");
        const auto& faces = c.domain.dim == 1 ? kFaces1D : kFaces2D;
        std::set<std::string> dset;
        for (const auto& f : c.domain.dirichlet_faces) {
            r.require(faces.count(f) > 0, "/domain/dirichlet_faces: unknown face " + f);
            r.require(dset.insert(f).second, "/domain/dirichlet_faces: duplicate face " + f);
        }
        r.require(!c.domain.dirichlet_faces.empty(),
                  "/domain/dirichlet_faces: must be nonempty (a Dirichlet part of the "
                  "boundary is required)");
        if (c.domain.neumann_given) {
            std::set<std::string> nset(c.domain.neumann_faces.begin(),
                                       c.domain.neumann_faces.end());
            std::set<std::string> expect;
            for (const auto& f : faces)
                if (!dset.count(f)) expect.insert(f);
            r.require(nset == expect,
                      "/domain/neumann_faces: must be exactly the complement of "
                      "dirichlet_faces");
        }
    }

    if (root.contains("basis")) {
        const json& j = root["basis"];
        r.check_keys(j, "/basis", {"n", "quad_points"});
        r.get(j, "/basis", "n", c.basis.n);
        r.get(j, "/basis", "quad_points", c.basis.quad_points);
    }
    r.require(c.basis.n >= 1, "/basis/n: must be >= 1");
    r.require(c.basis.quad_points >= 0, "/basis/quad_points: must be >= 0");

    if (root.contains("epsilon")) {
        const json& j = root["epsilon"];
        r.check_keys(j, "/epsilon", {"policy", "value"});
        r.get(j, "/epsilon", "policy", c.epsilon.policy);
        r.get(j, "/epsilon", "value", c.epsilon.value);
    }
    r.require(c.epsilon.policy == "tied" || c.epsilon.policy == "fixed",
              "/epsilon/policy: must be \"tied\" or \"fixed\"");
    if (c.epsilon.policy == "fixed")
        r.require(c.epsilon.value > 0.0, "/epsilon/value: must be > 0");

    if (root.contains("membrane")) {
        const json& j = root["membrane"];
        r.check_keys(j, "/membrane", {"enabled", "a", "eps", "kappa", "gamma"});
        r.get(j, "/membrane", "enabled", c.membrane.enabled);
        r.get(j, "/membrane", "a", c.membrane.a);
        r.get(j, "/membrane", "eps", c.membrane.eps);
        r.get(j, "/membrane", "kappa", c.membrane.kappa);
        r.get(j, "/membrane", "gamma", c.membrane.gamma);
    }
    if (c.membrane.enabled) {
        r.require(c.membrane.a > 0.0 && c.membrane.a < 1.0, "/membrane/a: must lie in (0,1)");
        r.require(c.membrane.eps > 0.0, "/membrane/eps: must be > 0");
        r.require(c.membrane.kappa >= 0.0, "/membrane/kappa: must be >= 0");
        r.require(c.membrane.gamma >= 0.0, "/membrane/gamma: must be >= 0");
    }

    if (root.contains("conductivity")) {
        const json& j = root["conductivity"];
        r.check_keys(j, "/conductivity",
                     {"kind", "sigma_l_i", "sigma_t_i", "sigma_l_e", "sigma_t_e",
                      "fiber_angle_deg", "fiber_twist_deg"});
        r.get(j, "/conductivity", "kind", c.conductivity.kind);
        r.get(j, "/conductivity", "sigma_l_i", c.conductivity.sigma_l_i);
        r.get(j, "/conductivity", "sigma_t_i", c.conductivity.sigma_t_i);
        r.get(j, "/conductivity", "sigma_l_e", c.conductivity.sigma_l_e);
        r.get(j, "/conductivity", "sigma_t_e", c.conductivity.sigma_t_e);
        r.get(j, "/conductivity", "fiber_angle_deg", c.conductivity.fiber_angle_deg);
        r.get(j, "/conductivity", "fiber_twist_deg", c.conductivity.fiber_twist_deg);
    }
    r.require(c.conductivity.kind == "constant" || c.conductivity.kind == "axisymmetric",
              "/conductivity/kind: must be \"constant\" or \"axisymmetric\"");
    for (double s : {c.conductivity.sigma_l_i, c.conductivity.sigma_t_i,
                     c.conductivity.sigma_l_e, c.conductivity.sigma_t_e})
        r.require(s > 0.0, "/conductivity: all sigma values must be > 0");

    if (root.contains("noise")) {
        const json& j = root["noise"];
        r.check_keys(j, "/noise", {"v", "w"});
        if (j.is_object() && j.contains("v")) read_noise_channel(r, j["v"], "/noise/v", c.noise_v);
        if (j.is_object() && j.contains("w")) read_noise_channel(r, j["w"], "/noise/w", c.noise_w);
    }

    if (root.contains("initial")) {
        const json& j = root["initial"];
        r.check_keys(j, "/initial",
                     {"v_profile", "amplitude", "center", "width", "w_profile",
                      "w_amplitude", "split", "perturbation_std"});
        r.get(j, "/initial", "v_profile", c.initial.v_profile);
        r.get(j, "/initial", "amplitude", c.initial.amplitude);
        r.get(j, "/initial", "center", c.initial.center);
        r.get(j, "/initial", "width", c.initial.width);
        r.get(j, "/initial", "w_profile", c.initial.w_profile);
        r.get(j, "/initial", "w_amplitude", c.initial.w_amplitude);
        r.get(j, "/initial", "split", c.initial.split);
        r.get(j, "/initial", "perturbation_std", c.initial.perturbation_std);
    }
    for (const auto* p : {&c.initial.v_profile, &c.initial.w_profile})
        r.require(*p == "rest" || *p == "gaussian-bump",
                  "/initial: profiles must be \"rest\" or \"gaussian-bump\"");
    r.require(c.initial.width > 0.0, "/initial/width: must be > 0");
    r.require(static_cast<int>(c.initial.center.size()) == c.domain.dim,
              "/initial/center: need one entry per axis");
    r.require(c.initial.split == "ui" || c.initial.split == "symmetric",
              "/initial/split: must be \"ui\" or \"symmetric\"");
    r.require(c.initial.perturbation_std >= 0.0, "/initial/perturbation_std: must be >= 0");

    if (root.contains("time")) {
        const json& j = root["time"];
        r.check_keys(j, "/time", {"dt", "T", "stepper", "snapshot_stride", "blowup_threshold"});
        r.get(j, "/time", "dt", c.time.dt);
        r.get(j, "/time", "T", c.time.T);
        r.get(j, "/time", "stepper", c.time.stepper);
        r.get(j, "/time", "snapshot_stride", c.time.snapshot_stride);
        r.get(j, "/time", "blowup_threshold", c.time.blowup_threshold);
    }
    r.require(c.time.dt > 0.0, "/time/dt: must be > 0");
    r.require(c.time.T >= c.time.dt, "/time/T: must be >= dt");
    if (c.time.dt > 0.0 && c.time.T >= c.time.dt) {
        const long long m = std::llround(c.time.T / c.time.dt);
        r.require(std::fabs(m * c.time.dt - c.time.T) <= 1e-9 * std::max(1.0, c.time.T),
                  "/time/T: must be an integer multiple of dt");
        r.require(c.time.snapshot_stride >= 1 && m % std::max(1, c.time.snapshot_stride) == 0,
                  "/time/snapshot_stride: must divide the step count");
    }
    r.require(c.time.stepper == "semi-implicit" || c.time.stepper == "euler-maruyama",
              "/time/stepper: must be \"semi-implicit\" or \"euler-maruyama\"");
    r.require(c.time.blowup_threshold > 0.0, "/time/blowup_threshold: must be > 0");

    if (root.contains("ensemble")) {
        const json& j = root["ensemble"];
        r.check_keys(j, "/ensemble", {"paths", "master_seed", "pairing", "exec", "threads"});
        r.get(j, "/ensemble", "paths", c.ensemble.paths);
        r.get(j, "/ensemble", "master_seed", c.ensemble.master_seed);
        r.get(j, "/ensemble", "pairing", c.ensemble.pairing);
        r.get(j, "/ensemble", "exec", c.ensemble.exec);
        r.get(j, "/ensemble", "threads", c.ensemble.threads);
    }
    r.require(c.ensemble.paths >= 1, "/ensemble/paths: must be >= 1");
    r.require(c.ensemble.pairing == "independent" || c.ensemble.pairing == "common-increments",
              "/ensemble/pairing: must be \"independent\" or \"common-increments\"");
    r.require(c.ensemble.exec == "openmp" || c.ensemble.exec == "serial",
              "/ensemble/exec: must be \"openmp\" or \"serial\"");
    r.require(c.ensemble.threads >= 0, "/ensemble/threads: must be >= 0");

    if (root.contains("output")) {
        const json& j = root["output"];
        r.check_keys(j, "/output", {"dir"});
        r.get(j, "/output", "dir", c.output.dir);
    }

    if (!r.errs.empty()) throw ConfigError(std::move(r.errs));
    return c;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    return parse_json(root);
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file: " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
    json j;
    j["version"] = c.version;
    j["domain"]["dim"] = c.domain.dim;
    j["domain"]["lengths"] = c.domain.lengths;
    j["domain"]["dirichlet_faces"] = c.domain.dirichlet_faces;
    j["basis"]["n"] = c.basis.n;
    j["basis"]["quad_points"] = c.basis.quad_points;
    j["epsilon"]["policy"] = c.epsilon.policy;
    j["epsilon"]["value"] = c.epsilon.value;
    j["membrane"]["enabled"] = c.membrane.enabled;
    j["membrane"]["a"] = c.membrane.a;
    j["membrane"]["eps"] = c.membrane.eps;
    j["membrane"]["kappa"] = c.membrane.kappa;
    j["membrane"]["gamma"] = c.membrane.gamma;
    j["conductivity"]["kind"] = c.conductivity.kind;
    j["conductivity"]["sigma_l_i"] = c.conductivity.sigma_l_i;
    j["conductivity"]["sigma_t_i"] = c.conductivity.sigma_t_i;
    j["conductivity"]["sigma_l_e"] = c.conductivity.sigma_l_e;
    j["conductivity"]["sigma_t_e"] = c.conductivity.sigma_t_e;
    j["conductivity"]["fiber_angle_deg"] = c.conductivity.fiber_angle_deg;
    j["conductivity"]["fiber_twist_deg"] = c.conductivity.fiber_twist_deg;
    auto noise_json = [](const NoiseChannelConfig& nc) {
        json v;
        v["kind"] = nc.kind;
        v["strength"] = nc.strength;
        v["b0"] = nc.b0;
        v["b1"] = nc.b1;
        return v;
    };
    j["noise"]["v"] = noise_json(c.noise_v);
    j["noise"]["w"] = noise_json(c.noise_w);
    j["initial"]["v_profile"] = c.initial.v_profile;
    j["initial"]["amplitude"] = c.initial.amplitude;
    j["initial"]["center"] = c.initial.center;
    j["initial"]["width"] = c.initial.width;
    j["initial"]["w_profile"] = c.initial.w_profile;
    j["initial"]["w_amplitude"] = c.initial.w_amplitude;
    j["initial"]["split"] = c.initial.split;
    j["initial"]["perturbation_std"] = c.initial.perturbation_std;
    j["time"]["dt"] = c.time.dt;
    j["time"]["T"] = c.time.T;
    j["time"]["stepper"] = c.time.stepper;
    j["time"]["snapshot_stride"] = c.time.snapshot_stride;
    j["time"]["blowup_threshold"] = c.time.blowup_threshold;
    j["ensemble"]["paths"] = c.ensemble.paths;
    j["ensemble"]["master_seed"] = c.ensemble.master_seed;
    j["ensemble"]["pairing"] = c.ensemble.pairing;
    j["ensemble"]["exec"] = c.ensemble.exec;
    j["ensemble"]["threads"] = c.ensemble.threads;
    j["output"]["dir"] = c.output.dir;
    return j.dump(2);
}

Domain make_domain(const DomainConfig& dc) {
    Domain d;
    d.dim = dc.dim;
    for (int a = 0; a < d.dim; ++a) d.lengths[a] = dc.lengths[a];
    for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 2; ++s) d.bc[a][s] = Bc::Neumann;
    for (const auto& f : dc.dirichlet_faces) {
        const int axis = f[0] == 'x' ? 0 : 1;
        const int side = f[1] == '-' ? 0 : 1;
        d.bc[axis][side] = Bc::Dirichlet;
    }
    d.validate();
    return d;
}

ConductivityField make_conductivity(const ConductivityConfig& cc) {
    ConductivityField f;
    f.kind = cc.kind == "constant" ? ConductivityField::Kind::Constant
                                   : ConductivityField::Kind::Axisymmetric;
    f.sigma_l_i = cc.sigma_l_i;
    f.sigma_t_i = cc.sigma_t_i;
    f.sigma_l_e = cc.sigma_l_e;
    f.sigma_t_e = cc.sigma_t_e;
    const double deg = 3.14159265358979323846 / 180.0;
    f.fiber_angle = cc.fiber_angle_deg * deg;
    f.fiber_twist = cc.fiber_twist_deg * deg;
    f.validate();
    return f;
}

Stepper parse_stepper(const std::string& s) {
    return s == "euler-maruyama" ? Stepper::EulerMaruyama : Stepper::SemiImplicit;
}

namespace {

std::function<double(const double*)> bump(const InitialConfig& init, const Domain& dom,
                                          bool for_w) {
    const std::string profile = for_w ? init.w_profile : init.v_profile;
    const double amp = for_w ? init.w_amplitude : init.amplitude;
    if (profile == "rest" || amp == 0.0) return [](const double*) { return 0.0; };
    std::vector<double> center = init.center;
    const double w2 = 2.0 * init.width * init.width;
    const int dim = dom.dim;
    return [amp, center, w2, dim](const double* x) {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        return amp * std::exp(-r2 / w2);
    };
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& cfg, int n_override, double eps_override) {
    Scenario sc;
    sc.cfg = cfg;
    const int n = n_override > 0 ? n_override : cfg.basis.n;

    Domain dom = make_domain(cfg.domain);
    sc.basis = std::make_shared<const BasisSet>(build_basis(dom, n, cfg.basis.quad_points));
    sc.cond = make_conductivity(cfg.conductivity);

    MatrixXd K_i = assemble_stiffness(*sc.basis, sc.cond, Tissue::Intra);
    MatrixXd K_e = assemble_stiffness(*sc.basis, sc.cond, Tissue::Extra);

    if (eps_override > 0.0)
        sc.epsilon = eps_override;
    else
        sc.epsilon = cfg.epsilon.policy == "tied" ? 1.0 / n : cfg.epsilon.value;

    MembraneModel mem = cfg.membrane.enabled
                            ? MembraneModel::fitzhugh_nagumo(cfg.membrane.a, cfg.membrane.eps,
                                                             cfg.membrane.kappa,
                                                             cfg.membrane.gamma)
                            : MembraneModel::disabled_model();

    auto make_noise = [n](const NoiseChannelConfig& nc) {
        if (nc.kind == "additive") return NoiseModel::additive(nc.strength, n, nc.b0);
        return NoiseModel::mixed(nc.strength, n, nc.b0, nc.b1);
    };

    sc.op = std::make_shared<const GalerkinOperator>(sc.basis, std::move(K_i), std::move(K_e),
                                                     std::move(mem), make_noise(cfg.noise_v),
                                                     make_noise(cfg.noise_w), sc.epsilon);

    sc.run.dt = cfg.time.dt;
    sc.run.T = cfg.time.T;
    sc.run.stepper = parse_stepper(cfg.time.stepper);
    sc.run.snapshot_stride = cfg.time.snapshot_stride;
    sc.run.blowup_threshold = cfg.time.blowup_threshold;
    sc.run.validate();

    VectorXd v0 = sc.basis->project(bump(cfg.initial, dom, false));
    sc.a0 = sc.basis->project(bump(cfg.initial, dom, true));
    if (cfg.initial.split == "ui") {
        sc.ci0 = v0;
        sc.ce0 = VectorXd::Zero(n);
    } else {
        sc.ci0 = 0.5 * v0;
        sc.ce0 = -0.5 * v0;
    }
    return sc;
}

GalerkinState Scenario::initial_state(std::uint64_t path_seed) const {
    const int n = basis->n;
    VectorXd ci = ci0, ce = ce0, a = a0;
    if (cfg.initial.perturbation_std > 0.0) {
        NormalSampler z(derive_stream(path_seed, kStreamInit));
        for (int l = 0; l < n; ++l)
            ci(l) += cfg.initial.perturbation_std * z.next() / (l + 1);
        for (int l = 0; l < n; ++l)
            a(l) += cfg.initial.perturbation_std * z.next() / (l + 1);
    }
    const double se = std::sqrt(epsilon);
    GalerkinState s;
    s.ci_s = se * ci;
    s.ce_s = se * ce;
    s.c = (s.ci_s - s.ce_s) / se;
    s.a = a;
    s.t = 0.0;
    return s;
}

}  // namespace bidomain
