#include "bidomain/galerkin.hpp"

#include <cmath>
#include <sstream>

namespace bidomain {

GalerkinState GalerkinState::zero(int n) {
    GalerkinState s;
    s.c = VectorXd::Zero(n);
    s.ci_s = VectorXd::Zero(n);
    s.ce_s = VectorXd::Zero(n);
    s.a = VectorXd::Zero(n);
    return s;
}

VectorXd GalerkinState::flat() const {
    const int n = this->n();
    VectorXd x(4 * n);
    x.segment(0, n) = c;
    x.segment(n, n) = ci_s;
    x.segment(2 * n, n) = ce_s;
    x.segment(3 * n, n) = a;
    return x;
}

GalerkinState GalerkinState::from_flat(const VectorXd& x, double t) {
    const int n = static_cast<int>(x.size()) / 4;
    GalerkinState s;
    s.c = x.segment(0, n);
    s.ci_s = x.segment(n, n);
    s.ce_s = x.segment(2 * n, n);
    s.a = x.segment(3 * n, n);
    s.t = t;
    return s;
}

double GalerkinState::consistency_gap(double epsilon) const {
    const double se = std::sqrt(epsilon);
    return ((ci_s - ce_s) / se - c).cwiseAbs().maxCoeff();
}

VectorXd DriftBlocks::flat() const {
    const int n = static_cast<int>(F_ie.size());
    VectorXd x(4 * n);
    x.segment(0, n) = F_ie;
    x.segment(n, n) = F_i;
    x.segment(2 * n, n) = F_e;
    x.segment(3 * n, n) = F_H;
    return x;
}

double DiffusionBlocks::frobenius_sq() const {
    const double g = (4.0 + 2.0 * epsilon) / ((2.0 + epsilon) * (2.0 + epsilon));
    return g * p_v.squaredNorm() * gamma_v.squaredNorm() +
           p_w.squaredNorm() * gamma_w.squaredNorm();
}

void DiffusionBlocks::apply(const VectorXd& dWv, const VectorXd& dWw, VectorXd& out_c,
                            VectorXd& out_ci, VectorXd& out_ce, VectorXd& out_a) const {
    const double s = gamma_v.dot(dWv);
    const double z = gamma_w.dot(dWw);
    const double se = std::sqrt(epsilon);
    out_c = (2.0 / (2.0 + epsilon)) * s * p_v;
    out_ci = (se / (2.0 + epsilon)) * s * p_v;
    out_ce = -out_ci;
    out_a = z * p_w;
}

int RunConfig::steps() const {
    const long long m = std::llround(T / dt);
    return static_cast<int>(m);
}

void RunConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
    if (!(T >= dt)) throw std::invalid_argument("run: T must be >= dt");
    const long long m = std::llround(T / dt);
    if (m < 1 || std::fabs(m * dt - T) > 1e-9 * std::max(1.0, T))
        throw std::invalid_argument("run: T must be an integer multiple of dt");
    if (snapshot_stride < 1 || m % snapshot_stride != 0)
        throw std::invalid_argument("run: snapshot_stride must divide the step count");
    if (!(blowup_threshold > 0.0))
        throw std::invalid_argument("run: blowup_threshold must be positive");
}

GalerkinState TrajectoryRecord::state_at(int snap) const {
    GalerkinState s;
    s.c = c.col(snap);
    if (ci_s.rows() > 0) {
        s.ci_s = ci_s.col(snap);
        s.ce_s = ce_s.col(snap);
    } else {
        s.ci_s = VectorXd::Zero(c.rows());
        s.ce_s = VectorXd::Zero(c.rows());
    }
    s.a = a.col(snap);
    s.t = times(snap);
    return s;
}

PathBlowup::PathBlowup(int step_, double t_, double energy_)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "path blew up at step " << step_ << " (t=" << t_
             << "), |C|^2=" << energy_;
          return os.str();
      }()),
      step(step_),
      t(t_),
      energy(energy_) {}

GalerkinOperator::GalerkinOperator(std::shared_ptr<const BasisSet> basis, MatrixXd K_i,
                                   MatrixXd K_e, MembraneModel membrane, NoiseModel noise_v,
                                   NoiseModel noise_w, double epsilon)
    : basis_(std::move(basis)),
      K_i_(std::move(K_i)),
      K_e_(std::move(K_e)),
      membrane_(std::move(membrane)),
      noise_v_(std::move(noise_v)),
      noise_w_(std::move(noise_w)),
      eps_(epsilon) {
    if (!(eps_ > 0.0)) throw std::invalid_argument("galerkin: epsilon must be positive");
    const int n = basis_->n;
    if (K_i_.rows() != n || K_e_.rows() != n)
        throw std::invalid_argument("galerkin: stiffness dimension mismatch");
    if (noise_v_.truncation != n || noise_w_.truncation != n)
        throw std::invalid_argument("galerkin: noise truncation must equal basis size");
    if (!noise_v_.state_dependent())
        additive_profile_v_ = noise_v_.profile(*basis_, VectorXd::Zero(basis_->quad.size()));
    if (!noise_w_.state_dependent())
        additive_profile_w_ = noise_w_.profile(*basis_, VectorXd::Zero(basis_->quad.size()));
}

namespace {

struct Samples {
    VectorXd vq, wq, Iq, Hq;
};

Samples membrane_samples(const BasisSet& basis, const MembraneModel& mem,
                         const GalerkinState& s) {
    Samples out;
    out.vq = basis.evaluate_at_quad(s.c);
    out.wq = basis.evaluate_at_quad(s.a);
    const int Q = basis.quad.size();
    out.Iq.resize(Q);
    out.Hq.resize(Q);
    for (int q = 0; q < Q; ++q) {
        out.Iq(q) = mem.ion_current(out.vq(q), out.wq(q));
        out.Hq(q) = mem.gating_rhs(out.vq(q), out.wq(q));
    }
    return out;
}

}  // namespace

DriftBlocks GalerkinOperator::drift(const GalerkinState& s) const {
    const BasisSet& b = *basis_;
    const double se = std::sqrt(eps_);
    Samples mq = membrane_samples(b, membrane_, s);

    const VectorXd Iproj = b.values * b.quad.weights.cwiseProduct(mq.Iq);
    const VectorXd Hproj = b.values * b.quad.weights.cwiseProduct(mq.Hq);

    const VectorXd c_i = s.ci_s / se;
    const VectorXd c_e = s.ce_s / se;

    DriftBlocks d;
    d.A_i = -(K_i_ * c_i) - Iproj;
    d.A_e = (K_e_ * c_e) - Iproj;
    d.F_ie = (d.A_i + d.A_e) / (2.0 + eps_);
    d.F_i = ((1.0 + eps_) * d.A_i - d.A_e) / (se * (2.0 + eps_));
    d.F_e = (d.A_i - (1.0 + eps_) * d.A_e) / (se * (2.0 + eps_));
    d.F_H = Hproj;
    return d;
}

VectorXd GalerkinOperator::profile_v(const VectorXd& v_at_quad) const {
    return noise_v_.state_dependent() ? noise_v_.profile(*basis_, v_at_quad)
                                      : additive_profile_v_;
}

VectorXd GalerkinOperator::profile_w(const VectorXd& v_at_quad) const {
    return noise_w_.state_dependent() ? noise_w_.profile(*basis_, v_at_quad)
                                      : additive_profile_w_;
}

DiffusionBlocks GalerkinOperator::diffusion(const GalerkinState& s) const {
    DiffusionBlocks g;
    g.epsilon = eps_;
    g.gamma_v = noise_v_.gamma_vector();
    g.gamma_w = noise_w_.gamma_vector();
    const VectorXd vq = basis_->evaluate_at_quad(s.c);
    g.p_v = profile_v(vq);
    g.p_w = profile_w(vq);
    return g;
}

MatrixXd GalerkinOperator::stiffness_operator() const {
    const int n = basis_->n;
    const double se = std::sqrt(eps_);
    const double d = 2.0 + eps_;
    MatrixXd L = MatrixXd::Zero(4 * n, 4 * n);
    L.block(0, n, n, n) = K_i_ / (se * d);
    L.block(0, 2 * n, n, n) = -K_e_ / (se * d);
    L.block(n, n, n, n) = ((1.0 + eps_) / (eps_ * d)) * K_i_;
    L.block(n, 2 * n, n, n) = K_e_ / (eps_ * d);
    L.block(2 * n, n, n, n) = K_i_ / (eps_ * d);
    L.block(2 * n, 2 * n, n, n) = ((1.0 + eps_) / (eps_ * d)) * K_e_;
    return L;
}

double GalerkinOperator::monotonicity_constant() const {
    const double g = (4.0 + 2.0 * eps_) / ((2.0 + eps_) * (2.0 + eps_));
    const double noise_lip = g * noise_v_.gamma_sq_truncated() * noise_v_.b1 * noise_v_.b1 +
                             noise_w_.gamma_sq_truncated() * noise_w_.b1 * noise_w_.b1;
    const double pair_K = membrane_.enabled ? membrane_.sc.pair_K : 0.0;
    return (2.0 * pair_K + noise_lip) * (1.0 + 1e-6) + 1e-12;
}

double GalerkinOperator::coercivity_constant() const {
    const double g = (4.0 + 2.0 * eps_) / ((2.0 + eps_) * (2.0 + eps_));
    const double cb_v = g * noise_v_.growth_constant();
    const double cb_w = noise_w_.growth_constant();
    const double C2 = membrane_.enabled ? membrane_.sc.C2 : 0.0;
    const double C3 = membrane_.enabled ? membrane_.sc.C3 : 0.0;
    const double omega = basis_->domain.measure();
    const double b1 = 2.0 * C2 + cb_v + cb_w;
    const double b2 = (2.0 * C3 + cb_v + cb_w) * omega;
    return std::max(b1, b2) * (1.0 + 1e-6) + 1e-12;
}

GalerkinState em_step(const GalerkinState& s, const DriftBlocks& F,
                      const DiffusionBlocks& G, const VectorXd& dWv,
                      const VectorXd& dWw, double dt) {
    VectorXd nc, nci, nce, na;
    G.apply(dWv, dWw, nc, nci, nce, na);
    GalerkinState out;
    out.c = s.c + dt * F.F_ie + nc;
    out.ci_s = s.ci_s + dt * F.F_i + nci;
    out.ce_s = s.ce_s + dt * F.F_e + nce;
    out.a = s.a + dt * F.F_H + na;
    out.t = s.t + dt;
    return out;
}

PathSolver::PathSolver(std::shared_ptr<const GalerkinOperator> op, RunConfig run)
    : op_(std::move(op)), run_(run) {
    run_.validate();
    if (run_.stepper == Stepper::SemiImplicit) {
        const int n4 = 4 * op_->n();
        MatrixXd A = MatrixXd::Identity(n4, n4) + run_.dt * op_->stiffness_operator();
        lu_.compute(A);
        const double rcond = lu_.rcond();
        if (!(rcond > 1e-14)) {
            std::ostringstream os;
            os << "semi-implicit factorization ill-conditioned: rcond=" << rcond
               << " at dt=" << run_.dt << ", eps=" << op_->epsilon();
            throw std::runtime_error(os.str());
        }
    }
}

TrajectoryRecord PathSolver::solve(const GalerkinState& initial, std::uint64_t seed) const {
    WienerIncrements inc = sample_increments(op_->n(), run_.steps(), run_.dt, seed);
    return solve(initial, inc);
}

TrajectoryRecord PathSolver::solve(const GalerkinState& initial,
                                   const WienerIncrements& inc) const {
    const GalerkinOperator& op = *op_;
    const BasisSet& b = op.basis();
    const int n = op.n();
    const int steps = run_.steps();
    const double dt = run_.dt;
    const double eps = op.epsilon();
    const double se = std::sqrt(eps);

    if (inc.modes() != n || inc.steps() < steps || inc.dt != dt)
        throw std::invalid_argument("solve: increments do not match run configuration");

    const int snaps = steps / run_.snapshot_stride + 1;
    TrajectoryRecord rec;
    rec.dt = dt;
    rec.steps = steps;
    rec.stride = run_.snapshot_stride;
    rec.seed = inc.seed;
    rec.times.resize(snaps);
    rec.c.resize(n, snaps);
    rec.ci_s.resize(n, snaps);
    rec.ce_s.resize(n, snaps);
    rec.a.resize(n, snaps);
    rec.cum_dissipation.resize(snaps);
    rec.cum_grad_i.resize(snaps);
    rec.cum_grad_e.resize(snaps);
    rec.cum_l4.resize(snaps);
    rec.cum_membrane_source.resize(snaps);
    if (run_.record_noise) {
        rec.noise_v_proj.resize(n, steps);
        rec.noise_w_proj.resize(n, steps);
        rec.has_noise_record = true;
    }

    GalerkinState s = initial;
    s.t = 0.0;

    double cum_dis = 0.0, cum_gi = 0.0, cum_ge = 0.0, cum_l4 = 0.0, cum_src = 0.0;
    auto track_sup = [&](const GalerkinState& st) {
        rec.sup_v_sq = std::max(rec.sup_v_sq, st.c.squaredNorm());
        rec.sup_w_sq = std::max(rec.sup_w_sq, st.a.squaredNorm());
        rec.sup_ui_eps = std::max(rec.sup_ui_eps, st.ci_s.squaredNorm());
        rec.sup_ue_eps = std::max(rec.sup_ue_eps, st.ce_s.squaredNorm());
    };
    auto snapshot = [&](int snap, const GalerkinState& st) {
        rec.times(snap) = st.t;
        rec.c.col(snap) = st.c;
        rec.ci_s.col(snap) = st.ci_s;
        rec.ce_s.col(snap) = st.ce_s;
        rec.a.col(snap) = st.a;
        rec.cum_dissipation(snap) = cum_dis;
        rec.cum_grad_i(snap) = cum_gi;
        rec.cum_grad_e(snap) = cum_ge;
        rec.cum_l4(snap) = cum_l4;
        rec.cum_membrane_source(snap) = cum_src;
    };

    track_sup(s);
    snapshot(0, s);
    int snap = 1;

    const VectorXd gamma_v = op.noise_v().gamma_vector();
    const VectorXd gamma_w = op.noise_w().gamma_vector();

    for (int m = 0; m < steps; ++m) {
        Samples mq = membrane_samples(b, op.membrane(), s);

        // left-point accumulators
        const VectorXd c_i = s.ci_s / se;
        const VectorXd c_e = s.ce_s / se;
        cum_dis += dt * (c_i.dot(op.K_i() * c_i) + c_e.dot(op.K_e() * c_e));
        cum_gi += dt * b.eigenvalues.dot(c_i.cwiseAbs2());
        cum_ge += dt * b.eigenvalues.dot(c_e.cwiseAbs2());
        cum_l4 += dt * b.quad.weights.dot(mq.vq.array().square().square().matrix());
        cum_src += dt * b.quad.weights.dot(
            (mq.wq.cwiseProduct(mq.Hq) - mq.vq.cwiseProduct(mq.Iq)));

        const VectorXd p_v = op.profile_v(mq.vq);
        const VectorXd p_w = op.profile_w(mq.vq);

        const double sv = gamma_v.dot(inc.dW_v.col(m));
        const double zw = gamma_w.dot(inc.dW_w.col(m));
        if (run_.record_noise) {
            rec.noise_v_proj.col(m) = sv * p_v;
            rec.noise_w_proj.col(m) = zw * p_w;
        }

        const VectorXd Iproj = b.values * b.quad.weights.cwiseProduct(mq.Iq);
        const VectorXd Hproj = b.values * b.quad.weights.cwiseProduct(mq.Hq);

        GalerkinState next;
        next.t = (m + 1) * dt;
        if (run_.stepper == Stepper::EulerMaruyama) {
            const VectorXd A_i = -(op.K_i() * c_i) - Iproj;
            const VectorXd A_e = (op.K_e() * c_e) - Iproj;
            const VectorXd F_ie = (A_i + A_e) / (2.0 + eps);
            const VectorXd F_i = ((1.0 + eps) * A_i - A_e) / (se * (2.0 + eps));
            const VectorXd F_e = (A_i - (1.0 + eps) * A_e) / (se * (2.0 + eps));
            next.c = s.c + dt * F_ie + (2.0 / (2.0 + eps)) * sv * p_v;
            next.ci_s = s.ci_s + dt * F_i + (se / (2.0 + eps)) * sv * p_v;
            next.ce_s = s.ce_s + dt * F_e - (se / (2.0 + eps)) * sv * p_v;
            next.a = s.a + dt * Hproj + zw * p_w;
        } else {
            // stiffness implicit, membrane and noise explicit
            VectorXd rhs(4 * n);
            rhs.segment(0, n) =
                s.c - dt * (2.0 / (2.0 + eps)) * Iproj + (2.0 / (2.0 + eps)) * sv * p_v;
            rhs.segment(n, n) =
                s.ci_s - dt * (se / (2.0 + eps)) * Iproj + (se / (2.0 + eps)) * sv * p_v;
            rhs.segment(2 * n, n) =
                s.ce_s + dt * (se / (2.0 + eps)) * Iproj - (se / (2.0 + eps)) * sv * p_v;
            rhs.segment(3 * n, n) = s.a + dt * Hproj + zw * p_w;
            VectorXd x = lu_.solve(rhs);
            next = GalerkinState::from_flat(x, (m + 1) * dt);
        }

        const double e2 = next.norm_sq();
        if (!(e2 <= run_.blowup_threshold * run_.blowup_threshold) || !std::isfinite(e2))
            throw PathBlowup(m + 1, next.t, e2);

        s = std::move(next);
        track_sup(s);
        if ((m + 1) % run_.snapshot_stride == 0) snapshot(snap++, s);
    }
    return rec;
}

static void require_consistent(const GalerkinOperator& op, const GalerkinState& s,
                               const char* what) {
    const double scale = std::sqrt(std::max(1.0, s.norm_sq()));
    if (s.consistency_gap(op.epsilon()) > 1e-8 * scale)
        throw std::invalid_argument(std::string(what) +
                                    ": state violates c = (ci_s - ce_s)/sqrt(eps)");
}

MonotonicityReport check_monotonicity(const GalerkinOperator& op, const GalerkinState& C1,
                                      const GalerkinState& C2) {
    require_consistent(op, C1, "check_monotonicity");
    require_consistent(op, C2, "check_monotonicity");

    const BasisSet& b = op.basis();
    const double se = std::sqrt(op.epsilon());

    MonotonicityReport rep;
    const VectorXd dci = (C1.ci_s - C2.ci_s) / se;
    const VectorXd dce = (C1.ce_s - C2.ce_s) / se;
    rep.I_FM = -(dci.dot(op.K_i() * dci) + dce.dot(op.K_e() * dce));

    Samples m1 = membrane_samples(b, op.membrane(), C1);
    Samples m2 = membrane_samples(b, op.membrane(), C2);
    const VectorXd dvq = m1.vq - m2.vq;
    const VectorXd dwq = m1.wq - m2.wq;
    rep.I_FIH = b.quad.weights.dot(
        ((m1.Hq - m2.Hq).cwiseProduct(dwq) - (m1.Iq - m2.Iq).cwiseProduct(dvq)));

    DriftBlocks F1 = op.drift(C1);
    DriftBlocks F2 = op.drift(C2);
    const VectorXd dF = F1.flat() - F2.flat();
    const VectorXd dC = C1.flat() - C2.flat();

    DiffusionBlocks G1 = op.diffusion(C1);
    DiffusionBlocks G2 = op.diffusion(C2);
    DiffusionBlocks dG = G1;
    dG.p_v = G1.p_v - G2.p_v;
    dG.p_w = G1.p_w - G2.p_w;
    const double dG_sq = dG.frobenius_sq();

    rep.lhs = 2.0 * dF.dot(dC) + dG_sq;
    const double dC_sq = dC.squaredNorm();
    rep.diff_lip_sq = dC_sq > 0.0 ? dG_sq / dC_sq : 0.0;
    rep.K_r = op.monotonicity_constant();
    rep.margin = rep.K_r * dC_sq - rep.lhs;
    return rep;
}

CoercivityReport check_coercivity(const GalerkinOperator& op, const GalerkinState& C) {
    require_consistent(op, C, "check_coercivity");
    CoercivityReport rep;
    DriftBlocks F = op.drift(C);
    DiffusionBlocks G = op.diffusion(C);
    rep.lhs = 2.0 * F.flat().dot(C.flat()) + G.frobenius_sq();
    rep.K = op.coercivity_constant();
    rep.margin = rep.K * (1.0 + C.flat().squaredNorm()) - rep.lhs;
    return rep;
}

MonodomainOperator::MonodomainOperator(std::shared_ptr<const BasisSet> basis, MatrixXd K_M,
                                       MembraneModel membrane, NoiseModel noise_v,
                                       NoiseModel noise_w)
    : basis_(std::move(basis)),
      K_M_(std::move(K_M)),
      membrane_(std::move(membrane)),
      noise_v_(std::move(noise_v)),
      noise_w_(std::move(noise_w)) {
    if (K_M_.rows() != basis_->n)
        throw std::invalid_argument("monodomain: stiffness dimension mismatch");
}

TrajectoryRecord MonodomainOperator::solve(const RunConfig& run, const VectorXd& c0,
                                           const VectorXd& a0,
                                           const WienerIncrements& inc) const {
    run.validate();
    const BasisSet& b = *basis_;
    const int n = b.n;
    const int steps = run.steps();
    const double dt = run.dt;
    if (inc.modes() != n || inc.steps() < steps || inc.dt != dt)
        throw std::invalid_argument("monodomain: increments do not match run configuration");

    Eigen::PartialPivLU<MatrixXd> lu;
    if (run.stepper == Stepper::SemiImplicit)
        lu.compute(MatrixXd::Identity(n, n) + dt * K_M_);

    const int snaps = steps / run.snapshot_stride + 1;
    TrajectoryRecord rec;
    rec.dt = dt;
    rec.steps = steps;
    rec.stride = run.snapshot_stride;
    rec.seed = inc.seed;
    rec.times.resize(snaps);
    rec.c.resize(n, snaps);
    rec.a.resize(n, snaps);
    rec.cum_dissipation.resize(snaps);
    rec.cum_grad_i.resize(snaps);
    rec.cum_grad_e.resize(snaps);
    rec.cum_l4.resize(snaps);
    rec.cum_grad_i.setZero();
    rec.cum_grad_e.setZero();
    rec.cum_membrane_source = VectorXd::Zero(snaps);

    const VectorXd gamma_v = noise_v_.gamma_vector();
    const VectorXd gamma_w = noise_w_.gamma_vector();
    VectorXd p_v_add, p_w_add;
    if (!noise_v_.state_dependent())
        p_v_add = noise_v_.profile(b, VectorXd::Zero(b.quad.size()));
    if (!noise_w_.state_dependent())
        p_w_add = noise_w_.profile(b, VectorXd::Zero(b.quad.size()));

    VectorXd c = c0, a = a0;
    double cum_dis = 0.0, cum_l4 = 0.0;
    auto snapshot = [&](int snap, double t) {
        rec.times(snap) = t;
        rec.c.col(snap) = c;
        rec.a.col(snap) = a;
        rec.cum_dissipation(snap) = cum_dis;
        rec.cum_l4(snap) = cum_l4;
    };
    rec.sup_v_sq = c.squaredNorm();
    rec.sup_w_sq = a.squaredNorm();
    snapshot(0, 0.0);
    int snap = 1;

    const int Q = b.quad.size();
    for (int m = 0; m < steps; ++m) {
        VectorXd vq = b.evaluate_at_quad(c);
        VectorXd wq = b.evaluate_at_quad(a);
        VectorXd Iq(Q), Hq(Q);
        for (int q = 0; q < Q; ++q) {
            Iq(q) = membrane_.ion_current(vq(q), wq(q));
            Hq(q) = membrane_.gating_rhs(vq(q), wq(q));
        }
        cum_dis += dt * c.dot(K_M_ * c);
        cum_l4 += dt * b.quad.weights.dot(vq.array().square().square().matrix());

        const VectorXd Iproj = b.values * b.quad.weights.cwiseProduct(Iq);
        const VectorXd Hproj = b.values * b.quad.weights.cwiseProduct(Hq);
        const VectorXd p_v = noise_v_.state_dependent() ? noise_v_.profile(b, vq) : p_v_add;
        const VectorXd p_w = noise_w_.state_dependent() ? noise_w_.profile(b, vq) : p_w_add;
        const double sv = gamma_v.dot(inc.dW_v.col(m));
        const double zw = gamma_w.dot(inc.dW_w.col(m));

        if (run.stepper == Stepper::EulerMaruyama) {
            c = c + dt * (-(K_M_ * c) - Iproj) + sv * p_v;
        } else {
            c = lu.solve(c - dt * Iproj + sv * p_v);
        }
        a = a + dt * Hproj + zw * p_w;

        const double e2 = c.squaredNorm() + a.squaredNorm();
        if (!(e2 <= run.blowup_threshold * run.blowup_threshold) || !std::isfinite(e2))
            throw PathBlowup(m + 1, (m + 1) * dt, e2);

        rec.sup_v_sq = std::max(rec.sup_v_sq, c.squaredNorm());
        rec.sup_w_sq = std::max(rec.sup_w_sq, a.squaredNorm());
        if ((m + 1) % run.snapshot_stride == 0) snapshot(snap++, (m + 1) * dt);
    }
    return rec;
}

}  // namespace bidomain
