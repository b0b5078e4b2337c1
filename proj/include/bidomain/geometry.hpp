#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bidomain {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Bc { Dirichlet, Neumann };

/// Rectangular domain in 1D or 2D with a per-face Dirichlet/Neumann split.
/// Faces are addressed as "x-","x+","y-","y+"; the Dirichlet set must be
/// nonempty so that potentials are determined without a zero-mean constraint.
struct Domain {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    // bc[axis][side], side 0 = low face, side 1 = high face
    std::array<std::array<Bc, 2>, 2> bc{{{Bc::Dirichlet, Bc::Neumann},
                                         {Bc::Neumann, Bc::Neumann}}};

    double measure() const {
        return dim == 1 ? lengths[0] : lengths[0] * lengths[1];
    }
    bool has_dirichlet() const;
    void validate() const;  // throws std::invalid_argument

    static const char* face_name(int axis, int side);
};

/// One separated 1D eigenfunction family on [0,L]: phi'' = -mu phi with the
/// axis boundary pair. `index` is the integer frequency count used for
/// quadrature sizing.
struct AxisMode {
    int index = 0;
    double frequency = 0.0;  // omega in phi ~ trig(omega x)
    double mu = 0.0;         // 1D eigenvalue omega^2
    bool cosine = false;     // cos branch (Neumann at the low face)
    double norm = 0.0;       // L2 normalization factor
};

/// Tensor Gauss-Legendre grid over the domain.
struct Quadrature {
    std::array<std::vector<double>, 2> axis_nodes;
    std::array<std::vector<double>, 2> axis_weights;
    MatrixXd points;   // Q x dim
    VectorXd weights;  // Q

    int size() const { return static_cast<int>(weights.size()); }
};

/// L2-orthonormal, H1_D-orthogonal spectral basis on a Domain, with the
/// quadrature grid and tabulated mode values/gradients used for assembly.
class BasisSet {
public:
    Domain domain;
    int n = 0;
    std::vector<std::array<int, 2>> modes;  // per-axis family indices
    VectorXd eigenvalues;                   // Laplacian eigenvalues, ascending
    Quadrature quad;

    // tabulated values at quadrature points
    MatrixXd values;                   // n x Q, e_l(x_q)
    std::array<MatrixXd, 2> gradients; // per axis, n x Q

    double mode_value(int l, const double* x) const;
    VectorXd mode_gradient_at(int l, const double* x) const;

    /// Coefficients of the quadrature projection <f, e_l>.
    VectorXd project(const std::function<double(const double*)>& f) const;

    /// Field values sum_l coeffs[l] e_l at arbitrary points (rows of `points`).
    VectorXd evaluate(const VectorXd& coeffs, const MatrixXd& points) const;

    /// Values of sum_l coeffs[l] e_l at the quadrature nodes (fast path).
    VectorXd evaluate_at_quad(const VectorXd& coeffs) const {
        return values.transpose() * coeffs;
    }

    MatrixXd mass_matrix() const;

private:
    std::array<std::vector<AxisMode>, 2> axis_modes_;
    friend BasisSet build_basis(const Domain&, int, int);
};

/// Builds the first n eigenmodes ordered by eigenvalue (ties: lexicographic
/// axis indices). quad_points <= 0 selects the default 2*max_index+10 rule
/// per axis, which keeps the Gram identities below 1e-10.
BasisSet build_basis(const Domain& domain, int n, int quad_points = 0);

enum class Tissue { Intra, Extra };

/// Pair of symmetric uniformly elliptic conductivity tensors (M_i, M_e).
/// `Axisymmetric` uses a unit fiber field a(x) with in-plane angle
/// theta0 + twist * x/Lx; `Constant` is the axis-aligned diagonal case.
class ConductivityField {
public:
    enum class Kind { Constant, Axisymmetric };

    Kind kind = Kind::Constant;
    double sigma_l_i = 1.0, sigma_t_i = 1.0;
    double sigma_l_e = 1.0, sigma_t_e = 1.0;
    double fiber_angle = 0.0;  // radians
    double fiber_twist = 0.0;  // radians across the x extent

    double ellipticity_lower() const;  // m
    double ellipticity_upper() const;  // M

    Eigen::Matrix2d tensor(Tissue which, const Domain& dom, const double* x) const;
    Eigen::Vector2d fiber(const Domain& dom, const double* x) const;

    /// True iff M_i == lambda * M_e pointwise; reports lambda.
    bool proportional(double& lambda) const;

    void validate() const;
};

/// K[l,m] = int M_j grad(e_m) . grad(e_l) dx by quadrature, symmetrized
/// exactly (upper triangle mirrored).
MatrixXd assemble_stiffness(const BasisSet& basis, const ConductivityField& cond,
                            Tissue which);

/// Gauss-Legendre rule on [-1,1].
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace bidomain
