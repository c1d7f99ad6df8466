#pragma once

#include <Eigen/Dense>

#include "fbip/params.hpp"

namespace fbip {

// Value and first two spatial derivatives of a mode shape at one point.
struct ModeShapeEval {
    double w = 0.0;    // dimensionless (unit tip deflection)
    double wp = 0.0;   // 1/m
    double wpp = 0.0;  // 1/m^2
};

// Fixed-free Euler-Bernoulli modal basis plus every beam integral the
// assembled equations of motion need. Immutable after construction.
//
// Mode shapes are the bare uniform-beam eigenfunctions, normalized to unit
// tip deflection W_i(L) = 1, so each modal coordinate is that mode's
// contribution to the tip deflection. The integral table is weighted with the
// piecewise composite section (respecting piezo_loading_enabled), which is
// the assumed-mode discretization of the composite beam in the bare basis.
class BeamModalBasis {
  public:
    static constexpr int kMaxModes = 12;  // cosh/exp range guard; see characteristic_roots

    BeamModalBasis(const RobotParams& p);

    int n_modes() const { return n_; }
    double length() const { return length_; }
    double piezo_length() const { return piezo_length_; }
    const SectionProperties& sections() const { return sections_; }

    // Wavenumber-times-length roots, wavenumbers [1/m], bare-beam circular
    // frequencies [rad/s]; all strictly increasing.
    const Eigen::VectorXd& betaL() const { return betaL_; }
    const Eigen::VectorXd& beta() const { return beta_; }
    const Eigen::VectorXd& omega() const { return omega_; }

    // Mode-shape coefficients in the (sin - sinh), (cos - cosh) basis.
    const Eigen::VectorXd& coeff_a1() const { return coeff_a1_; }
    const Eigen::VectorXd& coeff_a2() const { return coeff_a2_; }

    ModeShapeEval mode_shape(double x, int mode) const;

    // Integral table, composite weight rho A(x) resp. EI(x):
    //   mass(i,j)      = int rhoA W_i W_j
    //   stiffness(i,j) = int EI  W_i'' W_j''
    //   s(i) = int rhoA W_i      r(i) = int rhoA x W_i
    //   p0   = int rhoA          p1   = int rhoA x      p2 = int rhoA x^2
    //   g(i) = int W_i           overlap(i,j) = int W_i W_j   (unweighted)
    //   e(i) = W_i'(L_p)
    const Eigen::MatrixXd& mass() const { return mass_; }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const Eigen::VectorXd& s() const { return s_; }
    const Eigen::VectorXd& r() const { return r_; }
    const Eigen::VectorXd& g() const { return g_; }
    const Eigen::VectorXd& e() const { return e_; }
    const Eigen::MatrixXd& overlap() const { return overlap_; }
    double p0() const { return p0_; }
    double p1() const { return p1_; }
    double p2() const { return p2_; }

    // Modal damping coefficients d_i (force = -d_i qdot_i), per the configured
    // damping model and data-sheet damping ratios.
    const Eigen::VectorXd& modal_damping(int beam) const {
        return beam == 0 ? damping_1_ : damping_2_;
    }
    DampingModel damping_model() const { return damping_model_; }
    double spatial_damping_c(int beam) const { return beam == 0 ? c1_ : c2_; }

  private:
    void compute_integrals(const RobotParams& p);

    int n_;
    double length_, piezo_length_;
    SectionProperties sections_;
    Eigen::VectorXd betaL_, beta_, omega_;
    Eigen::VectorXd coeff_a1_, coeff_a2_;
    // Numerically stable mode-shape parameters: sigma_k and (1 - sigma_k)
    // evaluated without cancellation, plus the raw tip value for scaling.
    Eigen::VectorXd sigma_, one_minus_sigma_, tip_raw_;
    Eigen::MatrixXd mass_, stiffness_, overlap_;
    Eigen::VectorXd s_, r_, g_, e_;
    double p0_ = 0, p1_ = 0, p2_ = 0;
    Eigen::VectorXd damping_1_, damping_2_;
    DampingModel damping_model_ = DampingModel::Modal;
    double c1_ = 0, c2_ = 0;
};

// First n positive roots of 1 + cos(x) cosh(x) = 0, bracketed per half-period
// and bisected to machine resolution. `tol` bounds the scaled residual
// |cos x + sech x| (the raw determinant residual overflows double headroom
// beyond the fourth root; see the header note in the implementation).
std::vector<double> characteristic_roots(int n, double tol = 1e-12);

// omega = (betaL / L)^2 sqrt(E_b I_b / (rho_b A_b)), bare uniform beam.
double natural_frequency(double betaL, const RobotParams& p);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fbip
