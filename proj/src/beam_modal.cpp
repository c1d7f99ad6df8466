#include "fbip/beam_modal.hpp"

#include <cmath>
#include <numbers>

#include "fbip/errors.hpp"

namespace fbip {

namespace {

// Scaled characteristic function g(x) = cos x + sech x. Roots coincide with
// 1 + cos x cosh x = 0 but g stays O(1), so bisection keeps full precision at
// high roots where cosh overflows the useful residual range.
double char_scaled(double x) { return std::cos(x) + 1.0 / std::cosh(x); }

}  // namespace

std::vector<double> characteristic_roots(int n, double tol) {
    if (n < 1) throw ValidationError("characteristic_roots: n must be >= 1");
    if (!(tol > 0)) throw ValidationError("characteristic_roots: tol must be positive");
    if (n > BeamModalBasis::kMaxModes)
        throw ValidationError("characteristic_roots: at most " +
                              std::to_string(BeamModalBasis::kMaxModes) +
                              " modes are supported (mode-shape evaluation loses the free-end "
                              "conditions beyond that)");
    std::vector<double> roots;
    roots.reserve(n);
    const double pi = std::numbers::pi;
    for (int k = 1; k <= n; ++k) {
        // Exactly one root per half-period ((k-1)pi, k pi); g alternates sign
        // at the bracket ends.
        double a = (k - 1) * pi + 1e-12;
        double b = k * pi;
        double ga = char_scaled(a);
        double gb = char_scaled(b);
        if (ga * gb > 0)
            throw NumericalError("characteristic_roots: no sign change in bracket [" +
                                 std::to_string(a) + ", " + std::to_string(b) + "]");
        // Bisect to machine resolution (~60 halvings), then check the residual.
        for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * b;
             ++it) {
            double m = 0.5 * (a + b);
            double gm = char_scaled(m);
            if (ga * gm <= 0) {
                b = m;
                gb = gm;
            } else {
                a = m;
                ga = gm;
            }
        }
        double root = 0.5 * (a + b);
        if (std::abs(char_scaled(root)) > tol)
            throw NumericalError("characteristic_roots: residual " +
                                 std::to_string(std::abs(char_scaled(root))) +
                                 " above tolerance in bracket ending at " + std::to_string(b));
        roots.push_back(root);
    }
    return roots;
}

double natural_frequency(double betaL, const RobotParams& p) {
    const double rhoA = p.beam_density * p.beam_width * p.beam_thickness;
    const double EI = p.beam_modulus * p.beam_width * std::pow(p.beam_thickness, 3) / 12.0;
    const double beta = betaL / p.beam_length;
    return beta * beta * std::sqrt(EI / rhoA);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double pi = std::numbers::pi;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess, Newton on the Legendre recurrence.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

// ---------- BeamModalBasis ----------

BeamModalBasis::BeamModalBasis(const RobotParams& p) {
    p.validate_beam();
    n_ = p.n_modes;
    length_ = p.beam_length;
    piezo_length_ = p.piezo_length;
    sections_ = derive_sections(p);

    auto roots = characteristic_roots(n_);
    betaL_ = Eigen::Map<Eigen::VectorXd>(roots.data(), n_);
    beta_ = betaL_ / length_;
    omega_.resize(n_);
    sigma_.resize(n_);
    one_minus_sigma_.resize(n_);
    tip_raw_.resize(n_);
    coeff_a1_.resize(n_);
    coeff_a2_.resize(n_);
    for (int k = 0; k < n_; ++k) {
        omega_[k] = natural_frequency(betaL_[k], p);
        const double lam = betaL_[k];
        // sigma_k = (sinh - sin)/(cosh + cos); 1 - sigma_k computed in the
        // cancellation-free form (cosh - sinh = exp(-lam)).
        const double ch = std::cosh(lam), sh = std::sinh(lam);
        const double c = std::cos(lam), s = std::sin(lam);
        sigma_[k] = (sh - s) / (ch + c);
        one_minus_sigma_[k] = (std::exp(-lam) + c + s) / (ch + c);
        // Raw tip value of cosh - cos - sigma (sinh - sin); +-2 in exact
        // arithmetic, evaluated through the same stable split.
        const double el = std::exp(lam), eml = std::exp(-lam);
        tip_raw_[k] = 0.5 * one_minus_sigma_[k] * el + 0.5 * (1.0 + sigma_[k]) * eml - c +
                      sigma_[k] * s;
        // Equivalent (sin - sinh), (cos - cosh) basis coefficients after the
        // unit-tip scaling.
        coeff_a1_[k] = sigma_[k] / tip_raw_[k];
        coeff_a2_[k] = -1.0 / tip_raw_[k];
    }
    compute_integrals(p);

    damping_model_ = p.damping_model;
    c1_ = p.damping_c1;
    c2_ = p.damping_c2;
    damping_1_.resize(n_);
    damping_2_.resize(n_);
    for (int k = 0; k < n_; ++k) {
        // Per-mode viscous coefficient giving damping ratio zeta_k on the
        // diagonal modal equation m_kk qdd + d_k qd + k_kk q = ...
        double d = 2.0 * p.damping_ratio(k) * omega_[k] * mass_(k, k);
        damping_1_[k] = d;
        damping_2_[k] = d;
    }
}

ModeShapeEval BeamModalBasis::mode_shape(double x, int mode) const {
    if (mode < 0 || mode >= n_)
        throw ValidationError("mode_shape: mode index " + std::to_string(mode) + " out of range");
    if (x < 0.0 || x > length_)
        throw std::domain_error("mode_shape: x = " + std::to_string(x) + " outside [0, L]");
    const double beta = beta_[mode];
    const double xi = beta * x;
    const double sig = sigma_[mode];
    const double half_d = 0.5 * one_minus_sigma_[mode];   // (1 - sigma)/2
    const double half_s = 0.5 * (1.0 + sig);              // (1 + sigma)/2
    const double ex = std::exp(xi), emx = std::exp(-xi);
    const double cs = std::cos(xi), sn = std::sin(xi);
    const double scale = 1.0 / tip_raw_[mode];

    // cosh - cos - sigma (sinh - sin) and derivatives, grouped so the growing
    // exponential always carries the small (1 - sigma)/2 factor.
    ModeShapeEval out;
    out.w = scale * (half_d * ex + half_s * emx - cs + sig * sn);
    out.wp = scale * beta * (half_d * ex - half_s * emx + sn + sig * cs);
    out.wpp = scale * beta * beta * (half_d * ex + half_s * emx + cs - sig * sn);
    return out;
}

void BeamModalBasis::compute_integrals(const RobotParams& p) {
    (void)p;
    mass_.setZero(n_, n_);
    stiffness_.setZero(n_, n_);
    overlap_.setZero(n_, n_);
    s_.setZero(n_);
    r_.setZero(n_);
    g_.setZero(n_);
    e_.setZero(n_);

    struct Segment {
        double a, b, rhoA, EI;
    };
    const Segment segments[2] = {
        {0.0, piezo_length_, sections_.rhoA_inner, sections_.EI_inner},
        {piezo_length_, length_, sections_.rhoA_outer, sections_.EI_outer},
    };

    // Composite Gauss-Legendre per segment; the order doubles until every
    // table entry is stable to 1e-10 relative.
    auto evaluate = [&](int order, Eigen::MatrixXd& m, Eigen::MatrixXd& k, Eigen::MatrixXd& c,
                        Eigen::VectorXd& s, Eigen::VectorXd& r, Eigen::VectorXd& g, double& p0,
                        double& p1, double& p2) {
        m.setZero(n_, n_);
        k.setZero(n_, n_);
        c.setZero(n_, n_);
        s.setZero(n_);
        r.setZero(n_);
        g.setZero(n_);
        p0 = p1 = p2 = 0.0;
        std::vector<double> xs, ws;
        gauss_legendre(order, xs, ws);
        Eigen::VectorXd W(n_), Wpp(n_);
        for (const Segment& seg : segments) {
            const double mid = 0.5 * (seg.a + seg.b), half = 0.5 * (seg.b - seg.a);
            for (int q = 0; q < order; ++q) {
                const double x = mid + half * xs[q];
                const double w = half * ws[q];
                for (int i = 0; i < n_; ++i) {
                    ModeShapeEval ev = mode_shape(x, i);
                    W[i] = ev.w;
                    Wpp[i] = ev.wpp;
                }
                m.noalias() += (w * seg.rhoA) * (W * W.transpose());
                k.noalias() += (w * seg.EI) * (Wpp * Wpp.transpose());
                c.noalias() += w * (W * W.transpose());
                s += (w * seg.rhoA) * W;
                r += (w * seg.rhoA * x) * W;
                g += w * W;
                p0 += w * seg.rhoA;
                p1 += w * seg.rhoA * x;
                p2 += w * seg.rhoA * x * x;
            }
        }
    };

    int order = 64;
    double p0b, p1b, p2b;
    evaluate(order, mass_, stiffness_, overlap_, s_, r_, g_, p0_, p1_, p2_);
    for (;;) {
        Eigen::MatrixXd m2, k2, c2;
        Eigen::VectorXd s2, r2, g2;
        evaluate(2 * order, m2, k2, c2, s2, r2, g2, p0b, p1b, p2b);
        auto rel = [](double a, double b, double scale) {
            return std::abs(a - b) / std::max(scale, 1e-300);
        };
        double worst = 0.0;
        worst = std::max(worst, (mass_ - m2).cwiseAbs().maxCoeff() / mass_.norm());
        worst = std::max(worst, (stiffness_ - k2).cwiseAbs().maxCoeff() / stiffness_.norm());
        worst = std::max(worst, (overlap_ - c2).cwiseAbs().maxCoeff() / overlap_.norm());
        worst = std::max(worst, (s_ - s2).cwiseAbs().maxCoeff() / s_.norm());
        worst = std::max(worst, (r_ - r2).cwiseAbs().maxCoeff() / r_.norm());
        worst = std::max(worst, (g_ - g2).cwiseAbs().maxCoeff() / g_.norm());
        worst = std::max(worst, rel(p0_, p0b, p0b));
        worst = std::max(worst, rel(p1_, p1b, p1b));
        worst = std::max(worst, rel(p2_, p2b, p2b));
        mass_ = m2;
        stiffness_ = k2;
        overlap_ = c2;
        s_ = s2;
        r_ = r2;
        g_ = g2;
        p0_ = p0b;
        p1_ = p1b;
        p2_ = p2b;
        if (worst <= 1e-10) break;
        order *= 2;
        if (order > 1024)
            throw NumericalError("modal integrals did not stabilize at quadrature order " +
                                 std::to_string(order));
    }

    // Exact symmetrization (quadrature sums are symmetric up to roundoff).
    mass_ = 0.5 * (mass_ + mass_.transpose()).eval();
    stiffness_ = 0.5 * (stiffness_ + stiffness_.transpose()).eval();
    overlap_ = 0.5 * (overlap_ + overlap_.transpose()).eval();

    for (int i = 0; i < n_; ++i) e_[i] = mode_shape(piezo_length_, i).wp;
}

}  // namespace fbip
