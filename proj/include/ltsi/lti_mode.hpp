// lti_mode.hpp — per-frequency LTI analysis.
//
// A mode (A, B, C) is of relaxation type when its impulse response
// g(t) = C exp(At) B is completely monotone: (-1)^k g^(k)(t) >= 0 for all
// t > 0 and k.  Three tests approach this from different angles:
//
//   cm_test_moments    necessary screen: (-1)^k C A^k B >= 0 at t = 0+
//   cm_test_bernstein  exact when A is diagonalizable with real spectrum:
//                      g(t) = sum_i G_i e^{-p_i t} with p_i >= 0, G_i PSD
//   hankel_psd_test    (module hankel) the exact operator characterization
//
// Internal relaxation (A = A^* <= 0, B = C^*) is the structural form that
// implies all of the above.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "ltsi/core.hpp"

namespace ltsi {

enum class TestOutcome { pass, fail, not_applicable };

inline std::string test_outcome_name(TestOutcome o) {
    switch (o) {
        case TestOutcome::pass: return "pass";
        case TestOutcome::fail: return "fail";
        case TestOutcome::not_applicable: return "not_applicable";
    }
    return "unknown";
}

// ── Impulse response and moments ─────────────────────────────────────────

// g(t) = C exp(At) B via dense scaling-and-squaring Pade exponential.
inline Matrix impulse_response(const ModeTriple& mode, double t) {
    if (t < 0.0) throw ValidationError("impulse_response: t must be >= 0");
    Matrix result;
    if (mode.n() == 1) {
        // scalar fast path, exercised heavily across frequency grids
        result = mode.c * (std::exp(mode.a(0, 0) * t) * mode.b);
    } else {
        const Matrix e = (mode.a * t).exp();
        result = mode.c * e * mode.b;
    }
    if (!result.allFinite()) {
        Eigen::ComplexEigenSolver<Matrix> es(mode.a, false);
        const double abscissa =
            es.info() == Eigen::Success ? es.eigenvalues().real().maxCoeff() : 0.0;
        throw OverflowError("impulse_response: non-finite result at t = " + std::to_string(t) +
                            " (spectral abscissa " + std::to_string(abscissa) + ")");
    }
    return result;
}

// C A^k B, the value of d^k g / dt^k at t = 0.
inline Matrix derivative_moment(const ModeTriple& mode, int k) {
    if (k < 0) throw ValidationError("derivative_moment: k must be >= 0");
    Matrix x = mode.b;
    for (int i = 0; i < k; ++i) x = mode.a * x;
    return mode.c * x;
}

// max Re(lambda(A))
inline double spectral_abscissa(const ModeTriple& mode) {
    Eigen::ComplexEigenSolver<Matrix> es(mode.a, false);
    if (es.info() != Eigen::Success)
        throw NumericalError("spectral_abscissa: eigensolver failed");
    return es.eigenvalues().real().maxCoeff();
}

// ── Moment-sign test ─────────────────────────────────────────────────────

// Necessary condition sampled at t = 0+: the symmetrized signed moments
// (-1)^k C A^k B must be PSD.  Fails fast with the first violating k.
struct MomentTestResult {
    TestOutcome outcome = TestOutcome::pass;
    int first_failing_k = -1;
    double first_failing_value = 0.0;  // lmin at the first violating k
    double worst_value = 0.0;   // lmin of the symmetrized signed moment at worst k
    double worst_margin = 0.0;  // signed margin, >= 0 passes
    int worst_k = 0;
    double max_asymmetry = 0.0;  // ||M - M^*|| reported separately
};

inline MomentTestResult cm_test_moments(const ModeTriple& mode, int k_max = 20,
                                        double tol = 1e-9) {
    if (mode.m() != mode.p())
        throw ValidationError("cm_test_moments: transfer must be square (m = p)");
    MomentTestResult result;
    result.worst_margin = std::numeric_limits<double>::infinity();
    Matrix power = mode.b;  // A^k B
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) power = mode.a * power;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const Matrix signed_moment = sign * (mode.c * power);
        result.max_asymmetry = std::max(
            result.max_asymmetry, (signed_moment - signed_moment.adjoint()).norm());
        const double scale = 1.0 + signed_moment.cwiseAbs().maxCoeff();
        const auto [min_eig, max_eig] = hermitian_extremes(signed_moment);
        const double margin = min_eig + tol * scale;
        if (margin < result.worst_margin) {
            result.worst_margin = margin;
            result.worst_value = min_eig;
            result.worst_k = k;
        }
        if (margin < 0.0 && result.outcome == TestOutcome::pass) {
            result.outcome = TestOutcome::fail;
            result.first_failing_k = k;
            result.first_failing_value = min_eig;
        }
    }
    return result;
}

// ── Bernstein-form test ──────────────────────────────────────────────────

// Conic combination of decaying exponentials: g(t) = sum_i G_i e^{-p_i t}.
struct BernsteinForm {
    std::vector<double> poles;     // p_i >= 0, 1/time
    std::vector<Matrix> residues;  // Hermitian PSD m x m

    Matrix reconstruct(double t) const {
        Matrix g = Matrix::Zero(residues.front().rows(), residues.front().cols());
        for (std::size_t i = 0; i < poles.size(); ++i)
            g += residues[i] * std::exp(-poles[i] * t);
        return g;
    }
};

struct BernsteinTestResult {
    TestOutcome outcome = TestOutcome::not_applicable;
    std::optional<BernsteinForm> form;
    double worst_margin = 0.0;  // min over pole and residue margins when applicable
    std::string reason;         // why not applicable / what failed
};

// Eigendecomposes A; when the spectrum is real and the eigenbasis is well
// conditioned, extracts per-pole residues G_i = (C v_i)(w_i^* B) and checks
// poles >= 0 and residues PSD.  Defective or oscillatory A yields
// not_applicable (the Hankel test is the fallback).
inline BernsteinTestResult cm_test_bernstein(const ModeTriple& mode, double tol = 1e-9,
                                             double cond_limit = 1e8) {
    if (mode.m() != mode.p())
        throw ValidationError("cm_test_bernstein: transfer must be square (m = p)");
    BernsteinTestResult result;

    Eigen::ComplexEigenSolver<Matrix> es(mode.a);
    if (es.info() != Eigen::Success)
        throw NumericalError("cm_test_bernstein: eigensolver failed");
    const Vector lambda = es.eigenvalues();
    const Matrix v = es.eigenvectors();

    const double spectral_scale = lambda.cwiseAbs().maxCoeff();
    for (Index i = 0; i < lambda.size(); ++i) {
        if (std::abs(lambda(i).imag()) > 1e-8 * (1.0 + spectral_scale)) {
            result.reason = "non-real spectrum";
            return result;
        }
    }

    Eigen::JacobiSVD<Matrix> svd(v);
    const double sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    if (sigma_min <= 0.0 || svd.singularValues()(0) / sigma_min > cond_limit) {
        result.reason = "near-defective eigenbasis";
        return result;
    }
    const Matrix w = v.inverse();

    // Cluster equal eigenvalues so degenerate residues are judged as a sum.
    std::vector<Index> order(static_cast<std::size_t>(lambda.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
    std::sort(order.begin(), order.end(),
              [&](Index i, Index j) { return lambda(i).real() < lambda(j).real(); });

    BernsteinForm form;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string fail_reason;
    const double cluster_tol = 1e-8 * (1.0 + spectral_scale);

    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t stop = start + 1;
        while (stop < order.size() &&
               lambda(order[stop]).real() - lambda(order[start]).real() <= cluster_tol)
            ++stop;
        const double eig = lambda(order[start]).real();
        Matrix residue = Matrix::Zero(mode.p(), mode.m());
        for (std::size_t idx = start; idx < stop; ++idx) {
            const Index i = order[idx];
            residue += (mode.c * v.col(i)) * (w.row(i) * mode.b);
        }
        const double pole_margin = -eig + tol;  // pole = -eig must be >= -tol
        if (pole_margin < worst_margin) worst_margin = pole_margin;
        if (pole_margin < 0.0 && fail_reason.empty())
            fail_reason = "unstable pole at eigenvalue " + std::to_string(eig);

        const auto [res_min, res_max] = hermitian_extremes(residue);
        const double residue_margin = res_min + tol * std::max(1.0, res_max);
        if (residue_margin < worst_margin) worst_margin = residue_margin;
        if (residue_margin < 0.0 && fail_reason.empty())
            fail_reason = "indefinite residue (lmin = " + std::to_string(res_min) + ")";

        form.poles.push_back(std::max(0.0, -eig));
        form.residues.push_back(hermitian_part(residue));
        start = stop;
    }

    result.worst_margin = worst_margin;
    if (fail_reason.empty()) {
        result.outcome = TestOutcome::pass;
        result.form = std::move(form);
    } else {
        result.outcome = TestOutcome::fail;
        result.reason = std::move(fail_reason);
    }
    return result;
}

// ── Internal relaxation form ─────────────────────────────────────────────

// Structural check of A = A^*, A <= tol*I, B = C^*.
struct InternalFormResult {
    bool pass = false;
    double hermitian_defect = 0.0;    // ||A - A^*||
    double max_symmetric_eig = 0.0;   // lmax((A + A^*)/2)
    double collocation_defect = 0.0;  // ||B - C^*||
    double margin = 0.0;              // signed, >= 0 passes
};

inline InternalFormResult internal_form_test(const ModeTriple& mode, double tol = 1e-9) {
    InternalFormResult r;
    r.hermitian_defect = (mode.a - mode.a.adjoint()).norm();
    r.max_symmetric_eig = hermitian_extremes(mode.a).max_eig;
    r.collocation_defect = (mode.b - mode.c.adjoint()).norm();

    const double herm_margin = tol * (1.0 + mode.a.norm()) - r.hermitian_defect;
    const double neg_margin = tol - r.max_symmetric_eig;
    const double colloc_margin = tol * (1.0 + mode.c.norm()) - r.collocation_defect;
    r.margin = std::min({herm_margin, neg_margin, colloc_margin});
    r.pass = r.margin >= 0.0;
    return r;
}

// ── Per-mode verdict ─────────────────────────────────────────────────────

// Aggregated outcome of the per-mode tests (the Hankel verdict is attached
// by the certification pipeline, which owns the quadrature).
struct ModeVerdict {
    RealVector omega;
    TestOutcome cm_by_bernstein = TestOutcome::not_applicable;
    TestOutcome cm_by_moments = TestOutcome::pass;
    int moments_first_failing_k = -1;
    double moments_worst_value = 0.0;
    bool internal_form = false;
    double spectral_abscissa = 0.0;
    bool marginal = false;  // |abscissa| below the marginal threshold
};

inline ModeVerdict analyze_mode(const ModeTriple& mode, const ToleranceSet& tols) {
    ModeVerdict v;
    v.omega = mode.omega;
    v.spectral_abscissa = spectral_abscissa(mode);
    v.marginal = v.spectral_abscissa > -tols.marginal_abscissa;
    if (mode.m() == mode.p()) {
        const MomentTestResult moments = cm_test_moments(mode, tols.moment_k_max, tols.moment);
        v.cm_by_moments = moments.outcome;
        v.moments_first_failing_k = moments.first_failing_k;
        v.moments_worst_value = moments.worst_value;
        v.cm_by_bernstein = cm_test_bernstein(mode, tols.psd).outcome;
    }
    v.internal_form = internal_form_test(mode, tols.hermitian).pass;
    return v;
}

}  // namespace ltsi
