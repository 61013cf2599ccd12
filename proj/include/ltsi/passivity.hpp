// passivity.hpp — impedance-passivity certificates.
//
// A family is impedance passive iff there are Hermitian Q_w >= 0 with
//
//     C_w = B_w^* Q_w,   A_w^* Q_w + Q_w A_w <= 0,   sup_w ||Q_w|| < inf,
//
// in which case S(z) = <Q z, z> is a storage functional.  For internally
// relaxation families Q = I works and the storage is the squared state
// norm.  This module verifies supplied or canonical certificates per mode;
// a least-norm heuristic synthesizes a candidate Q for non-collocated
// realizations (its failure proves nothing).

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltsi/core.hpp"
#include "ltsi/lti_mode.hpp"

namespace ltsi {

// Per-mode storage metrics Q_w aligned with a frequency grid.
struct PassivityCertificate {
    std::vector<RealVector> omegas;
    std::vector<Matrix> q_per_mode;
    double sup_norm = 0.0;  // max over the grid of the operator norm of Q_w

    std::size_t size() const { return q_per_mode.size(); }

    void recompute_sup_norm() {
        sup_norm = 0.0;
        for (const Matrix& q : q_per_mode) {
            Eigen::JacobiSVD<Matrix> svd(q);
            sup_norm = std::max(sup_norm, svd.singularValues()(0));
        }
    }

    std::ptrdiff_t find_mode(const RealVector& omega) const {
        for (std::size_t k = 0; k < omegas.size(); ++k)
            if (omegas[k].size() == omega.size() && (omegas[k] - omega).norm() == 0.0)
                return static_cast<std::ptrdiff_t>(k);
        return -1;
    }
};

// ── Certificate verification ─────────────────────────────────────────────

// Pointwise check of the passivity conditions for every grid mode.  The
// sup-norm finiteness has no finite-grid witness; a growth warning fires
// when the boundary ||Q|| exceeds ten times the interior median.
inline Certificate verify_certificate(const SymbolFamily& family, const FrequencyGrid& grid,
                                      const PassivityCertificate& cert,
                                      const ToleranceSet& tols = {}) {
    Certificate out;
    out.property = Property::passivity;
    out.tolerances = tols;
    const double tol = tols.passivity;

    std::vector<std::vector<Evidence>> evidence(grid.size());
    std::vector<double> q_norms(grid.size());

    parallel_for(grid.size(), [&](std::size_t k) {
        const RealVector& omega = grid.points[k];
        const std::ptrdiff_t idx = cert.find_mode(omega);
        if (idx < 0)
            throw ValidationError("verify_certificate: certificate is missing mode at omega = " +
                                  std::to_string(omega(0)));
        const Matrix& q = cert.q_per_mode[static_cast<std::size_t>(idx)];
        const ModeTriple mode = evaluate_symbol(family, omega);
        if (mode.m() != mode.p())
            throw ValidationError("verify_certificate: transfer must be square (m = p)");
        if (q.rows() != mode.n() || q.cols() != mode.n())
            throw ValidationError("verify_certificate: Q has wrong dimension");

        std::vector<Evidence>& rows = evidence[k];

        const double q_min = hermitian_extremes(q).min_eig;
        rows.push_back({omega, "storage_psd", q_min + tol, q_min, kNoValue, ""});

        const double eq_defect = (mode.c - mode.b.adjoint() * q).norm();
        const double eq_scale = 1.0 + mode.c.norm();
        rows.push_back({omega, "output_equation", tol * eq_scale - eq_defect, eq_defect, kNoValue, ""});

        const Matrix lyap = mode.a.adjoint() * q + q * mode.a;
        const double lyap_max = hermitian_extremes(lyap).max_eig;
        rows.push_back({omega, "dissipation", tol - lyap_max, lyap_max, kNoValue, ""});

        Eigen::JacobiSVD<Matrix> svd(q);
        q_norms[k] = svd.singularValues()(0);
    });

    for (std::size_t k = 0; k < grid.size(); ++k)
        for (Evidence& e : evidence[k]) out.per_mode_evidence.push_back(std::move(e));

    // boundary growth warning (finite grids cannot witness sup over all w)
    if (grid.size() >= 3) {
        std::vector<double> interior(q_norms.begin() + 1, q_norms.end() - 1);
        std::nth_element(interior.begin(), interior.begin() + interior.size() / 2,
                         interior.end());
        const double median = interior[interior.size() / 2];
        const double boundary = std::max(q_norms.front(), q_norms.back());
        if (median > 0.0 && boundary > 10.0 * median)
            out.warnings.push_back(
                "certificate norm grows toward the grid boundary (||Q|| = " +
                std::to_string(boundary) + " vs interior median " + std::to_string(median) +
                "); sup-norm finiteness is not witnessed by a finite grid");
    }
    out.finalize();
    return out;
}

// ── Canonical certificate for internal relaxation ────────────────────────

// Canonical route: if every grid mode is internally of relaxation type,
// Q_w = I certifies impedance passivity with storage ||z||^2.
inline PassivityCertificate identity_certificate(const SymbolFamily& family,
                                                 const FrequencyGrid& grid,
                                                 const ToleranceSet& tols = {}) {
    PassivityCertificate cert;
    cert.omegas = grid.points;
    cert.q_per_mode.resize(grid.size());
    std::vector<std::string> failures(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        const ModeTriple mode = evaluate_symbol(family, grid.points[k]);
        const InternalFormResult internal = internal_form_test(mode, tols.hermitian);
        if (!internal.pass)
            failures[k] = "mode at omega = " + std::to_string(grid.points[k](0)) +
                          " is not internally of relaxation type (margin " +
                          std::to_string(internal.margin) + ")";
        cert.q_per_mode[k] = Matrix::Identity(mode.n(), mode.n());
    });
    for (const std::string& f : failures)
        if (!f.empty()) throw StructuralError("identity_certificate: " + f);
    cert.sup_norm = 1.0;
    return cert;
}

// ── Least-norm Lyapunov candidate ────────────────────────────────────────

struct LyapunovCandidate {
    bool success = false;
    Matrix q;
    double q_min_eig = 0.0;
    double lyapunov_max_eig = 0.0;   // lmax(A^* Q + Q A)
    double equation_defect = 0.0;    // ||C - B^* Q||
};

// Solves C = B^* Q for the least-norm Hermitian Q when B has full column
// rank, then checks Q >= 0 and A^* Q + Q A <= 0.  Heuristic only: failure
// does not disprove passivity (Lemma-level existence is not searchable on
// the full operator class).
inline LyapunovCandidate lyapunov_candidate(const ModeTriple& mode,
                                            const ToleranceSet& tols = {}) {
    if (mode.m() != mode.p())
        throw ValidationError("lyapunov_candidate: transfer must be square (m = p)");
    if (spectral_abscissa(mode) >= 0.0)
        throw StabilityError("lyapunov_candidate: mode must be exponentially stable");

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(mode.b);
    if (cod.rank() < mode.b.cols())
        throw UnderdeterminedError(
            "lyapunov_candidate: B is column-rank deficient; the constraint C = B^*Q does "
            "not determine Q on the deficient directions");
    const Matrix b_pinv = cod.pseudoInverse();  // m x n

    // Least-norm Hermitian solution of Q B = C^*:
    //   Q = M B^+ + (B^+)^* M^* - (B^+)^* (B^* M) B^+,  M = C^*.
    const Matrix m = mode.c.adjoint();  // n x m
    const Matrix q_raw = m * b_pinv + b_pinv.adjoint() * m.adjoint() -
                         b_pinv.adjoint() * (mode.b.adjoint() * m) * b_pinv;
    LyapunovCandidate result;
    result.q = hermitian_part(q_raw);

    result.equation_defect = (mode.c - mode.b.adjoint() * result.q).norm();
    result.q_min_eig = hermitian_extremes(result.q).min_eig;
    const Matrix lyap = mode.a.adjoint() * result.q + result.q * mode.a;
    result.lyapunov_max_eig = hermitian_extremes(lyap).max_eig;

    const double tol = tols.passivity;
    result.success = result.equation_defect <= tol * (1.0 + mode.c.norm()) &&
                     result.q_min_eig >= -tol && result.lyapunov_max_eig <= tol;
    return result;
}

// ── Storage evaluation ───────────────────────────────────────────────────

// S(z) = Re <Q_w z, z> at one certified mode; tiny negatives are clamped,
// substantial ones indicate an inconsistent certificate.
inline double storage_value(const PassivityCertificate& cert, const RealVector& omega,
                            const Vector& z, const ToleranceSet& tols = {}) {
    const std::ptrdiff_t idx = cert.find_mode(omega);
    if (idx < 0)
        throw ValidationError("storage_value: omega is not on the certificate grid");
    const Matrix& q = cert.q_per_mode[static_cast<std::size_t>(idx)];
    if (z.size() != q.rows())
        throw ValidationError("storage_value: state has wrong dimension");
    const double value = inner(Vector(q * z), z).real();
    const double floor = tols.passivity * std::max(1.0, cert.sup_norm) * z.squaredNorm();
    if (value < -floor)
        throw CertificateError("storage_value: negative storage " + std::to_string(value) +
                               " exceeds the certificate tolerance");
    return std::max(value, 0.0);
}

}  // namespace ltsi
