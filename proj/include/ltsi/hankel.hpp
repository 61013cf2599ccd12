// hankel.hpp — discretized Hankel operator of a per-frequency mode.
//
// The Hankel operator (Hv)(t) = int_0^inf g(t+tau) v(tau) dtau maps the
// time-reversed past input to the future output.  A stable mode is of
// relaxation type iff H is self-adjoint and nonnegative; on a quadrature
// grid {t_i, w_i} this becomes PSD-ness of the symmetrically weighted
// block matrix
//
//     H_ij = sqrt(w_i w_j) g(t_i + t_j),
//
// whose matrix inner product represents the weighted-l2 operator form.

#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ltsi/core.hpp"
#include "ltsi/lti_mode.hpp"

namespace ltsi {

enum class QuadratureScheme { truncated_trapezoid, gauss_laguerre };

inline std::string quadrature_scheme_name(QuadratureScheme s) {
    return s == QuadratureScheme::truncated_trapezoid ? "truncated-trapezoid"
                                                      : "gauss-laguerre";
}

// Nodes and weights approximating int_0^inf f(t) dt for f decaying at least
// like e^{-decay_rate * t}.
struct TimeQuadrature {
    std::vector<double> nodes;    // ascending, >= 0
    std::vector<double> weights;  // positive
    QuadratureScheme scheme = QuadratureScheme::truncated_trapezoid;
    double horizon = 0.0;  // T for truncated schemes, last node for Laguerre

    std::size_t size() const { return nodes.size(); }
};

// ── Quadrature construction ──────────────────────────────────────────────

// Uniform nodes on [0, T] with composite trapezoid weights.
inline TimeQuadrature make_trapezoid_quadrature(int n, double horizon) {
    if (n < 2) throw ValidationError("make_trapezoid_quadrature: need n >= 2");
    if (!(horizon > 0.0)) throw ValidationError("make_trapezoid_quadrature: horizon must be > 0");
    TimeQuadrature q;
    q.scheme = QuadratureScheme::truncated_trapezoid;
    q.horizon = horizon;
    const double h = horizon / (n - 1);
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        q.nodes[static_cast<std::size_t>(i)] = h * i;
        q.weights[static_cast<std::size_t>(i)] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
    return q;
}

namespace detail {

// Scaled Laguerre functions psi_k(x) = e^{-x/2} L_k(x) share the classical
// three-term recurrence and stay bounded where L_k overflows, which keeps
// node polishing and weight evaluation finite up to large n.
inline void scaled_laguerre_pair(int n, double x, double& psi_n, double& psi_np1) {
    double prev = std::exp(-0.5 * x);  // psi_0
    double curr = (1.0 - x) * prev;    // psi_1
    if (n == 0) {
        psi_n = prev;
        psi_np1 = curr;
        return;
    }
    for (int k = 1; k <= n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * curr - k * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    psi_n = prev;
    psi_np1 = curr;
}

}  // namespace detail

// Gauss-Laguerre rule rescaled by `rate`: integrates int_0^inf f(t) dt with
// the e^{-x} factor folded into the weights, so weights already include the
// exponential compensation.
inline TimeQuadrature make_gauss_laguerre_quadrature(int n, double rate) {
    if (n < 1) throw ValidationError("make_gauss_laguerre_quadrature: need n >= 1");
    if (!(rate > 0.0))
        throw StabilityError("make_gauss_laguerre_quadrature: decay rate must be > 0");

    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix
    // diag(1, 3, 5, ...) with off-diagonal (1, 2, 3, ...).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        jacobi(k, k) = 2.0 * k + 1.0;
        if (k + 1 < n) {
            jacobi(k, k + 1) = k + 1.0;
            jacobi(k + 1, k) = k + 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("gauss-laguerre: Jacobi eigensolver failed");

    TimeQuadrature q;
    q.scheme = QuadratureScheme::gauss_laguerre;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        // Newton polish on L_n(x) = 0 via L_n'(x) = n (L_n - L_{n-1}) / x;
        // the e^{-x/2} scaling cancels in the ratio.
        for (int it = 0; it < 3; ++it) {
            double psi_nm1, psi_n;
            detail::scaled_laguerre_pair(n - 1, x, psi_nm1, psi_n);
            const double deriv = n * (psi_n - psi_nm1) / x;
            if (deriv == 0.0) break;
            const double step = psi_n / deriv;
            x -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
        }
        // w_i e^{x_i} = x_i / ((n+1)^2 psi_{n+1}(x_i)^2)
        double psi_n, psi_np1;
        detail::scaled_laguerre_pair(n, x, psi_n, psi_np1);
        const double denom = (n + 1.0) * (n + 1.0) * psi_np1 * psi_np1;
        if (denom <= 0.0)
            throw NumericalError("gauss-laguerre: weight underflow at node " + std::to_string(x));
        q.nodes[static_cast<std::size_t>(i)] = x / rate;
        q.weights[static_cast<std::size_t>(i)] = x / denom / rate;
    }
    // eigenvalues arrive ascending and the Newton polish cannot reorder them
    q.horizon = q.nodes.back();
    return q;
}

// Default tail threshold: truncate where e^{-decay_rate * T} = eps_tail.
inline TimeQuadrature build_quadrature(QuadratureScheme scheme, int n, double decay_rate,
                                       double eps_tail = 1e-10) {
    if (!(decay_rate > 0.0))
        throw StabilityError(
            "build_quadrature: nonpositive decay rate, cannot bound the horizon "
            "(marginal mode)");
    if (scheme == QuadratureScheme::truncated_trapezoid) {
        const double horizon = std::log(1.0 / eps_tail) / decay_rate;
        return make_trapezoid_quadrature(n, horizon);
    }
    return make_gauss_laguerre_quadrature(n, decay_rate);
}

// ── Hankel discretization ────────────────────────────────────────────────

// Weighted block matrix H_ij = sqrt(w_i w_j) g(t_i + t_j) together with the
// self-adjointness defect and the extreme eigenvalues of its Hermitian part.
struct HankelDiscretization {
    TimeQuadrature quadrature;
    Matrix matrix;  // (N*m) x (N*m)
    Index block = 1;
    double symmetry_defect = 0.0;  // ||H - H^*|| / max(1, ||H||)
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

namespace detail {

// g(t_i + t_j) for all node pairs.  Uniform grids hit only 2N-1 distinct
// sums; general grids evaluate the upper triangle.
inline bool uniform_from_zero(const TimeQuadrature& quad) {
    if (quad.nodes.empty() || quad.nodes.front() != 0.0) return false;
    if (quad.size() < 2) return true;
    const double h = quad.nodes[1];
    for (std::size_t i = 0; i < quad.size(); ++i)
        if (std::abs(quad.nodes[i] - h * static_cast<double>(i)) > 1e-12 * (1.0 + h * i))
            return false;
    return true;
}

inline std::vector<Matrix> impulse_on_node_sums(const ModeTriple& mode,
                                                const TimeQuadrature& quad,
                                                std::vector<std::pair<int, int>>* pair_index) {
    const int n = static_cast<int>(quad.size());
    std::vector<Matrix> values;
    pair_index->assign(static_cast<std::size_t>(n) * n, {0, 0});
    if (uniform_from_zero(quad)) {
        // only 2N-1 distinct node sums on a uniform grid
        const double h = n > 1 ? quad.nodes[1] - quad.nodes[0] : 0.0;
        values.reserve(static_cast<std::size_t>(2 * n - 1));
        for (int k = 0; k <= 2 * n - 2; ++k)
            values.push_back(impulse_response(mode, h * k));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                (*pair_index)[static_cast<std::size_t>(i) * n + j] = {i + j, 0};
    } else {
        values.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
        int idx = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                values.push_back(impulse_response(mode, quad.nodes[static_cast<std::size_t>(i)] +
                                                            quad.nodes[static_cast<std::size_t>(j)]));
                (*pair_index)[static_cast<std::size_t>(i) * n + j] = {idx, 0};
                (*pair_index)[static_cast<std::size_t>(j) * n + i] = {idx, 0};
                ++idx;
            }
        }
    }
    return values;
}

inline Matrix assemble_weighted_hankel(const ModeTriple& mode, const TimeQuadrature& quad) {
    const Index m = mode.m();
    const int n = static_cast<int>(quad.size());
    std::vector<std::pair<int, int>> pair_index;
    const std::vector<Matrix> g = impulse_on_node_sums(mode, quad, &pair_index);

    Matrix h(static_cast<Index>(n) * m, static_cast<Index>(n) * m);
    std::vector<double> sqrt_w(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) sqrt_w[i] = std::sqrt(quad.weights[i]);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Matrix& block = g[static_cast<std::size_t>(
                pair_index[static_cast<std::size_t>(i) * n + j].first)];
            h.block(static_cast<Index>(i) * m, static_cast<Index>(j) * m, m, m) =
                sqrt_w[static_cast<std::size_t>(i)] * sqrt_w[static_cast<std::size_t>(j)] * block;
        }
    }
    return h;
}

}  // namespace detail

// Builds the weighted Hankel matrix of an exponentially stable mode and
// records its symmetry defect and extreme eigenvalues.
inline HankelDiscretization build_hankel(const ModeTriple& mode, const TimeQuadrature& quad,
                                         double stability_floor = 1e-6) {
    if (mode.m() != mode.p())
        throw ValidationError("build_hankel: transfer must be square (m = p)");
    const double abscissa = spectral_abscissa(mode);
    if (abscissa > -stability_floor)
        throw StabilityError("build_hankel: mode is not exponentially stable "
                             "(spectral abscissa " + std::to_string(abscissa) + ")");

    HankelDiscretization disc;
    disc.quadrature = quad;
    disc.block = mode.m();
    disc.matrix = detail::assemble_weighted_hankel(mode, quad);

    const double scale = disc.matrix.norm();
    disc.symmetry_defect = (disc.matrix - disc.matrix.adjoint()).norm() / std::max(1.0, scale);
    const auto [min_eig, max_eig] = hermitian_extremes(disc.matrix);
    disc.min_eigenvalue = min_eig;
    disc.max_eigenvalue = max_eig;
    return disc;
}

// PSD test of the discretized operator: self-adjoint within tol and
// lmin >= -tol * max(1, lmax).
inline bool hankel_psd_test(const HankelDiscretization& disc, double tol = 1e-9) {
    if (disc.symmetry_defect > tol) return false;
    return disc.min_eigenvalue >= -tol * std::max(1.0, disc.max_eigenvalue);
}

// Signed margin of the PSD test (>= 0 passes); used as certificate evidence.
inline double hankel_psd_margin(const HankelDiscretization& disc, double tol = 1e-9) {
    const double sym_margin = tol - disc.symmetry_defect;
    const double eig_margin =
        disc.min_eigenvalue + tol * std::max(1.0, disc.max_eigenvalue);
    return std::min(sym_margin, eig_margin);
}

// ── Operator application and the memory functional ───────────────────────

// Quadrature approximation of (Hv)(t_i) = sum_j w_j g(t_i + t_j) v(t_j),
// reusing the stored weighted matrix: y = D^{-1/2} H D^{1/2} v.
inline Vector apply_hankel(const HankelDiscretization& disc, const Vector& v) {
    const Index nm = disc.matrix.rows();
    if (v.size() != nm)
        throw ValidationError("apply_hankel: expected vector of length " + std::to_string(nm) +
                              ", got " + std::to_string(v.size()));
    Vector scaled(nm);
    const Index m = disc.block;
    for (Index i = 0; i < nm; ++i) {
        const double w = disc.quadrature.weights[static_cast<std::size_t>(i / m)];
        scaled(i) = v(i) * std::sqrt(w);
    }
    Vector hy = disc.matrix * scaled;
    for (Index i = 0; i < nm; ++i) {
        const double w = disc.quadrature.weights[static_cast<std::size_t>(i / m)];
        hy(i) /= std::sqrt(w);
    }
    return hy;
}

// Memory functional  H(v) = 1/2 <Hv, v>  in the weighted-l2 inner product.
// Real part returned; the imaginary residual (zero for self-adjoint H) is
// reported through `imag_residual` when provided.
inline double memory_functional(const HankelDiscretization& disc, const Vector& v,
                                double* imag_residual = nullptr) {
    const Vector hv = apply_hankel(disc, v);
    Complex form(0.0, 0.0);
    const Index m = disc.block;
    for (std::size_t i = 0; i < disc.quadrature.size(); ++i) {
        const Vector lhs = hv.segment(static_cast<Index>(i) * m, m);
        const Vector rhs = v.segment(static_cast<Index>(i) * m, m);
        form += disc.quadrature.weights[i] * inner(lhs, rhs);
    }
    if (imag_residual) *imag_residual = std::abs(form.imag());
    return 0.5 * form.real();
}

// ── Plancherel aggregation across the frequency grid ─────────────────────

// <H v_hat_w, w_hat_w> for one mode by direct quadrature; no stability gate,
// the double sum is finite for any bounded g on the node range.
inline Complex mode_hankel_form(const ModeTriple& mode, const TimeQuadrature& quad,
                                const Vector& v_hat, const Vector& w_hat) {
    if (mode.m() != mode.p())
        throw ValidationError("mode_hankel_form: transfer must be square (m = p)");
    const Index m = mode.m();
    const Index nm = static_cast<Index>(quad.size()) * m;
    if (v_hat.size() != nm || w_hat.size() != nm)
        throw ValidationError("mode_hankel_form: vectors must have length N*m");
    std::vector<std::pair<int, int>> pair_index;
    const std::vector<Matrix> g = detail::impulse_on_node_sums(mode, quad, &pair_index);
    const int n = static_cast<int>(quad.size());
    Complex form(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        Vector hv_i = Vector::Zero(mode.p());
        for (int j = 0; j < n; ++j) {
            const Matrix& block = g[static_cast<std::size_t>(
                pair_index[static_cast<std::size_t>(i) * n + j].first)];
            hv_i += quad.weights[static_cast<std::size_t>(j)] *
                    (block * v_hat.segment(static_cast<Index>(j) * m, m));
        }
        form += quad.weights[static_cast<std::size_t>(i)] *
                inner(hv_i, w_hat.segment(static_cast<Index>(i) * m, m));
    }
    return form;
}

// sum_k W_k <H_{w_k} v_hat_k, w_hat_k>: the Plancherel aggregation of
// per-mode Hankel forms over the frequency grid.
inline Complex aggregate_hankel_form(const SymbolFamily& family, const FrequencyGrid& grid,
                                     const TimeQuadrature& quad,
                                     const std::vector<Vector>& v_hats,
                                     const std::vector<Vector>& w_hats) {
    if (v_hats.size() != grid.size() || w_hats.size() != grid.size())
        throw ValidationError("aggregate_hankel_form: need one vector pair per grid point");
    std::vector<Complex> forms(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        const ModeTriple mode = evaluate_symbol(family, grid.points[k]);
        forms[k] = mode_hankel_form(mode, quad, v_hats[k], w_hats[k]);
    });
    Complex total(0.0, 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) total += grid.weights[k] * forms[k];
    return total;
}

}  // namespace ltsi
