// spectral_sim.hpp — spectral simulation of LTSI systems and the
// storage-from-past-input identity.
//
// On a periodic domain the spatial DFT decouples the dynamics into one
// small LTI system per discrete frequency.  Each mode is integrated
// exactly for the declared input hold by variation of constants, with the
// convolution integrals obtained from one augmented matrix exponential
// (Van Loan blocks):
//
//   expm([[A, I, 0], [0, 0, I], [0, 0, 0]] dt)  ->  E, K1, K2
//   E  = e^{A dt}
//   K1 = int_0^dt e^{A s} ds           (step of a constant input, via K1 B)
//   K2 = int_0^dt (dt - s) e^{A s} ds  (ramp term and power integrals)
//
// The per-step state map is applied in physical space as a circular
// convolution with the kernel obtained by inverse DFT of the per-mode
// propagators.  The map is identical to FFT -> diagonal step -> inverse
// FFT, but every output sample is produced by the same floating-point
// summation pattern relative to its position, so integer-cell translation
// equivariance holds bit-for-bit.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ltsi/core.hpp"
#include "ltsi/hankel.hpp"
#include "ltsi/lti_mode.hpp"

namespace ltsi {

enum class InputHold { piecewise_constant, piecewise_linear };

inline std::string input_hold_name(InputHold h) {
    return h == InputHold::piecewise_constant ? "piecewise-constant" : "piecewise-linear";
}

struct SimulationConfig {
    int spatial_points = 256;   // power of two >= 8
    double domain_length = 40.0;
    double dt = 1e-3;
    double t_start = 0.0;
    double t_end = 1.0;
    InputHold hold = InputHold::piecewise_constant;

    int step_count() const {
        return static_cast<int>(std::llround((t_end - t_start) / dt));
    }

    void validate() const {
        if (spatial_points < 8 || (spatial_points & (spatial_points - 1)) != 0)
            throw ValidationError("SimulationConfig: spatial_points must be a power of two >= 8");
        if (!(dt > 0.0)) throw ValidationError("SimulationConfig: dt must be positive");
        if (!(t_end > t_start)) throw ValidationError("SimulationConfig: t_end must exceed t_start");
        if (!(domain_length > 0.0))
            throw ValidationError("SimulationConfig: domain_length must be positive");
        const double span = t_end - t_start;
        if (std::abs(step_count() * dt - span) > 1e-9 * std::max(1.0, span))
            throw ValidationError("SimulationConfig: (t_end - t_start) must be a multiple of dt");
    }
};

struct ModeState {
    RealVector omega;
    Vector z;
};

// ── Unitary DFT ──────────────────────────────────────────────────────────

namespace detail {

inline void fft_radix2(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw ValidationError("fft: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const Complex w = std::polar(1.0, ang * static_cast<double>(j));
                const Complex u = a[i + j];
                const Complex v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

}  // namespace detail

// Unitary forward DFT: X_k = N^{-1/2} sum_j x_j e^{-2 pi i jk/N}.
inline Vector spatial_fft(const Vector& x) {
    std::vector<Complex> buf(x.begin(), x.end());
    detail::fft_radix2(buf, false);
    Vector out(x.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (Index i = 0; i < x.size(); ++i) out(i) = buf[static_cast<std::size_t>(i)] * scale;
    return out;
}

inline Vector spatial_ifft(const Vector& x) {
    std::vector<Complex> buf(x.begin(), x.end());
    detail::fft_radix2(buf, true);
    Vector out(x.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (Index i = 0; i < x.size(); ++i) out(i) = buf[static_cast<std::size_t>(i)] * scale;
    return out;
}

// Frequencies in FFT bin order: w_k = 2 pi k / L for k < N/2, negative
// wrap-around above.
inline RealVector fft_frequencies(int n, double domain_length) {
    RealVector freq(n);
    for (int k = 0; k < n; ++k) {
        const int signed_k = k < n / 2 ? k : k - n;
        freq(k) = 2.0 * M_PI * static_cast<double>(signed_k) / domain_length;
    }
    return freq;
}

// ── Exact per-mode stepping ──────────────────────────────────────────────

// Precomputed propagator blocks of one mode at a fixed step size.
class ModeStepper {
  public:
    ModeStepper(const ModeTriple& mode, double dt, InputHold hold)
        : c_(mode.c), hold_(hold), dt_(dt) {
        if (!(dt > 0.0)) throw ValidationError("ModeStepper: dt must be positive");
        const Index n = mode.n();
        Matrix van_loan = Matrix::Zero(3 * n, 3 * n);
        van_loan.topLeftCorner(n, n) = mode.a;
        van_loan.block(0, n, n, n) = Matrix::Identity(n, n);
        van_loan.block(n, 2 * n, n, n) = Matrix::Identity(n, n);
        const Matrix big = (van_loan * dt).exp();
        if (!big.allFinite())
            throw OverflowError("ModeStepper: matrix exponential overflow");
        e_ = big.topLeftCorner(n, n);
        k1_ = big.block(0, n, n, n);
        k2_ = big.block(0, 2 * n, n, n);
        j1_ = k1_ * mode.b;
        j2_ = k2_ * mode.b;
        cb_power_ = c_ * k2_ * mode.b;
        ck1_ = c_ * k1_;
    }

    const Matrix& propagator() const { return e_; }
    const Matrix& constant_input_map() const { return j1_; }
    const Matrix& ramp_input_map() const { return j2_; }

    // z(t + dt) from z(t) and the input samples at both step ends.
    Vector step(const Vector& z, const Vector& u_now, const Vector& u_next) const {
        Vector out = e_ * z + j1_ * u_now;
        if (hold_ == InputHold::piecewise_linear)
            out += j2_ * ((u_next - u_now) / dt_);
        return out;
    }

    // Constant-hold step that also returns the exact supplied power
    // int_t^{t+dt} 2 Re<u, y(s)> ds over the step.
    Vector step_with_power(const Vector& z, const Vector& u_now, double* supplied_power) const {
        if (hold_ != InputHold::piecewise_constant)
            throw ValidationError("step_with_power: exact power requires piecewise-constant hold");
        if (supplied_power) {
            const Vector y_int = ck1_ * z + cb_power_ * u_now;  // int_0^dt y(s) ds
            *supplied_power = 2.0 * inner(u_now, y_int).real();
        }
        return e_ * z + j1_ * u_now;
    }

  private:
    Matrix e_, k1_, k2_, j1_, j2_, cb_power_, ck1_, c_;
    InputHold hold_;
    double dt_;
};

// Single variation-of-constants step of one mode.
inline ModeState step_mode(const ModeTriple& mode, const ModeState& state, const Vector& u_now,
                           const Vector& u_next, double dt, InputHold hold) {
    const ModeStepper stepper(mode, dt, hold);
    return {state.omega, stepper.step(state.z, u_now, u_next)};
}

// ── Spectral simulation ──────────────────────────────────────────────────

struct SimulationResult {
    SpatioTemporalField output;           // y(t, x), p channels
    std::vector<ModeState> final_states;  // z_hat_w at t_end, FFT bin order
    std::vector<std::string> warnings;
};

namespace detail {

// Inverse DFT of a per-bin matrix symbol: kernel[r] = (1/N) sum_k M_k e^{+2 pi i kr/N}.
// Circular convolution with kernel reproduces ifft . diag(M) . fft exactly
// in exact arithmetic.
inline std::vector<Matrix> symbol_to_kernel(const std::vector<Matrix>& symbols) {
    const std::size_t n = symbols.size();
    const Index rows = symbols.front().rows();
    const Index cols = symbols.front().cols();
    std::vector<Matrix> kernel(n, Matrix::Zero(rows, cols));
    std::vector<Complex> buf(n);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            for (std::size_t k = 0; k < n; ++k) buf[k] = symbols[k](r, c);
            fft_radix2(buf, true);
            for (std::size_t k = 0; k < n; ++k)
                kernel[k](r, c) = buf[k] / static_cast<double>(n);
        }
    }
    return kernel;
}

// out[j] = sum_r kernel[r] * field[(j - r) mod N]; field and out are
// channel-major (one Vector of length N per channel).
inline void circular_convolve(const std::vector<Matrix>& kernel,
                              const std::vector<Vector>& field, std::vector<Vector>& out) {
    const std::size_t n = kernel.size();
    const Index rows = kernel.front().rows();
    const Index cols = kernel.front().cols();
    for (Index r = 0; r < rows; ++r) out[static_cast<std::size_t>(r)].setZero();
    for (std::size_t j = 0; j < n; ++j) {
        for (Index ro = 0; ro < rows; ++ro) {
            Complex acc(0.0, 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                const std::size_t src = (j + n - r) % n;
                for (Index ci = 0; ci < cols; ++ci)
                    acc += kernel[r](ro, ci) * field[static_cast<std::size_t>(ci)](
                                                   static_cast<Index>(src));
            }
            out[static_cast<std::size_t>(ro)](static_cast<Index>(j)) = acc;
        }
    }
}

}  // namespace detail

// Simulates the family on a periodic spatial grid.  The input field supplies
// u(t, x); `initial_states` (optional, FFT bin order) set z_hat at t_start.
// Output samples share the input's time grid, y(t0) included.
inline SimulationResult simulate(const SymbolFamily& family, const SimulationConfig& config,
                                 const SpatioTemporalField& input,
                                 const std::vector<ModeState>& initial_states = {}) {
    config.validate();
    input.validate();
    const int nx = config.spatial_points;
    const int steps = config.step_count();
    if (input.nx != nx)
        throw ValidationError("simulate: input has " + std::to_string(input.nx) +
                              " spatial points, config expects " + std::to_string(nx));
    if (input.nt != steps + 1)
        throw ValidationError("simulate: input has " + std::to_string(input.nt) +
                              " time samples, config expects " + std::to_string(steps + 1));
    if (input.nc != family.dims.m)
        throw ValidationError("simulate: input channel count must equal m");
    if (std::abs(input.dx * nx - config.domain_length) >
        1e-9 * std::max(1.0, config.domain_length))
        throw ValidationError("simulate: input dx inconsistent with domain length");
    if (!initial_states.empty() && initial_states.size() != static_cast<std::size_t>(nx))
        throw ValidationError("simulate: need one initial state per mode");

    const RealVector freqs = fft_frequencies(nx, config.domain_length);
    const Index n = family.dims.n, m = family.dims.m, p = family.dims.p;

    // per-mode propagator symbols
    std::vector<Matrix> sym_e(static_cast<std::size_t>(nx));
    std::vector<Matrix> sym_j1(static_cast<std::size_t>(nx));
    std::vector<Matrix> sym_j2(static_cast<std::size_t>(nx));
    std::vector<Matrix> sym_c(static_cast<std::size_t>(nx));
    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t k) {
        const ModeTriple mode = evaluate_symbol(family, freqs(static_cast<Index>(k)));
        const ModeStepper stepper(mode, config.dt, config.hold);
        sym_e[k] = stepper.propagator();
        sym_j1[k] = stepper.constant_input_map();
        sym_j2[k] = stepper.ramp_input_map();
        sym_c[k] = mode.c;
    });

    const std::vector<Matrix> kern_e = detail::symbol_to_kernel(sym_e);
    const std::vector<Matrix> kern_j1 = detail::symbol_to_kernel(sym_j1);
    const std::vector<Matrix> kern_c = detail::symbol_to_kernel(sym_c);
    std::vector<Matrix> kern_j2;
    if (config.hold == InputHold::piecewise_linear)
        kern_j2 = detail::symbol_to_kernel(sym_j2);

    // physical state, channel-major
    std::vector<Vector> z(static_cast<std::size_t>(n), Vector::Zero(nx));
    if (!initial_states.empty()) {
        for (Index ch = 0; ch < n; ++ch) {
            Vector modes(nx);
            for (int k = 0; k < nx; ++k)
                modes(k) = initial_states[static_cast<std::size_t>(k)].z(ch);
            z[static_cast<std::size_t>(ch)] = spatial_ifft(modes);
        }
    }

    SimulationResult result;
    result.output = SpatioTemporalField::zeros(steps + 1, nx, p, config.dt,
                                               input.dx, config.t_start, input.x0);

    std::vector<Vector> u_now(static_cast<std::size_t>(m), Vector::Zero(nx));
    std::vector<Vector> u_slope(static_cast<std::size_t>(m), Vector::Zero(nx));
    std::vector<Vector> scratch(static_cast<std::size_t>(std::max(n, p)), Vector::Zero(nx));
    std::vector<Vector> y(static_cast<std::size_t>(p), Vector::Zero(nx));
    std::vector<Vector> z_next(static_cast<std::size_t>(n), Vector::Zero(nx));

    auto load_input = [&](Index it, std::vector<Vector>& dst) {
        for (Index ch = 0; ch < m; ++ch)
            for (int j = 0; j < nx; ++j)
                dst[static_cast<std::size_t>(ch)](j) = input.at(it, j, ch);
    };

    for (int it = 0; it <= steps; ++it) {
        // y(t_it) = C z(t_it)
        detail::circular_convolve(kern_c, z, y);
        for (Index ch = 0; ch < p; ++ch)
            for (int j = 0; j < nx; ++j)
                result.output.at(it, j, ch) = y[static_cast<std::size_t>(ch)](j);
        if (it == steps) break;

        load_input(it, u_now);
        detail::circular_convolve(kern_e, z, z_next);
        detail::circular_convolve(kern_j1, u_now, scratch);
        for (Index ch = 0; ch < n; ++ch)
            z_next[static_cast<std::size_t>(ch)] += scratch[static_cast<std::size_t>(ch)];
        if (config.hold == InputHold::piecewise_linear) {
            load_input(it + 1, u_slope);
            for (Index ch = 0; ch < m; ++ch)
                u_slope[static_cast<std::size_t>(ch)] =
                    (u_slope[static_cast<std::size_t>(ch)] - u_now[static_cast<std::size_t>(ch)]) /
                    config.dt;
            detail::circular_convolve(kern_j2, u_slope, scratch);
            for (Index ch = 0; ch < n; ++ch)
                z_next[static_cast<std::size_t>(ch)] += scratch[static_cast<std::size_t>(ch)];
        }
        for (Index ch = 0; ch < n; ++ch)
            std::swap(z[static_cast<std::size_t>(ch)], z_next[static_cast<std::size_t>(ch)]);
    }

    // final per-mode states
    result.final_states.resize(static_cast<std::size_t>(nx));
    std::vector<Vector> z_hat(static_cast<std::size_t>(n));
    for (Index ch = 0; ch < n; ++ch) z_hat[static_cast<std::size_t>(ch)] =
        spatial_fft(z[static_cast<std::size_t>(ch)]);
    for (int k = 0; k < nx; ++k) {
        ModeState& s = result.final_states[static_cast<std::size_t>(k)];
        s.omega = scalar_omega(freqs(k));
        s.z = Vector(n);
        for (Index ch = 0; ch < n; ++ch) s.z(ch) = z_hat[static_cast<std::size_t>(ch)](k);
    }

    // wrap-around warning: field mass touching the periodic seam
    double boundary = 0.0, peak = 0.0;
    for (Index ch = 0; ch < p; ++ch) {
        for (int it = 0; it <= steps; it += std::max(1, steps / 8)) {
            boundary = std::max(boundary, std::abs(result.output.at(it, 0, ch)));
            for (int j = 0; j < nx; ++j)
                peak = std::max(peak, std::abs(result.output.at(it, j, ch)));
        }
    }
    if (peak > 0.0 && boundary > 1e-8 * peak)
        result.warnings.push_back(
            "field mass reaches the periodic boundary (|y(x0)| = " + std::to_string(boundary) +
            ", peak " + std::to_string(peak) + "); results wrap around");
    return result;
}

// ── Extended controllability / observability maps ────────────────────────

// z_hat_w(0) = sum_j w_j e^{A_w t_j} B_w v_hat_w(t_j): quadrature form of
// the extended controllability map applied to the (time-reversed) past input.
inline std::vector<Vector> controllability_map(const SymbolFamily& family,
                                               const FrequencyGrid& grid,
                                               const TimeQuadrature& quad,
                                               const std::vector<Vector>& past_inputs,
                                               double stability_floor = 1e-6) {
    if (past_inputs.size() != grid.size())
        throw ValidationError("controllability_map: need one past-input vector per grid point");
    std::vector<Vector> states(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        const ModeTriple mode = evaluate_symbol(family, grid.points[k]);
        if (spectral_abscissa(mode) > -stability_floor)
            throw StabilityError("controllability_map: mode at omega = " +
                                 std::to_string(grid.points[k](0)) +
                                 " is not exponentially stable");
        const Index m = mode.m();
        const Vector& v = past_inputs[k];
        if (v.size() != static_cast<Index>(quad.size()) * m)
            throw ValidationError("controllability_map: past input must have length N*m");
        Vector z0 = Vector::Zero(mode.n());
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const Matrix e = mode.n() == 1
                                 ? Matrix::Constant(1, 1, std::exp(mode.a(0, 0) * quad.nodes[j]))
                                 : Matrix((mode.a * quad.nodes[j]).exp());
            z0 += quad.weights[j] * (e * (mode.b * v.segment(static_cast<Index>(j) * m, m)));
        }
        states[k] = z0;
    });
    return states;
}

// y_hat_w(t) = C_w e^{A_w t} z_hat_w(0): the extended observability map.
inline std::vector<Vector> observability_output(const SymbolFamily& family,
                                                const FrequencyGrid& grid,
                                                const std::vector<Vector>& states, double t) {
    if (t < 0.0) throw ValidationError("observability_output: t must be >= 0");
    if (states.size() != grid.size())
        throw ValidationError("observability_output: need one state per grid point");
    std::vector<Vector> outputs(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        const ModeTriple mode = evaluate_symbol(family, grid.points[k]);
        const Matrix e = mode.n() == 1
                             ? Matrix::Constant(1, 1, std::exp(mode.a(0, 0) * t))
                             : Matrix((mode.a * t).exp());
        outputs[k] = mode.c * (e * states[k]);
    });
    return outputs;
}

// ── Storage identity (state norm = past-input/future-output pairing) ─────

struct StorageModeRow {
    RealVector omega;
    double lhs = 0.0;          // ||z(0)||^2
    double rhs = 0.0;          // int <u(-t), y(t)> dt
    double hankel_form = 0.0;  // <H v, v> = 2 H(v)
    double rel_lhs_rhs = 0.0;
    double rel_lhs_hankel = 0.0;
    double rel_rhs_hankel = 0.0;
    double imag_residual = 0.0;
    bool skipped = false;
    std::string note;
};

struct StorageIdentityReport {
    std::vector<StorageModeRow> modes;
    double lhs = 0.0, rhs = 0.0, hankel_form = 0.0;  // grid-aggregated
    double rel_lhs_rhs = 0.0, rel_lhs_hankel = 0.0, rel_rhs_hankel = 0.0;
    double max_rel_error = 0.0;  // max over per-mode and aggregate pairings
    bool any_skipped = false;
};

namespace detail {

inline double rel_gap(double a, double b) {
    const double diff = std::abs(a - b);
    if (diff == 0.0) return 0.0;
    return diff / std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

// Checks ||z(0)||^2 = int_0^inf <u(-t), y(t)> dt = <H v, v> per mode and
// aggregated over the grid.  Every mode must be internally of relaxation
// type; marginal modes are excluded from the aggregation and flagged.
inline StorageIdentityReport storage_identity_check(const SymbolFamily& family,
                                                    const FrequencyGrid& grid,
                                                    const TimeQuadrature& quad,
                                                    const std::vector<Vector>& past_inputs,
                                                    const ToleranceSet& tols = {}) {
    if (past_inputs.size() != grid.size())
        throw ValidationError("storage_identity_check: need one past-input vector per grid point");

    StorageIdentityReport report;
    report.modes.resize(grid.size());

    parallel_for(grid.size(), [&](std::size_t k) {
        const ModeTriple mode = evaluate_symbol(family, grid.points[k]);
        StorageModeRow& row = report.modes[k];
        row.omega = grid.points[k];

        const InternalFormResult internal = internal_form_test(mode, tols.hermitian);
        if (!internal.pass)
            throw HypothesisError(
                "storage_identity_check: mode at omega = " + std::to_string(grid.points[k](0)) +
                " is not internally of relaxation type");

        const double abscissa = spectral_abscissa(mode);
        if (abscissa > -tols.hankel_stability_floor) {
            row.skipped = true;
            row.note = "marginal mode (spectral abscissa " + std::to_string(abscissa) +
                       "), excluded from the storage identity";
            return;
        }

        const Index m = mode.m();
        const Vector& v = past_inputs[k];
        if (v.size() != static_cast<Index>(quad.size()) * m)
            throw ValidationError("storage_identity_check: past input must have length N*m");

        // z(0) by the controllability map
        Vector z0 = Vector::Zero(mode.n());
        std::vector<Matrix> expms(quad.size());
        for (std::size_t j = 0; j < quad.size(); ++j) {
            expms[j] = mode.n() == 1
                           ? Matrix::Constant(1, 1, std::exp(mode.a(0, 0) * quad.nodes[j]))
                           : Matrix((mode.a * quad.nodes[j]).exp());
            z0 += quad.weights[j] * (expms[j] * (mode.b * v.segment(static_cast<Index>(j) * m, m)));
        }
        row.lhs = z0.squaredNorm();

        // int <u(-t), y(t)> dt with u(-t) = v(t), y(t) = C e^{At} z(0)
        Complex pairing(0.0, 0.0);
        for (std::size_t j = 0; j < quad.size(); ++j) {
            const Vector y_j = mode.c * (expms[j] * z0);
            pairing += quad.weights[j] * inner(v.segment(static_cast<Index>(j) * m, m), y_j);
        }
        row.rhs = pairing.real();
        row.imag_residual = std::abs(pairing.imag());

        // <H v, v> through the per-mode Hankel form
        row.hankel_form = mode_hankel_form(mode, quad, v, v).real();

        row.rel_lhs_rhs = detail::rel_gap(row.lhs, row.rhs);
        row.rel_lhs_hankel = detail::rel_gap(row.lhs, row.hankel_form);
        row.rel_rhs_hankel = detail::rel_gap(row.rhs, row.hankel_form);
    });

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const StorageModeRow& row = report.modes[k];
        if (row.skipped) {
            report.any_skipped = true;
            continue;
        }
        report.lhs += grid.weights[k] * row.lhs;
        report.rhs += grid.weights[k] * row.rhs;
        report.hankel_form += grid.weights[k] * row.hankel_form;
        report.max_rel_error = std::max({report.max_rel_error, row.rel_lhs_rhs,
                                         row.rel_lhs_hankel, row.rel_rhs_hankel});
    }
    report.rel_lhs_rhs = detail::rel_gap(report.lhs, report.rhs);
    report.rel_lhs_hankel = detail::rel_gap(report.lhs, report.hankel_form);
    report.rel_rhs_hankel = detail::rel_gap(report.rhs, report.hankel_form);
    report.max_rel_error = std::max({report.max_rel_error, report.rel_lhs_rhs,
                                     report.rel_lhs_hankel, report.rel_rhs_hankel});
    return report;
}

}  // namespace ltsi
