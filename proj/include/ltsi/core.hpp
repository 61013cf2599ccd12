// core.hpp — domain types shared by every analysis module:
// frequency-indexed LTI triples (A_w, B_w, C_w), symbol families,
// frequency grids, space-time fields, tolerances and certificates.
//
// A linear time-and-space-invariant (LTSI) system decouples under the
// spatial Fourier transform into a family of finite-dimensional LTI
// systems indexed by the spatial frequency w.  Everything downstream
// (monotonicity tests, Hankel positivity, passivity certificates) is a
// per-mode computation over these triples plus a quadrature aggregation
// over w.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace ltsi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// ── Errors ───────────────────────────────────────────────────────────────

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExtrapolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedDimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Mode is not exponentially stable enough for a semi-infinite quadrature.
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A structural hypothesis (internal relaxation) is violated.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnderdeterminedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OverflowError : NumericalError {
    using NumericalError::NumericalError;
};

// ── Dimensions ───────────────────────────────────────────────────────────

// n: state, m: input, p: output, s: spatial dimension of the frequency
// variable w (s = 1 is the fully supported scope).
struct Dims {
    Index n = 1;
    Index m = 1;
    Index p = 1;
    int s = 1;

    bool operator==(const Dims&) const = default;
};

// ── ModeTriple ───────────────────────────────────────────────────────────

// One frequency-indexed LTI system (A_w, B_w, C_w).  Units: A in 1/time.
struct ModeTriple {
    Matrix a;          // n x n
    Matrix b;          // n x m
    Matrix c;          // p x n
    RealVector omega;  // spatial frequency, length s

    Index n() const { return a.rows(); }
    Index m() const { return b.cols(); }
    Index p() const { return c.rows(); }

    // Throws ValidationError on dimension inconsistency or non-finite data.
    void validate() const {
        if (a.rows() != a.cols())
            throw ValidationError("ModeTriple: A must be square, got " +
                                  std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
        if (b.rows() != a.rows())
            throw ValidationError("ModeTriple: B must have n rows");
        if (c.cols() != a.rows())
            throw ValidationError("ModeTriple: C must have n columns");
        if (!a.allFinite() || !b.allFinite() || !c.allFinite())
            throw ValidationError("ModeTriple: non-finite entry");
        if (!omega.allFinite())
            throw ValidationError("ModeTriple: non-finite frequency");
    }
};

inline RealVector scalar_omega(double w) {
    RealVector v(1);
    v(0) = w;
    return v;
}

// ── SymbolFamily ─────────────────────────────────────────────────────────

enum class FamilyKind {
    diffusion,             // A = -alpha*|w|^2, B = C = 1
    shifted_diffusion,     // A = -alpha*|w|^2 - kappa
    damped_oscillator,     // constant-in-w second-order mode; the canonical
                           // non-relaxation counterexample
    diagonal_exponential,  // A = -diag(p_i(w)), B = C^* = sqrt(residues)
    tabulated,             // sorted (w, ModeTriple) samples, linear interpolation
};

inline std::string family_kind_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::diffusion: return "diffusion";
        case FamilyKind::shifted_diffusion: return "shifted-diffusion";
        case FamilyKind::damped_oscillator: return "damped-oscillator";
        case FamilyKind::diagonal_exponential: return "diagonal-exponential";
        case FamilyKind::tabulated: return "tabulated";
    }
    return "unknown";
}

// One decaying-exponential channel of a diagonal family:
// pole curve p(w) = pole + curvature*|w|^2, residue >= 0.
struct DiagExpTerm {
    double pole = 1.0;
    double curvature = 0.0;
    double residue = 1.0;
};

// Frequency-domain representation of an LTSI system: a map w -> ModeTriple,
// either a named parametric law or a tabulated sample set.
struct SymbolFamily {
    FamilyKind kind = FamilyKind::diffusion;
    Dims dims;

    // parametric parameters (meaning depends on kind)
    double alpha = 1.0;   // diffusivity
    double kappa = 0.0;   // spectral shift
    double zeta = 0.1;    // oscillator damping ratio
    double omega0 = 1.0;  // oscillator natural frequency

    std::vector<DiagExpTerm> terms;   // diagonal_exponential
    std::vector<ModeTriple> samples;  // tabulated, sorted ascending by omega

    std::string continuity_note;

    static SymbolFamily diffusion(double alpha) {
        SymbolFamily f;
        f.kind = FamilyKind::diffusion;
        f.alpha = alpha;
        f.dims = {1, 1, 1, 1};
        return f;
    }

    static SymbolFamily shifted_diffusion(double alpha, double kappa) {
        SymbolFamily f;
        f.kind = FamilyKind::shifted_diffusion;
        f.alpha = alpha;
        f.kappa = kappa;
        f.dims = {1, 1, 1, 1};
        return f;
    }

    static SymbolFamily damped_oscillator(double zeta, double omega0 = 1.0) {
        SymbolFamily f;
        f.kind = FamilyKind::damped_oscillator;
        f.zeta = zeta;
        f.omega0 = omega0;
        f.dims = {2, 1, 1, 1};
        return f;
    }

    static SymbolFamily diagonal_exponential(std::vector<DiagExpTerm> terms) {
        SymbolFamily f;
        f.kind = FamilyKind::diagonal_exponential;
        f.terms = std::move(terms);
        f.dims = {static_cast<Index>(f.terms.size()), 1, 1, 1};
        return f;
    }

    static SymbolFamily tabulated(std::vector<ModeTriple> samples) {
        SymbolFamily f;
        f.kind = FamilyKind::tabulated;
        f.samples = std::move(samples);
        if (!f.samples.empty()) {
            const ModeTriple& s0 = f.samples.front();
            f.dims = {s0.n(), s0.m(), s0.p(), static_cast<int>(s0.omega.size())};
        }
        std::sort(f.samples.begin(), f.samples.end(),
                  [](const ModeTriple& x, const ModeTriple& y) {
                      return std::lexicographical_compare(
                          x.omega.begin(), x.omega.end(), y.omega.begin(), y.omega.end());
                  });
        return f;
    }
};

// ── Symbol evaluation ────────────────────────────────────────────────────

namespace detail {

inline double squared_norm(const RealVector& omega) { return omega.squaredNorm(); }

inline ModeTriple interpolate_samples(const ModeTriple& lo, const ModeTriple& hi,
                                      double t, const RealVector& omega) {
    ModeTriple out;
    out.a = (1.0 - t) * lo.a + t * hi.a;
    out.b = (1.0 - t) * lo.b + t * hi.b;
    out.c = (1.0 - t) * lo.c + t * hi.c;
    out.omega = omega;
    return out;
}

}  // namespace detail

// Evaluates the family's symbol at frequency w.  Parametric families are
// defined for every finite w; tabulated families interpolate linearly and
// refuse to extrapolate outside the sampled hull.
inline ModeTriple evaluate_symbol(const SymbolFamily& family, const RealVector& omega) {
    if (!omega.allFinite())
        throw ValidationError("evaluate_symbol: non-finite frequency");
    if (family.kind != FamilyKind::tabulated &&
        omega.size() != family.dims.s)
        throw ValidationError("evaluate_symbol: frequency has length " +
                              std::to_string(omega.size()) + ", family expects s = " +
                              std::to_string(family.dims.s));

    const double w2 = detail::squared_norm(omega);
    ModeTriple mode;
    mode.omega = omega;

    switch (family.kind) {
        case FamilyKind::diffusion: {
            mode.a = Matrix::Constant(1, 1, Complex(-family.alpha * w2, 0.0));
            mode.b = Matrix::Identity(1, 1);
            mode.c = Matrix::Identity(1, 1);
            return mode;
        }
        case FamilyKind::shifted_diffusion: {
            mode.a = Matrix::Constant(1, 1, Complex(-family.alpha * w2 - family.kappa, 0.0));
            mode.b = Matrix::Identity(1, 1);
            mode.c = Matrix::Identity(1, 1);
            return mode;
        }
        case FamilyKind::damped_oscillator: {
            const double w0 = family.omega0;
            mode.a = Matrix::Zero(2, 2);
            mode.a(0, 1) = 1.0;
            mode.a(1, 0) = -w0 * w0;
            mode.a(1, 1) = -2.0 * family.zeta * w0;
            mode.b = Matrix::Zero(2, 1);
            mode.b(1, 0) = 1.0;
            mode.c = Matrix::Zero(1, 2);
            mode.c(0, 1) = 1.0;
            return mode;
        }
        case FamilyKind::diagonal_exponential: {
            const Index n = static_cast<Index>(family.terms.size());
            mode.a = Matrix::Zero(n, n);
            mode.b = Matrix::Zero(n, 1);
            mode.c = Matrix::Zero(1, n);
            for (Index i = 0; i < n; ++i) {
                const DiagExpTerm& term = family.terms[static_cast<std::size_t>(i)];
                mode.a(i, i) = Complex(-(term.pole + term.curvature * w2), 0.0);
                const double r = std::sqrt(std::max(term.residue, 0.0));
                mode.b(i, 0) = r;
                mode.c(0, i) = r;
            }
            return mode;
        }
        case FamilyKind::tabulated: {
            if (family.samples.empty())
                throw ValidationError("evaluate_symbol: tabulated family has no samples");
            if (family.dims.s != 1)
                throw UnsupportedDimensionError(
                    "evaluate_symbol: tabulated interpolation supports s = 1 only");
            if (omega.size() != 1)
                throw ValidationError("evaluate_symbol: expected scalar frequency");
            const double w = omega(0);
            const auto& samples = family.samples;
            const double w_lo = samples.front().omega(0);
            const double w_hi = samples.back().omega(0);
            if (w < w_lo || w > w_hi)
                throw ExtrapolationError("evaluate_symbol: frequency " + std::to_string(w) +
                                         " outside tabulated hull [" + std::to_string(w_lo) +
                                         ", " + std::to_string(w_hi) + "]");
            auto it = std::lower_bound(samples.begin(), samples.end(), w,
                                       [](const ModeTriple& s, double x) {
                                           return s.omega(0) < x;
                                       });
            if (it != samples.end() && it->omega(0) == w) {
                ModeTriple out = *it;
                out.omega = omega;
                return out;
            }
            const ModeTriple& hi = *it;
            const ModeTriple& lo = *(it - 1);
            const double t = (w - lo.omega(0)) / (hi.omega(0) - lo.omega(0));
            return detail::interpolate_samples(lo, hi, t, omega);
        }
    }
    throw ValidationError("evaluate_symbol: unknown family kind");
}

inline ModeTriple evaluate_symbol(const SymbolFamily& family, double omega) {
    return evaluate_symbol(family, scalar_omega(omega));
}

// ── Family validation ────────────────────────────────────────────────────

// A single invariant violation; `code` is a stable machine-readable class.
struct Finding {
    std::string code;     // e.g. "dimension-mismatch", "non-finite"
    std::string message;
    std::ptrdiff_t sample_index = -1;  // tabulated sample location, -1 if n/a
};

// Checks every SymbolFamily invariant and reports one finding per violation.
// Returns an empty list iff the family is well formed.
inline std::vector<Finding> validate_family(const SymbolFamily& family) {
    std::vector<Finding> findings;
    auto add = [&](std::string code, std::string message, std::ptrdiff_t idx = -1) {
        findings.push_back({std::move(code), std::move(message), idx});
    };

    if (family.dims.s < 1)
        add("bad-parameter", "spatial dimension s must be >= 1");

    switch (family.kind) {
        case FamilyKind::diffusion:
        case FamilyKind::shifted_diffusion:
            if (!(family.alpha > 0.0) || !std::isfinite(family.alpha))
                add("bad-parameter", "diffusivity alpha must be positive and finite");
            if (!std::isfinite(family.kappa))
                add("non-finite", "shift kappa must be finite");
            break;
        case FamilyKind::damped_oscillator:
            if (!(family.omega0 > 0.0) || !std::isfinite(family.omega0))
                add("bad-parameter", "natural frequency omega0 must be positive and finite");
            if (!std::isfinite(family.zeta))
                add("non-finite", "damping ratio zeta must be finite");
            break;
        case FamilyKind::diagonal_exponential: {
            if (family.terms.empty())
                add("bad-parameter", "diagonal-exponential family needs at least one term");
            std::ptrdiff_t i = 0;
            for (const DiagExpTerm& t : family.terms) {
                if (!std::isfinite(t.pole) || !std::isfinite(t.curvature) ||
                    !std::isfinite(t.residue))
                    add("non-finite", "term has non-finite parameter", i);
                else if (t.residue < 0.0)
                    add("bad-parameter", "residue must be nonnegative", i);
                ++i;
            }
            break;
        }
        case FamilyKind::tabulated: {
            if (family.samples.empty()) {
                add("bad-parameter", "tabulated family has no samples");
                break;
            }
            const ModeTriple& first = family.samples.front();
            const Index n0 = first.n(), m0 = first.m(), p0 = first.p();
            const Index s0 = first.omega.size();
            std::ptrdiff_t i = 0;
            for (const ModeTriple& s : family.samples) {
                if (s.a.rows() != s.a.cols() || s.b.rows() != s.a.rows() ||
                    s.c.cols() != s.a.rows())
                    add("dimension-mismatch", "sample triple has inconsistent shapes", i);
                else if (s.n() != n0 || s.m() != m0 || s.p() != p0)
                    add("dimension-mismatch", "sample dims differ from first sample", i);
                if (s.omega.size() != s0)
                    add("dimension-mismatch", "sample frequency length differs", i);
                if (!s.a.allFinite() || !s.b.allFinite() || !s.c.allFinite() ||
                    !s.omega.allFinite())
                    add("non-finite", "sample has non-finite entry", i);
                ++i;
            }
            for (std::size_t k = 1; k < family.samples.size(); ++k) {
                const RealVector& lo = family.samples[k - 1].omega;
                const RealVector& hi = family.samples[k].omega;
                if (lo.size() != hi.size()) continue;  // reported above
                if (!std::lexicographical_compare(lo.begin(), lo.end(), hi.begin(), hi.end())) {
                    bool equal = lo.size() == hi.size() &&
                                 std::equal(lo.begin(), lo.end(), hi.begin());
                    add(equal ? "duplicate-omega" : "unsorted-samples",
                        "samples must be strictly sorted by frequency",
                        static_cast<std::ptrdiff_t>(k));
                }
            }
            break;
        }
    }
    return findings;
}

// ── FrequencyGrid ────────────────────────────────────────────────────────

// Quadrature discretization of the frequency axis: nodes w_k with positive
// weights W_k approximating the integral over R^s.
struct FrequencyGrid {
    std::vector<RealVector> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }

    static FrequencyGrid single(double omega) {
        FrequencyGrid g;
        g.points.push_back(scalar_omega(omega));
        g.weights.push_back(1.0);
        return g;
    }
};

// Uniform symmetric grid on [-omega_max, omega_max] with trapezoidal weights
// summing to 2*omega_max.  Only s = 1 is supported.
inline FrequencyGrid make_frequency_grid(double omega_max, int count, int s = 1) {
    if (s != 1)
        throw UnsupportedDimensionError("make_frequency_grid: only s = 1 is supported, got s = " +
                                        std::to_string(s));
    if (count < 2)
        throw ValidationError("make_frequency_grid: count must be >= 2");
    if (!(omega_max > 0.0) || !std::isfinite(omega_max))
        throw ValidationError("make_frequency_grid: omega_max must be positive and finite");

    FrequencyGrid grid;
    grid.points.reserve(static_cast<std::size_t>(count));
    grid.weights.reserve(static_cast<std::size_t>(count));
    const double h = 2.0 * omega_max / (count - 1);
    for (int i = 0; i < count; ++i) {
        // symmetric by construction: w(count-1-i) = -w(i) exactly
        const double numerator = static_cast<double>(2 * i - (count - 1));
        grid.points.push_back(scalar_omega(omega_max * numerator / (count - 1)));
        grid.weights.push_back((i == 0 || i == count - 1) ? 0.5 * h : h);
    }
    return grid;
}

// ── SpatioTemporalField ──────────────────────────────────────────────────

// Sampled u(t, x) or y(t, x) on a uniform periodic space-time grid,
// row-major in (time, space, channel).
struct SpatioTemporalField {
    Index nt = 0, nx = 0, nc = 0;
    double dt = 1.0, dx = 1.0;
    double t0 = 0.0, x0 = 0.0;
    std::vector<Complex> values;

    static SpatioTemporalField zeros(Index nt, Index nx, Index nc, double dt, double dx,
                                     double t0 = 0.0, double x0 = 0.0) {
        SpatioTemporalField f;
        f.nt = nt;
        f.nx = nx;
        f.nc = nc;
        f.dt = dt;
        f.dx = dx;
        f.t0 = t0;
        f.x0 = x0;
        f.values.assign(static_cast<std::size_t>(nt * nx * nc), Complex(0.0, 0.0));
        return f;
    }

    Complex& at(Index it, Index ix, Index ic) {
        return values[static_cast<std::size_t>((it * nx + ix) * nc + ic)];
    }
    const Complex& at(Index it, Index ix, Index ic) const {
        return values[static_cast<std::size_t>((it * nx + ix) * nc + ic)];
    }

    double time_of(Index it) const { return t0 + dt * static_cast<double>(it); }
    double position_of(Index ix) const { return x0 + dx * static_cast<double>(ix); }

    void validate() const {
        if (nt < 1 || nx < 1 || nc < 1)
            throw ValidationError("SpatioTemporalField: empty grid");
        if (!(dt > 0.0) || !(dx > 0.0))
            throw ValidationError("SpatioTemporalField: dt and dx must be positive");
        if (values.size() != static_cast<std::size_t>(nt * nx * nc))
            throw ValidationError("SpatioTemporalField: value count " +
                                  std::to_string(values.size()) + " does not match grid " +
                                  std::to_string(nt * nx * nc));
    }
};

// ── Tolerances ───────────────────────────────────────────────────────────

// All thresholds used by the certification pipelines.  Echoed into every
// certificate so a verdict is reproducible from the artifact alone.
struct ToleranceSet {
    double psd = 1e-9;        // relative PSD floor: lmin >= -psd*max(1, lmax)
    double hermitian = 1e-9;  // symmetry / collocation defect (relative)
    double moment = 1e-9;     // moment-sign test floor
    double hankel = 1e-9;     // Hankel PSD + symmetry floor
    double passivity = 1e-9;  // certificate equation/inequality floor
    double marginal_abscissa = 1e-12;    // |abscissa| below this is flagged marginal
    double hankel_stability_floor = 1e-6;  // modes with abscissa > -floor skip Hankel
    double storage_rel = 1e-4;           // storage identity relative error gate
    double tail_warn_ratio = 1e-6;       // boundary/peak Hankel-norm warning ratio
    int moment_k_max = 20;

    void set(const std::string& name, double value) {
        if (name == "psd") psd = value;
        else if (name == "hermitian") hermitian = value;
        else if (name == "moment") moment = value;
        else if (name == "hankel") hankel = value;
        else if (name == "passivity") passivity = value;
        else if (name == "marginal_abscissa") marginal_abscissa = value;
        else if (name == "hankel_stability_floor") hankel_stability_floor = value;
        else if (name == "storage_rel") storage_rel = value;
        else if (name == "tail_warn_ratio") tail_warn_ratio = value;
        else if (name == "moment_k_max") moment_k_max = static_cast<int>(value);
        else throw ValidationError("unknown tolerance name: " + name);
    }
};

// ── Certificate ──────────────────────────────────────────────────────────

enum class Verdict { pass, fail, inconclusive };
enum class Property { relaxation, internal_relaxation, passivity, exponential_stability };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

inline std::string property_name(Property p) {
    switch (p) {
        case Property::relaxation: return "relaxation";
        case Property::internal_relaxation: return "internal_relaxation";
        case Property::passivity: return "passivity";
        case Property::exponential_stability: return "exponential_stability";
    }
    return "unknown";
}

// marker for evidence fields that carry no quantity
inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

// One per-mode test outcome.  `margin` is signed with the tolerance already
// folded in: margin >= 0 passes, margin < 0 violates.  `value` keeps the raw
// quantity behind the margin (e.g. the offending eigenvalue).
struct Evidence {
    RealVector omega;
    std::string test;
    double margin = 0.0;
    double value = std::numeric_limits<double>::quiet_NaN();
    double aux = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

// Structured verdict over a frequency grid.
struct Certificate {
    Property property = Property::relaxation;
    Verdict verdict = Verdict::inconclusive;
    std::vector<Evidence> per_mode_evidence;
    ToleranceSet tolerances;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::vector<std::string> warnings;
    // true when some applicable test could not be run (e.g. marginal mode
    // excluded from the Hankel check); pass is then downgraded.
    bool has_skipped_checks = false;

    // Recomputes worst_margin and the verdict from the evidence:
    // fail iff some margin is negative; otherwise inconclusive if any
    // check was skipped; otherwise pass.
    void finalize() {
        worst_margin = std::numeric_limits<double>::infinity();
        bool any_violation = false;
        for (const Evidence& e : per_mode_evidence) {
            worst_margin = std::min(worst_margin, e.margin);
            if (e.margin < 0.0) any_violation = true;
        }
        if (per_mode_evidence.empty()) worst_margin = 0.0;
        if (any_violation)
            verdict = Verdict::fail;
        else
            verdict = has_skipped_checks ? Verdict::inconclusive : Verdict::pass;
    }
};

// ── Parallel map over modes ──────────────────────────────────────────────

// Cap from the environment; 0 means hardware concurrency.
inline unsigned thread_cap() {
    static const unsigned cap = [] {
        if (const char* env = std::getenv("LTSI_RELAX_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) return static_cast<unsigned>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : hw;
    }();
    return cap;
}

// Runs fn(i) for i in [0, count).  Each index writes only its own output
// slot, so results are identical to sequential execution regardless of the
// thread count.  Exceptions are rethrown (first index wins).
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned threads = std::min<std::size_t>(thread_cap(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    for (std::size_t i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

// ── Small shared numeric helpers ─────────────────────────────────────────

// Conjugate-linear in the first argument, matching <u, y> in the analysis.
inline Complex inner(const Vector& x, const Vector& y) { return x.dot(y); }

// Hermitian part (M + M^*)/2.
inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Extreme eigenvalues of the Hermitian part of m.
struct HermitianExtremes {
    double min_eig;
    double max_eig;
};

inline HermitianExtremes hermitian_extremes(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("hermitian eigensolver failed to converge");
    const auto& ev = es.eigenvalues();
    return {ev(0), ev(ev.size() - 1)};
}

}  // namespace ltsi
