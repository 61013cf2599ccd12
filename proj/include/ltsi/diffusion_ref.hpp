// diffusion_ref.hpp — closed-form diffusion oracle.
//
// The heat kernel g(t, x) = (4 pi a t)^{-1/2} e^{-x^2/(4 a t)} solves
// dy/dt = a d2y/dx2; its spatial Fourier transform is e^{-a w^2 t}.  These
// closed forms serve as ground truth for the simulator and the per-mode
// relaxation tests: g is *not* completely monotone in t at fixed x != 0
// (interior maximum at t* = x^2 / (2a)), while every spectral mode is.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ltsi/core.hpp"

namespace ltsi {

struct DiffusionParams {
    double alpha = 1.0;  // diffusivity, length^2/time

    void validate() const {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw ValidationError("DiffusionParams: alpha must be positive and finite");
    }
};

// g(t, x) = (4 pi a t)^{-1/2} exp(-x^2 / (4 a t)), t > 0.
inline double heat_kernel(const DiffusionParams& params, double t, double x) {
    params.validate();
    if (!(t > 0.0)) throw ValidationError("heat_kernel: t must be positive");
    const double denom = 4.0 * params.alpha * t;
    return std::exp(-x * x / denom) / std::sqrt(M_PI * denom);
}

// g_hat(t, w) = exp(-a w^2 t), t >= 0; values in (0, 1].
inline double spectral_kernel(const DiffusionParams& params, double t, double omega) {
    params.validate();
    if (t < 0.0) throw ValidationError("spectral_kernel: t must be >= 0");
    return std::exp(-params.alpha * omega * omega * t);
}

// Unit-mass Gaussian initial profile of std sigma0 evolved to time t:
// variance grows to sigma0^2 + 2 a t.
inline double gaussian_solution(const DiffusionParams& params, double sigma0, double t,
                                double x) {
    params.validate();
    if (!(sigma0 > 0.0)) throw ValidationError("gaussian_solution: sigma0 must be positive");
    if (t < 0.0) throw ValidationError("gaussian_solution: t must be >= 0");
    const double variance = sigma0 * sigma0 + 2.0 * params.alpha * t;
    return std::exp(-x * x / (2.0 * variance)) / std::sqrt(2.0 * M_PI * variance);
}

// Time of the interior maximum of t -> g(t, x) at fixed x != 0.
inline double heat_kernel_peak_time(const DiffusionParams& params, double x) {
    params.validate();
    return x * x / (2.0 * params.alpha);
}

// ── Figure datasets ──────────────────────────────────────────────────────

struct Fig2Row {
    double t, x, g;
};

struct Fig2Tables {
    // (a): spatial profiles x -> g(t, x) at fixed times; flatten as t grows.
    std::vector<Fig2Row> profile_rows;
    // (b): temporal traces t -> g(t, x) at fixed locations; non-monotone
    // with an interior maximum at t* = x^2/(2a) for x != 0, monotone
    // decreasing for x = 0.
    std::vector<Fig2Row> trace_rows;
};

struct RangeSpec {
    double lo, hi;
    int count;
};

inline Fig2Tables figure2_datasets(const DiffusionParams& params,
                                   const std::vector<double>& times,
                                   const std::vector<double>& locations,
                                   const RangeSpec& x_range, const RangeSpec& t_range) {
    params.validate();
    if (x_range.count < 2 || t_range.count < 2)
        throw ValidationError("figure2_datasets: ranges need at least two samples");
    for (double t : times)
        if (!(t > 0.0)) throw ValidationError("figure2_datasets: profile times must be positive");
    if (!(t_range.lo > 0.0))
        throw ValidationError("figure2_datasets: trace range must start at t > 0");

    Fig2Tables tables;
    const double hx = (x_range.hi - x_range.lo) / (x_range.count - 1);
    for (double t : times)
        for (int i = 0; i < x_range.count; ++i) {
            const double x = x_range.lo + hx * i;
            tables.profile_rows.push_back({t, x, heat_kernel(params, t, x)});
        }

    const double ht = (t_range.hi - t_range.lo) / (t_range.count - 1);
    for (double x : locations)
        for (int i = 0; i < t_range.count; ++i) {
            const double t = t_range.lo + ht * i;
            tables.trace_rows.push_back({t, x, heat_kernel(params, t, x)});
        }
    return tables;
}

// Defaults chosen for qualitative reproduction (the source figure does not
// state its parameters): one decade of times, locations including x = 0 so
// the monotone reference trace is part of the dataset.
inline Fig2Tables default_figure2_datasets(const DiffusionParams& params = {}) {
    return figure2_datasets(params, {0.05, 0.2, 0.5, 1.0}, {0.0, 0.25, 0.5, 1.0},
                            {-3.0, 3.0, 241}, {0.005, 2.0, 400});
}

}  // namespace ltsi
