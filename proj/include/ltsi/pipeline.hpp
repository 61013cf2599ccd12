// pipeline.hpp — batch commands behind the ltsi-relax front end.
//
// Each run_* function drives one command end to end: load the config,
// run the per-mode analyses, write machine-readable artifacts into the
// output directory, and return the process exit code:
//
//   0   verdict pass
//   2   verdict fail
//   3   verdict inconclusive (marginal modes, unmet hypotheses)
//   64  configuration / parse error
//
// Artifacts echo the seed and the full tolerance set so a verdict is
// reproducible from the files alone; repeated runs with the same manifest
// are byte-identical.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ltsi/core.hpp"
#include "ltsi/diffusion_ref.hpp"
#include "ltsi/hankel.hpp"
#include "ltsi/io.hpp"
#include "ltsi/lti_mode.hpp"
#include "ltsi/passivity.hpp"
#include "ltsi/spectral_sim.hpp"

namespace ltsi {

struct RunManifest {
    std::string command;
    std::string config_path;
    double grid_omega_max = 10.0;
    int grid_count = 201;
    bool quad_given = false;
    QuadratureScheme quad_scheme = QuadratureScheme::truncated_trapezoid;
    int quad_n = 128;
    std::vector<std::pair<std::string, double>> tol_overrides;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string dump_hankel_path;
    std::string certificate_path;
};

namespace exit_code {
inline constexpr int pass = 0;
inline constexpr int fail = 2;
inline constexpr int inconclusive = 3;
inline constexpr int config_error = 64;
}  // namespace exit_code

namespace detail {

inline ToleranceSet tolerances_from(const RunManifest& manifest) {
    ToleranceSet tols;
    for (const auto& [name, value] : manifest.tol_overrides) tols.set(name, value);
    return tols;
}

inline FrequencyGrid grid_from(const RunManifest& manifest) {
    if (manifest.grid_count == 1) return FrequencyGrid::single(manifest.grid_omega_max);
    return make_frequency_grid(manifest.grid_omega_max, manifest.grid_count);
}

inline std::string out_path(const RunManifest& manifest, const std::string& name) {
    std::filesystem::create_directories(manifest.out_dir);
    return (std::filesystem::path(manifest.out_dir) / name).string();
}

inline Json manifest_to_json(const RunManifest& manifest) {
    Json j;
    j["schema"] = kSchemaTag;
    j["command"] = manifest.command;
    j["config_path"] = manifest.config_path;
    j["grid"] = {{"omega_max", manifest.grid_omega_max}, {"count", manifest.grid_count}};
    j["quadrature"] = {{"scheme", quadrature_scheme_name(manifest.quad_scheme)},
                       {"n", manifest.quad_n}};
    j["seed"] = manifest.seed;
    j["tolerances"] = tolerances_to_json(tolerances_from(manifest));
    return j;
}

inline void write_run_manifest(const RunManifest& manifest) {
    save_json(manifest_to_json(manifest), out_path(manifest, "run_manifest.json"));
}

inline int exit_from_verdict(Verdict v) {
    switch (v) {
        case Verdict::pass: return exit_code::pass;
        case Verdict::fail: return exit_code::fail;
        case Verdict::inconclusive: return exit_code::inconclusive;
    }
    return exit_code::inconclusive;
}

inline SymbolFamily load_family_checked(const std::string& path) {
    if (path.empty()) throw ValidationError("missing --config with the symbol family");
    const SymbolFamily family = family_from_json(load_json(path));
    const std::vector<Finding> findings = validate_family(family);
    if (!findings.empty()) {
        std::string message = "invalid family in " + path + ":";
        for (const Finding& f : findings) {
            message += "\n  [" + f.code + "] " + f.message;
            if (f.sample_index >= 0)
                message += " (sample " + std::to_string(f.sample_index) + ")";
        }
        throw ValidationError(message);
    }
    return family;
}

// Per-mode summary attached to the certificate JSON next to the flat
// evidence list.
struct ModeSummary {
    RealVector omega;
    double abscissa = 0.0;
    bool marginal = false;
    bool hankel_skipped = false;
    bool internal_form = false;
    std::string bernstein;
    double hankel_min = std::numeric_limits<double>::quiet_NaN();
    double hankel_max = std::numeric_limits<double>::quiet_NaN();
};

struct RelaxationAnalysis {
    Certificate certificate;
    std::vector<ModeSummary> summaries;
    bool all_internal = true;
};

// Shared engine of `certify` and `hankel`: the aggregate relaxation verdict
// requires the Hankel PSD test on every exponentially stable mode plus
// (unless hankel_only) the moment screen; a Bernstein pass upgrades the
// evidence, a Bernstein fail is disqualifying where the form applies.
inline RelaxationAnalysis analyze_relaxation(const SymbolFamily& family,
                                             const FrequencyGrid& grid,
                                             const ToleranceSet& tols,
                                             QuadratureScheme scheme, int quad_n,
                                             bool hankel_only) {
    if (family.dims.m != family.dims.p)
        throw ValidationError("relaxation requires a square transfer (m = p)");

    RelaxationAnalysis analysis;
    analysis.certificate.property = Property::relaxation;
    analysis.certificate.tolerances = tols;
    analysis.summaries.resize(grid.size());
    std::vector<std::vector<Evidence>> evidence(grid.size());

    parallel_for(grid.size(), [&](std::size_t k) {
        const ModeTriple mode = evaluate_symbol(family, grid.points[k]);
        ModeSummary& summary = analysis.summaries[k];
        summary.omega = grid.points[k];
        summary.abscissa = spectral_abscissa(mode);
        summary.marginal = summary.abscissa > -tols.marginal_abscissa;
        summary.internal_form = internal_form_test(mode, tols.hermitian).pass;
        std::vector<Evidence>& rows = evidence[k];

        if (!hankel_only) {
            const MomentTestResult moments =
                cm_test_moments(mode, tols.moment_k_max, tols.moment);
            Evidence moment_row{grid.points[k], "cm_moments", moments.worst_margin,
                                moments.worst_value,
                                static_cast<double>(moments.worst_k), ""};
            if (moments.outcome == TestOutcome::fail) {
                // surface the first violating order, not the deepest one
                moment_row.value = moments.first_failing_value;
                moment_row.aux = static_cast<double>(moments.first_failing_k);
                moment_row.note =
                    "first failing k = " + std::to_string(moments.first_failing_k);
            }
            rows.push_back(std::move(moment_row));

            const BernsteinTestResult bernstein = cm_test_bernstein(mode, tols.psd);
            summary.bernstein = test_outcome_name(bernstein.outcome);
            if (bernstein.outcome != TestOutcome::not_applicable)
                rows.push_back({grid.points[k], "cm_bernstein", bernstein.worst_margin,
                                bernstein.worst_margin, kNoValue, bernstein.reason});
        }

        if (summary.abscissa > -tols.hankel_stability_floor) {
            summary.hankel_skipped = true;
            return;
        }
        const TimeQuadrature quad = build_quadrature(scheme, quad_n, -summary.abscissa);
        const HankelDiscretization disc = build_hankel(mode, quad, tols.hankel_stability_floor);
        summary.hankel_min = disc.min_eigenvalue;
        summary.hankel_max = disc.max_eigenvalue;
        const double eig_margin =
            disc.min_eigenvalue + tols.hankel * std::max(1.0, disc.max_eigenvalue);
        rows.push_back({grid.points[k], "hankel_psd", eig_margin, disc.min_eigenvalue,
                        disc.max_eigenvalue, ""});
        rows.push_back({grid.points[k], "hankel_symmetry", tols.hankel - disc.symmetry_defect,
                        disc.symmetry_defect, kNoValue, ""});
    });

    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (Evidence& e : evidence[k])
            analysis.certificate.per_mode_evidence.push_back(std::move(e));
        if (analysis.summaries[k].hankel_skipped) {
            analysis.certificate.has_skipped_checks = true;
            analysis.certificate.warnings.push_back(
                "mode at omega = " + std::to_string(grid.points[k](0)) +
                " is marginal (spectral abscissa " +
                std::to_string(analysis.summaries[k].abscissa) +
                "); the Hankel test needs exponential stability and was skipped");
        }
        if (!analysis.summaries[k].internal_form) analysis.all_internal = false;
    }

    // frequency-truncation estimate: the boundary mode should be negligible
    // next to the peak mode, otherwise omega_max clips visible dynamics
    if (grid.size() >= 3) {
        double peak = 0.0;
        for (const ModeSummary& s : analysis.summaries)
            if (std::isfinite(s.hankel_max)) peak = std::max(peak, s.hankel_max);
        const double boundary =
            std::max(std::isfinite(analysis.summaries.front().hankel_max)
                         ? analysis.summaries.front().hankel_max
                         : 0.0,
                     std::isfinite(analysis.summaries.back().hankel_max)
                         ? analysis.summaries.back().hankel_max
                         : 0.0);
        if (peak > 0.0 && boundary > tols.tail_warn_ratio * peak)
            analysis.certificate.warnings.push_back(
                "boundary-mode Hankel norm is " + std::to_string(boundary / peak) +
                " of the peak mode (threshold " + std::to_string(tols.tail_warn_ratio) +
                "); consider enlarging omega_max");
    }

    analysis.certificate.finalize();
    return analysis;
}

inline Json summaries_to_json(const std::vector<ModeSummary>& summaries) {
    Json modes = Json::array();
    for (const ModeSummary& s : summaries) {
        Json entry;
        entry["omega"] = real_vector_to_json(s.omega);
        entry["spectral_abscissa"] = s.abscissa;
        entry["marginal"] = s.marginal;
        entry["internal_form"] = s.internal_form;
        if (!s.bernstein.empty()) entry["cm_bernstein"] = s.bernstein;
        entry["hankel_skipped"] = s.hankel_skipped;
        if (std::isfinite(s.hankel_min)) {
            entry["hankel_min_eigenvalue"] = s.hankel_min;
            entry["hankel_max_eigenvalue"] = s.hankel_max;
        }
        modes.push_back(std::move(entry));
    }
    return modes;
}

// Rebuilds and dumps the Hankel discretization of the worst-margin mode.
inline void dump_worst_hankel(const SymbolFamily& family,
                              const RelaxationAnalysis& analysis, QuadratureScheme scheme,
                              int quad_n, const ToleranceSet& tols, const std::string& path) {
    std::ptrdiff_t worst = -1;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < analysis.summaries.size(); ++k) {
        const ModeSummary& s = analysis.summaries[k];
        if (!std::isfinite(s.hankel_min)) continue;
        const double ratio = s.hankel_min / std::max(1.0, s.hankel_max);
        if (ratio < worst_ratio) {
            worst_ratio = ratio;
            worst = static_cast<std::ptrdiff_t>(k);
        }
    }
    if (worst < 0) return;
    const ModeSummary& s = analysis.summaries[static_cast<std::size_t>(worst)];
    const ModeTriple mode = evaluate_symbol(family, s.omega);
    const TimeQuadrature quad = build_quadrature(scheme, quad_n, -s.abscissa);
    write_hankel_dump(build_hankel(mode, quad, tols.hankel_stability_floor), path);
}

}  // namespace detail

// ── certify ──────────────────────────────────────────────────────────────

inline int run_certify(const RunManifest& manifest) {
    const SymbolFamily family = detail::load_family_checked(manifest.config_path);
    const FrequencyGrid grid = detail::grid_from(manifest);
    const ToleranceSet tols = detail::tolerances_from(manifest);

    detail::RelaxationAnalysis analysis = detail::analyze_relaxation(
        family, grid, tols, manifest.quad_scheme, manifest.quad_n, /*hankel_only=*/false);

    Json j = certificate_to_json(analysis.certificate, "certify", manifest.seed);
    j["family"] = family_to_json(family);
    j["internal_relaxation_all_modes"] = analysis.all_internal;
    j["modes"] = detail::summaries_to_json(analysis.summaries);
    save_json(j, detail::out_path(manifest, "certificate.json"));
    detail::write_run_manifest(manifest);

    if (!manifest.dump_hankel_path.empty())
        detail::dump_worst_hankel(family, analysis, manifest.quad_scheme, manifest.quad_n,
                                  tols, manifest.dump_hankel_path);
    return detail::exit_from_verdict(analysis.certificate.verdict);
}

// ── hankel ───────────────────────────────────────────────────────────────

inline int run_hankel(const RunManifest& manifest) {
    const SymbolFamily family = detail::load_family_checked(manifest.config_path);
    const FrequencyGrid grid = detail::grid_from(manifest);
    const ToleranceSet tols = detail::tolerances_from(manifest);

    detail::RelaxationAnalysis analysis = detail::analyze_relaxation(
        family, grid, tols, manifest.quad_scheme, manifest.quad_n, /*hankel_only=*/true);

    Json j = certificate_to_json(analysis.certificate, "hankel", manifest.seed);
    j["family"] = family_to_json(family);
    j["modes"] = detail::summaries_to_json(analysis.summaries);
    save_json(j, detail::out_path(manifest, "certificate.json"));
    detail::write_run_manifest(manifest);

    if (!manifest.dump_hankel_path.empty())
        detail::dump_worst_hankel(family, analysis, manifest.quad_scheme, manifest.quad_n,
                                  tols, manifest.dump_hankel_path);
    return detail::exit_from_verdict(analysis.certificate.verdict);
}

// ── passivity ────────────────────────────────────────────────────────────

inline int run_passivity(const RunManifest& manifest) {
    const SymbolFamily family = detail::load_family_checked(manifest.config_path);
    const FrequencyGrid grid = detail::grid_from(manifest);
    const ToleranceSet tols = detail::tolerances_from(manifest);

    std::optional<PassivityCertificate> cert;
    std::string cert_source;
    std::vector<std::string> warnings;

    if (!manifest.certificate_path.empty()) {
        cert = passivity_certificate_from_json(load_json(manifest.certificate_path));
        cert_source = "supplied";
    } else {
        try {
            cert = identity_certificate(family, grid, tols);
            cert_source = "identity";
        } catch (const StructuralError& structural) {
            warnings.push_back(structural.what());
            // least-norm heuristic; its failure proves nothing
            PassivityCertificate candidate;
            candidate.omegas = grid.points;
            candidate.q_per_mode.resize(grid.size());
            bool all_ok = true;
            std::string reason;
            for (std::size_t k = 0; k < grid.size() && all_ok; ++k) {
                try {
                    const LyapunovCandidate lyap =
                        lyapunov_candidate(evaluate_symbol(family, grid.points[k]), tols);
                    if (!lyap.success) {
                        all_ok = false;
                        reason = "least-norm candidate fails the passivity conditions at "
                                 "omega = " + std::to_string(grid.points[k](0));
                    } else {
                        candidate.q_per_mode[k] = lyap.q;
                    }
                } catch (const std::runtime_error& err) {
                    all_ok = false;
                    reason = err.what();
                }
            }
            if (all_ok) {
                candidate.recompute_sup_norm();
                cert = std::move(candidate);
                cert_source = "least-norm";
            } else {
                warnings.push_back(reason);
            }
        }
    }

    Certificate result;
    result.property = Property::passivity;
    result.tolerances = tols;
    if (cert) {
        result = verify_certificate(family, grid, *cert, tols);
    } else {
        result.has_skipped_checks = true;
        result.warnings.push_back(
            "no certificate could be synthesized; heuristic failure does not disprove "
            "impedance passivity");
        result.finalize();
    }
    for (const std::string& w : warnings) result.warnings.push_back(w);

    Json j = certificate_to_json(result, "passivity", manifest.seed);
    j["family"] = family_to_json(family);
    j["certificate_source"] = cert ? cert_source : "none";
    save_json(j, detail::out_path(manifest, "certificate.json"));
    if (cert && manifest.certificate_path.empty())
        save_json(passivity_certificate_to_json(*cert),
                  detail::out_path(manifest, "passivity_certificate.json"));
    detail::write_run_manifest(manifest);
    return detail::exit_from_verdict(result.verdict);
}

// ── storage-check ────────────────────────────────────────────────────────

namespace detail {

// Past-input profile specs: {"type": "exponential", "rate": r, "amplitude": a}
// or {"type": "gaussian", "center": c, "width": w, "omega_width": ow}.
inline std::vector<Vector> build_past_inputs(const Json& spec, const SymbolFamily& family,
                                             const FrequencyGrid& grid,
                                             const TimeQuadrature& quad) {
    const std::string type = spec.value("type", "gaussian");
    const Index m = family.dims.m;
    std::vector<Vector> inputs(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.points[k].norm();
        Vector v(static_cast<Index>(quad.size()) * m);
        for (std::size_t i = 0; i < quad.size(); ++i) {
            const double t = quad.nodes[i];
            double value = 0.0;
            if (type == "exponential") {
                value = spec.value("amplitude", 1.0) * std::exp(-spec.value("rate", 1.0) * t);
            } else if (type == "gaussian") {
                const double center = spec.value("center", 1.0);
                const double width = spec.value("width", 0.5);
                const double omega_width = spec.value("omega_width", 2.0);
                value = std::exp(-w * w / (2.0 * omega_width * omega_width)) *
                        std::exp(-(t - center) * (t - center) / (2.0 * width * width));
            } else {
                throw ValidationError("unknown past_input type \"" + type + "\"");
            }
            for (Index ch = 0; ch < m; ++ch)
                v(static_cast<Index>(i) * m + ch) = value;
        }
        inputs[k] = std::move(v);
    }
    return inputs;
}

}  // namespace detail

inline int run_storage_check(const RunManifest& manifest) {
    if (manifest.config_path.empty()) throw ValidationError("missing --config");
    const Json config = load_json(manifest.config_path);
    Json family_json = config.contains("family") ? config.at("family") : config;
    const SymbolFamily family = family_from_json(family_json);
    {
        const std::vector<Finding> findings = validate_family(family);
        if (!findings.empty())
            throw ValidationError("invalid family in " + manifest.config_path);
    }
    const FrequencyGrid grid = detail::grid_from(manifest);
    const ToleranceSet tols = detail::tolerances_from(manifest);

    // slowest stable decay over the grid bounds the quadrature horizon
    double min_decay = std::numeric_limits<double>::infinity();
    for (const RealVector& omega : grid.points) {
        const double abscissa = spectral_abscissa(evaluate_symbol(family, omega));
        if (abscissa <= -tols.hankel_stability_floor)
            min_decay = std::min(min_decay, -abscissa);
    }

    Json report;
    report["schema"] = kSchemaTag;
    report["command"] = "storage-check";
    report["seed"] = manifest.seed;
    report["tolerances"] = tolerances_to_json(tols);

    if (!std::isfinite(min_decay)) {
        report["verdict"] = "inconclusive";
        report["error"] = "every grid mode is marginal; the storage identity needs "
                          "exponential stability";
        save_json(report, detail::out_path(manifest, "storage_report.json"));
        detail::write_run_manifest(manifest);
        return exit_code::inconclusive;
    }

    const QuadratureScheme scheme =
        manifest.quad_given ? manifest.quad_scheme : QuadratureScheme::gauss_laguerre;
    const int quad_n = manifest.quad_given ? manifest.quad_n : 256;
    const TimeQuadrature quad = build_quadrature(scheme, quad_n, min_decay);
    report["quadrature"] = {{"scheme", quadrature_scheme_name(scheme)},
                            {"n", quad_n},
                            {"decay_rate", min_decay}};

    const Json past_input_spec =
        config.contains("past_input") ? config.at("past_input") : Json{{"type", "gaussian"}};
    const std::vector<Vector> past_inputs =
        detail::build_past_inputs(past_input_spec, family, grid, quad);
    report["past_input"] = past_input_spec;

    int exit = exit_code::pass;
    try {
        const StorageIdentityReport result =
            storage_identity_check(family, grid, quad, past_inputs, tols);
        Json modes = Json::array();
        for (const StorageModeRow& row : result.modes) {
            Json entry;
            entry["omega"] = real_vector_to_json(row.omega);
            if (row.skipped) {
                entry["skipped"] = true;
                entry["note"] = row.note;
            } else {
                entry["state_norm_squared"] = row.lhs;
                entry["past_future_pairing"] = row.rhs;
                entry["hankel_form"] = row.hankel_form;
                entry["rel_errors"] = {row.rel_lhs_rhs, row.rel_lhs_hankel, row.rel_rhs_hankel};
                entry["imag_residual"] = row.imag_residual;
            }
            modes.push_back(std::move(entry));
        }
        report["modes"] = std::move(modes);
        report["aggregate"] = {{"state_norm_squared", result.lhs},
                               {"past_future_pairing", result.rhs},
                               {"hankel_form", result.hankel_form},
                               {"rel_errors", {result.rel_lhs_rhs, result.rel_lhs_hankel,
                                               result.rel_rhs_hankel}}};
        report["max_rel_error"] = result.max_rel_error;
        report["any_mode_skipped"] = result.any_skipped;
        const bool ok = result.max_rel_error <= tols.storage_rel;
        report["verdict"] = ok ? "pass" : "fail";
        exit = ok ? exit_code::pass : exit_code::fail;
    } catch (const HypothesisError& err) {
        report["verdict"] = "inconclusive";
        report["error"] = err.what();
        exit = exit_code::inconclusive;
    }
    save_json(report, detail::out_path(manifest, "storage_report.json"));
    detail::write_run_manifest(manifest);
    return exit;
}

// ── figures ──────────────────────────────────────────────────────────────

inline int run_figures(const RunManifest& manifest) {
    DiffusionParams params;
    SymbolFamily spectrum_family = SymbolFamily::shifted_diffusion(1.0, 0.5);
    if (!manifest.config_path.empty()) {
        const SymbolFamily family = detail::load_family_checked(manifest.config_path);
        if (family.kind == FamilyKind::diffusion || family.kind == FamilyKind::shifted_diffusion) {
            params.alpha = family.alpha;
            spectrum_family = SymbolFamily::shifted_diffusion(
                family.alpha, family.kind == FamilyKind::shifted_diffusion ? family.kappa : 0.5);
        }
    }
    const ToleranceSet tols = detail::tolerances_from(manifest);

    const Fig2Tables tables = default_figure2_datasets(params);
    write_fig2_csv(tables.profile_rows, detail::out_path(manifest, "fig2a.csv"));
    write_fig2_csv(tables.trace_rows, detail::out_path(manifest, "fig2b.csv"));

    // Hankel spectrum of the omega = 1 mode
    const ModeTriple mode = evaluate_symbol(spectrum_family, 1.0);
    const TimeQuadrature quad = build_quadrature(manifest.quad_scheme, manifest.quad_n,
                                                 -spectral_abscissa(mode));
    const HankelDiscretization disc = build_hankel(mode, quad, tols.hankel_stability_floor);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(disc.matrix),
                                             Eigen::EigenvaluesOnly);
    std::ostringstream out;
    out << "index,eigenvalue\n";
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
        out << i << ',' << format_double(es.eigenvalues()(i)) << '\n';
    write_text_file(detail::out_path(manifest, "hankel_spectrum.csv"), out.str());

    detail::write_run_manifest(manifest);
    return exit_code::pass;
}

// ── simulate ─────────────────────────────────────────────────────────────

namespace detail {

inline SpatioTemporalField load_field_any(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return read_field_csv(path);
    return read_field_binary(path);
}

}  // namespace detail

inline int run_simulate(const RunManifest& manifest) {
    if (manifest.config_path.empty()) throw ValidationError("missing --config");
    const Json config = load_json(manifest.config_path);
    const SymbolFamily family = family_from_json(config.at("family"));
    {
        const std::vector<Finding> findings = validate_family(family);
        if (!findings.empty())
            throw ValidationError("invalid family in " + manifest.config_path);
    }

    const Json& sim = config.at("sim");
    SimulationConfig sim_config;
    sim_config.spatial_points = sim.value("spatial_points", 256);
    sim_config.domain_length = sim.value("domain_length", 40.0);
    sim_config.dt = sim.value("dt", 1e-3);
    sim_config.t_start = sim.value("t_start", 0.0);
    sim_config.t_end = sim.value("t_end", 1.0);
    const std::string hold = sim.value("hold", "piecewise-constant");
    if (hold == "piecewise-constant")
        sim_config.hold = InputHold::piecewise_constant;
    else if (hold == "piecewise-linear")
        sim_config.hold = InputHold::piecewise_linear;
    else
        throw ValidationError("unknown hold \"" + hold + "\"");
    sim_config.validate();

    const int nx = sim_config.spatial_points;
    const double dx = sim_config.domain_length / nx;
    const double x0 = -0.5 * sim_config.domain_length;

    // input field
    SpatioTemporalField input;
    const Json input_spec = config.value("input", Json{{"type", "zero"}});
    const std::string input_type = input_spec.value("type", "zero");
    if (input_type == "zero") {
        input = SpatioTemporalField::zeros(sim_config.step_count() + 1, nx, family.dims.m,
                                           sim_config.dt, dx, sim_config.t_start, x0);
    } else if (input_type == "field") {
        input = detail::load_field_any(input_spec.at("path").get<std::string>());
    } else {
        throw ValidationError("unknown input type \"" + input_type + "\"");
    }

    // initial per-mode states
    std::vector<ModeState> initial_states;
    const Json init_spec = config.value("initial_state", Json{{"type", "zero"}});
    const std::string init_type = init_spec.value("type", "zero");
    if (init_type == "gaussian") {
        const double sigma = init_spec.value("sigma", 1.0);
        Vector profile(nx);
        for (int j = 0; j < nx; ++j) {
            const double x = x0 + dx * j;
            profile(j) =
                std::exp(-x * x / (2.0 * sigma * sigma)) / std::sqrt(2.0 * M_PI * sigma * sigma);
        }
        const Vector hat = spatial_fft(profile);
        const RealVector freqs = fft_frequencies(nx, sim_config.domain_length);
        initial_states.resize(static_cast<std::size_t>(nx));
        for (int k = 0; k < nx; ++k) {
            initial_states[static_cast<std::size_t>(k)].omega = scalar_omega(freqs(k));
            initial_states[static_cast<std::size_t>(k)].z = Vector::Zero(family.dims.n);
            initial_states[static_cast<std::size_t>(k)].z(0) = hat(k);
        }
    } else if (init_type == "field") {
        const SpatioTemporalField init_field =
            detail::load_field_any(init_spec.at("path").get<std::string>());
        if (init_field.nt != 1 || init_field.nx != nx || init_field.nc != family.dims.n)
            throw ValidationError("initial_state field must be one time slice of n channels");
        const RealVector freqs = fft_frequencies(nx, sim_config.domain_length);
        initial_states.resize(static_cast<std::size_t>(nx));
        std::vector<Vector> hats(static_cast<std::size_t>(family.dims.n));
        for (Index ch = 0; ch < family.dims.n; ++ch) {
            Vector slice(nx);
            for (int j = 0; j < nx; ++j) slice(j) = init_field.at(0, j, ch);
            hats[static_cast<std::size_t>(ch)] = spatial_fft(slice);
        }
        for (int k = 0; k < nx; ++k) {
            initial_states[static_cast<std::size_t>(k)].omega = scalar_omega(freqs(k));
            initial_states[static_cast<std::size_t>(k)].z = Vector(family.dims.n);
            for (Index ch = 0; ch < family.dims.n; ++ch)
                initial_states[static_cast<std::size_t>(k)].z(ch) =
                    hats[static_cast<std::size_t>(ch)](k);
        }
    } else if (init_type != "zero") {
        throw ValidationError("unknown initial_state type \"" + init_type + "\"");
    }

    const SimulationResult result = simulate(family, sim_config, input, initial_states);

    const std::string format = config.value("output_format", "csv");
    std::string output_name;
    if (format == "csv") {
        output_name = "output_field.csv";
        write_field_csv(result.output, detail::out_path(manifest, output_name));
    } else if (format == "binary") {
        output_name = "output_field.bin";
        write_field_binary(result.output, detail::out_path(manifest, output_name));
    } else {
        throw ValidationError("unknown output_format \"" + format + "\"");
    }

    Json summary;
    summary["schema"] = kSchemaTag;
    summary["command"] = "simulate";
    summary["seed"] = manifest.seed;
    summary["output"] = output_name;
    summary["warnings"] = result.warnings;
    double final_norm2 = 0.0;
    for (const ModeState& s : result.final_states) final_norm2 += s.z.squaredNorm();
    summary["final_state_norm"] = std::sqrt(final_norm2);
    save_json(summary, detail::out_path(manifest, "sim_summary.json"));
    detail::write_run_manifest(manifest);
    return exit_code::pass;
}

// ── dispatch ─────────────────────────────────────────────────────────────

inline int run_command(const RunManifest& manifest) {
    if (manifest.command == "certify") return run_certify(manifest);
    if (manifest.command == "hankel") return run_hankel(manifest);
    if (manifest.command == "passivity") return run_passivity(manifest);
    if (manifest.command == "storage-check") return run_storage_check(manifest);
    if (manifest.command == "figures") return run_figures(manifest);
    if (manifest.command == "simulate") return run_simulate(manifest);
    throw ValidationError("unknown command \"" + manifest.command + "\"");
}

}  // namespace ltsi
