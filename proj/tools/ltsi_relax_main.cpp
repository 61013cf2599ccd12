// ltsi-relax — batch front end for LTSI relaxation certification,
// passivity verification, spectral simulation, and the storage identity.
//
// Exit codes: 0 pass, 2 fail, 3 inconclusive, 64 configuration error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ltsi/pipeline.hpp"

namespace {

// "wmax,count" -> manifest grid fields
void parse_grid(const std::string& text, ltsi::RunManifest& manifest) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--grid", "expected wmax,count");
    manifest.grid_omega_max = std::stod(text.substr(0, comma));
    manifest.grid_count = std::stoi(text.substr(comma + 1));
}

// "scheme,N" with scheme in {trapezoid, truncated-trapezoid, gauss-laguerre}
void parse_quad(const std::string& text, ltsi::RunManifest& manifest) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--quad", "expected scheme,N");
    const std::string scheme = text.substr(0, comma);
    if (scheme == "trapezoid" || scheme == "truncated-trapezoid")
        manifest.quad_scheme = ltsi::QuadratureScheme::truncated_trapezoid;
    else if (scheme == "gauss-laguerre" || scheme == "laguerre")
        manifest.quad_scheme = ltsi::QuadratureScheme::gauss_laguerre;
    else
        throw CLI::ValidationError("--quad", "unknown scheme \"" + scheme + "\"");
    manifest.quad_n = std::stoi(text.substr(comma + 1));
    manifest.quad_given = true;
}

void parse_tols(const std::vector<std::string>& entries, ltsi::RunManifest& manifest) {
    for (const std::string& entry : entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--tol", "expected name=value");
        manifest.tol_overrides.emplace_back(entry.substr(0, eq),
                                            std::stod(entry.substr(eq + 1)));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LTSI relaxation toolkit: per-frequency complete-monotonicity tests, "
                 "Hankel-operator positivity, impedance-passivity certificates, and "
                 "spectral simulation"};
    app.require_subcommand(1);

    ltsi::RunManifest manifest;
    std::string grid_text, quad_text;
    std::vector<std::string> tol_entries;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"certify", "aggregate relaxation certification over a frequency grid"},
        {"hankel", "Hankel-operator positivity test only"},
        {"passivity", "verify a storage certificate (canonical or supplied)"},
        {"simulate", "spectral simulation of a space-time input field"},
        {"storage-check", "storage-from-past-input identity check"},
        {"figures", "emit the diffusion reference datasets as CSV"},
    };
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", manifest.config_path, "symbol family / run config JSON");
        sub->add_option("--grid", grid_text, "frequency grid as wmax,count (count 1 = single mode)");
        sub->add_option("--quad", quad_text, "time quadrature as scheme,N");
        sub->add_option("--tol", tol_entries, "tolerance override name=value (repeatable)");
        sub->add_option("--out", manifest.out_dir, "output directory");
        sub->add_option("--seed", manifest.seed, "seed recorded in artifacts");
        sub->add_option("--dump-hankel", manifest.dump_hankel_path,
                        "dump the worst-mode Hankel matrix and spectrum as CSV");
        sub->add_option("--certificate", manifest.certificate_path,
                        "passivity certificate JSON to verify");
        sub->callback([&manifest, name = name] { manifest.command = name; });
    }

    try {
        app.parse(argc, argv);
        if (!grid_text.empty()) parse_grid(grid_text, manifest);
        if (!quad_text.empty()) parse_quad(quad_text, manifest);
        parse_tols(tol_entries, manifest);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : ltsi::exit_code::config_error;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "ltsi-relax: %s\n", err.what());
        return ltsi::exit_code::config_error;
    }

    try {
        return ltsi::run_command(manifest);
    } catch (const ltsi::ValidationError& err) {
        std::fprintf(stderr, "ltsi-relax: %s\n", err.what());
        return ltsi::exit_code::config_error;
    } catch (const ltsi::StabilityError& err) {
        std::fprintf(stderr, "ltsi-relax: %s\n", err.what());
        return ltsi::exit_code::inconclusive;
    } catch (const ltsi::HypothesisError& err) {
        std::fprintf(stderr, "ltsi-relax: %s\n", err.what());
        return ltsi::exit_code::inconclusive;
    } catch (const ltsi::StructuralError& err) {
        std::fprintf(stderr, "ltsi-relax: %s\n", err.what());
        return ltsi::exit_code::inconclusive;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "ltsi-relax: internal error: %s\n", err.what());
        return 70;
    }
}
