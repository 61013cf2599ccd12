// io.hpp — artifact serialization: symbol-family and certificate JSON,
// space-time field CSV/binary, and the plot-ready CSV emitters.
//
// Conventions (stable across releases, schema tag "ltsi-relax/1"):
//   * complex scalars encode as [re, im]; plain numbers are accepted as real
//   * matrices are arrays of rows
//   * field CSV header: t,x,channel,re,im (row-major in t, x, channel)
//   * field binary: magic "LTSIFLD1", u64 nt/nx/nc, f64 dt/dx/t0/x0, then
//     re/im f64 pairs, all little-endian, row-major in (t, x, channel)

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ltsi/core.hpp"
#include "ltsi/diffusion_ref.hpp"
#include "ltsi/hankel.hpp"
#include "ltsi/passivity.hpp"

namespace ltsi {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaTag = "ltsi-relax/1";

// ── Scalars and matrices ─────────────────────────────────────────────────

inline Complex complex_from_json(const Json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ValidationError("expected a number or [re, im] pair, got " + j.dump());
}

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ValidationError("expected a matrix (array of rows), got " + j.dump());
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        if (static_cast<Index>(j[static_cast<std::size_t>(r)].size()) != cols)
            throw ValidationError("ragged matrix rows in " + j.dump());
        for (Index c = 0; c < cols; ++c)
            m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return m;
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline RealVector real_vector_from_json(const Json& j) {
    if (j.is_number()) {
        RealVector v(1);
        v(0) = j.get<double>();
        return v;
    }
    if (!j.is_array()) throw ValidationError("expected a real vector, got " + j.dump());
    RealVector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

inline Json real_vector_to_json(const RealVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

// ── Symbol families ──────────────────────────────────────────────────────

inline SymbolFamily family_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ValidationError("family config must be an object with a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();

    SymbolFamily family;
    if (kind == "diffusion") {
        family = SymbolFamily::diffusion(j.value("alpha", 1.0));
    } else if (kind == "shifted-diffusion") {
        family = SymbolFamily::shifted_diffusion(j.value("alpha", 1.0), j.value("kappa", 0.0));
    } else if (kind == "damped-oscillator") {
        family = SymbolFamily::damped_oscillator(j.value("zeta", 0.1), j.value("omega0", 1.0));
    } else if (kind == "diagonal-exponential") {
        std::vector<DiagExpTerm> terms;
        for (const Json& t : j.at("terms")) {
            DiagExpTerm term;
            term.pole = t.value("pole", 1.0);
            term.curvature = t.value("curvature", 0.0);
            term.residue = t.value("residue", 1.0);
            terms.push_back(term);
        }
        family = SymbolFamily::diagonal_exponential(std::move(terms));
    } else if (kind == "tabulated") {
        std::vector<ModeTriple> samples;
        for (const Json& s : j.at("samples")) {
            ModeTriple mode;
            mode.omega = real_vector_from_json(s.at("omega"));
            mode.a = matrix_from_json(s.at("A"));
            mode.b = matrix_from_json(s.at("B"));
            mode.c = matrix_from_json(s.at("C"));
            samples.push_back(std::move(mode));
        }
        family = SymbolFamily::tabulated(std::move(samples));
    } else {
        throw ValidationError("unknown family kind \"" + kind + "\"");
    }

    if (j.contains("dims")) {
        const Json& d = j.at("dims");
        const Dims declared{d.value("n", family.dims.n), d.value("m", family.dims.m),
                            d.value("p", family.dims.p), d.value("s", family.dims.s)};
        if (!(declared == family.dims))
            throw ValidationError("declared dims do not match the family definition");
    }
    if (j.contains("continuity_note"))
        family.continuity_note = j.at("continuity_note").get<std::string>();
    return family;
}

inline Json family_to_json(const SymbolFamily& family) {
    Json j;
    j["kind"] = family_kind_name(family.kind);
    switch (family.kind) {
        case FamilyKind::diffusion:
            j["alpha"] = family.alpha;
            break;
        case FamilyKind::shifted_diffusion:
            j["alpha"] = family.alpha;
            j["kappa"] = family.kappa;
            break;
        case FamilyKind::damped_oscillator:
            j["zeta"] = family.zeta;
            j["omega0"] = family.omega0;
            break;
        case FamilyKind::diagonal_exponential: {
            Json terms = Json::array();
            for (const DiagExpTerm& t : family.terms)
                terms.push_back({{"pole", t.pole}, {"curvature", t.curvature},
                                 {"residue", t.residue}});
            j["terms"] = std::move(terms);
            break;
        }
        case FamilyKind::tabulated: {
            Json samples = Json::array();
            for (const ModeTriple& s : family.samples) {
                Json entry;
                entry["omega"] = real_vector_to_json(s.omega);
                entry["A"] = matrix_to_json(s.a);
                entry["B"] = matrix_to_json(s.b);
                entry["C"] = matrix_to_json(s.c);
                samples.push_back(std::move(entry));
            }
            j["samples"] = std::move(samples);
            break;
        }
    }
    j["dims"] = {{"n", family.dims.n}, {"m", family.dims.m}, {"p", family.dims.p},
                 {"s", family.dims.s}};
    if (!family.continuity_note.empty()) j["continuity_note"] = family.continuity_note;
    return j;
}

// ── Passivity certificates ───────────────────────────────────────────────

inline PassivityCertificate passivity_certificate_from_json(const Json& j) {
    PassivityCertificate cert;
    for (const Json& mode : j.at("modes")) {
        cert.omegas.push_back(real_vector_from_json(mode.at("omega")));
        cert.q_per_mode.push_back(matrix_from_json(mode.at("Q")));
    }
    cert.recompute_sup_norm();
    return cert;
}

inline Json passivity_certificate_to_json(const PassivityCertificate& cert) {
    Json modes = Json::array();
    for (std::size_t k = 0; k < cert.size(); ++k) {
        Json entry;
        entry["omega"] = real_vector_to_json(cert.omegas[k]);
        entry["Q"] = matrix_to_json(cert.q_per_mode[k]);
        modes.push_back(std::move(entry));
    }
    Json j;
    j["schema"] = kSchemaTag;
    j["modes"] = std::move(modes);
    j["sup_norm"] = cert.sup_norm;
    return j;
}

// ── Tolerances and verdict certificates ──────────────────────────────────

inline Json tolerances_to_json(const ToleranceSet& tols) {
    return Json{{"psd", tols.psd},
                {"hermitian", tols.hermitian},
                {"moment", tols.moment},
                {"hankel", tols.hankel},
                {"passivity", tols.passivity},
                {"marginal_abscissa", tols.marginal_abscissa},
                {"hankel_stability_floor", tols.hankel_stability_floor},
                {"storage_rel", tols.storage_rel},
                {"tail_warn_ratio", tols.tail_warn_ratio},
                {"moment_k_max", tols.moment_k_max}};
}

// Flat evidence groups into one JSON entry per frequency.
inline Json certificate_to_json(const Certificate& cert, const std::string& command,
                                std::uint64_t seed) {
    Json j;
    j["schema"] = kSchemaTag;
    j["command"] = command;
    j["property"] = property_name(cert.property);
    j["verdict"] = verdict_name(cert.verdict);
    j["worst_margin"] = cert.worst_margin;
    j["seed"] = seed;
    j["tolerances"] = tolerances_to_json(cert.tolerances);
    j["warnings"] = cert.warnings;

    Json evidence = Json::array();
    for (const Evidence& e : cert.per_mode_evidence) {
        Json entry;
        entry["omega"] = real_vector_to_json(e.omega);
        entry["test"] = e.test;
        entry["margin"] = e.margin;
        if (std::isfinite(e.value)) entry["value"] = e.value;
        if (std::isfinite(e.aux)) entry["aux"] = e.aux;
        if (!e.note.empty()) entry["note"] = e.note;
        evidence.push_back(std::move(entry));
    }
    j["evidence"] = std::move(evidence);
    return j;
}

// ── File helpers ─────────────────────────────────────────────────────────

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw ValidationError("failed writing " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline Json load_json(const std::string& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& err) {
        throw ValidationError("JSON parse error in " + path + ": " + err.what());
    }
}

inline void save_json(const Json& j, const std::string& path) {
    write_text_file(path, j.dump(2) + "\n");
}

inline SymbolFamily load_family(const std::string& path) {
    return family_from_json(load_json(path));
}

// round-trip-exact decimal rendering shared by every CSV emitter
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    if (std::strtod(buf, nullptr) == v) return buf;
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ── Space-time fields ────────────────────────────────────────────────────

inline void write_field_csv(const SpatioTemporalField& field, const std::string& path) {
    field.validate();
    std::ostringstream out;
    out << "t,x,channel,re,im\n";
    for (Index it = 0; it < field.nt; ++it)
        for (Index ix = 0; ix < field.nx; ++ix)
            for (Index ic = 0; ic < field.nc; ++ic) {
                const Complex& v = field.at(it, ix, ic);
                out << format_double(field.time_of(it)) << ',' << format_double(field.position_of(ix))
                    << ',' << ic << ',' << format_double(v.real()) << ','
                    << format_double(v.imag()) << '\n';
            }
    write_text_file(path, out.str());
}

inline SpatioTemporalField read_field_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "t,x,channel,re,im")
        throw ValidationError("bad field CSV header in " + path);

    std::vector<double> ts, xs;
    std::vector<Complex> values;
    Index max_channel = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t, x, re, im;
        long channel;
        if (std::sscanf(line.c_str(), "%lg,%lg,%ld,%lg,%lg", &t, &x, &channel, &re, &im) != 5)
            throw ValidationError("bad field CSV row: " + line);
        if (ts.empty() || t > ts.back()) ts.push_back(t);
        if (ts.size() == 1 && (xs.empty() || x > xs.back())) xs.push_back(x);
        max_channel = std::max<Index>(max_channel, channel);
        values.emplace_back(re, im);
    }
    if (ts.empty() || xs.empty()) throw ValidationError("empty field CSV " + path);
    SpatioTemporalField field;
    field.nt = static_cast<Index>(ts.size());
    field.nx = static_cast<Index>(xs.size());
    field.nc = max_channel + 1;
    field.t0 = ts.front();
    field.x0 = xs.front();
    field.dt = ts.size() > 1 ? ts[1] - ts[0] : 1.0;
    field.dx = xs.size() > 1 ? xs[1] - xs[0] : 1.0;
    field.values = std::move(values);
    field.validate();
    return field;
}

inline void write_field_binary(const SpatioTemporalField& field, const std::string& path) {
    field.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out.write("LTSIFLD1", 8);
    const std::uint64_t dims[3] = {static_cast<std::uint64_t>(field.nt),
                                   static_cast<std::uint64_t>(field.nx),
                                   static_cast<std::uint64_t>(field.nc)};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    const double meta[4] = {field.dt, field.dx, field.t0, field.x0};
    out.write(reinterpret_cast<const char*>(meta), sizeof(meta));
    for (const Complex& v : field.values) {
        const double pair[2] = {v.real(), v.imag()};
        out.write(reinterpret_cast<const char*>(pair), sizeof(pair));
    }
    if (!out) throw ValidationError("failed writing " + path);
}

inline SpatioTemporalField read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "LTSIFLD1", 8) != 0)
        throw ValidationError("bad magic in " + path);
    std::uint64_t dims[3];
    double meta[4];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    in.read(reinterpret_cast<char*>(meta), sizeof(meta));
    if (!in) throw ValidationError("truncated field header in " + path);
    SpatioTemporalField field;
    field.nt = static_cast<Index>(dims[0]);
    field.nx = static_cast<Index>(dims[1]);
    field.nc = static_cast<Index>(dims[2]);
    field.dt = meta[0];
    field.dx = meta[1];
    field.t0 = meta[2];
    field.x0 = meta[3];
    field.values.resize(static_cast<std::size_t>(field.nt * field.nx * field.nc));
    for (Complex& v : field.values) {
        double pair[2];
        in.read(reinterpret_cast<char*>(pair), sizeof(pair));
        if (!in) throw ValidationError("truncated field data in " + path);
        v = Complex(pair[0], pair[1]);
    }
    field.validate();
    return field;
}

// ── Plot-ready CSV ───────────────────────────────────────────────────────

inline void write_fig2_csv(const std::vector<Fig2Row>& rows, const std::string& path) {
    std::ostringstream out;
    out << "t,x,g\n";
    for (const Fig2Row& row : rows)
        out << format_double(row.t) << ',' << format_double(row.x) << ','
            << format_double(row.g) << '\n';
    write_text_file(path, out.str());
}

// Hankel dump: node/weight table, dense row-major matrix, then the spectrum
// of the Hermitian part in ascending order.
inline void write_hankel_dump(const HankelDiscretization& disc, const std::string& path) {
    std::ostringstream out;
    out << "# quadrature: node,weight\n";
    for (std::size_t i = 0; i < disc.quadrature.size(); ++i)
        out << format_double(disc.quadrature.nodes[i]) << ','
            << format_double(disc.quadrature.weights[i]) << '\n';
    out << "# matrix: dense row-major, re,im pairs\n";
    for (Index r = 0; r < disc.matrix.rows(); ++r) {
        for (Index c = 0; c < disc.matrix.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(disc.matrix(r, c).real()) << ','
                << format_double(disc.matrix(r, c).imag());
        }
        out << '\n';
    }
    out << "# eigenvalues ascending\n";
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(disc.matrix), Eigen::EigenvaluesOnly);
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
        out << format_double(es.eigenvalues()(i)) << '\n';
    write_text_file(path, out.str());
}

}  // namespace ltsi
