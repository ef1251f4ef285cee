#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctc/complex_matrix.hpp"
#include "ctc/density.hpp"
#include "ctc/gates.hpp"
#include "ctc/prescriptions.hpp"
#include "ctc/scenarios.hpp"
#include "ctc/tomography.hpp"
#include "ctc/verify.hpp"

// Wire formats: complex numbers are [re, im] pairs; matrices are
// {"dims": [...], "entries": [[re, im], ...]} with entries row-major.

namespace ctc {

using json = nlohmann::json;

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (int r = 0; r < m.side(); ++r)
        for (int c = 0; c < m.side(); ++c) entries.push_back(to_json(m(r, c)));
    return json{{"dims", m.dims()}, {"entries", entries}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("entries"))
        throw validation_error("matrix JSON must carry 'dims' and 'entries'");
    std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    // wire inputs are untrusted; the library targets a few qubits
    if (dims.empty() || dims.size() > 12)
        throw validation_error("matrix JSON: factor count out of range");
    long long side = 1;
    for (int d : dims) {
        if (d < 1 || d > 1024) throw validation_error("matrix JSON: factor dimension out of range");
        side *= d;
        if (side > 1024) throw validation_error("matrix JSON: total dimension above 1024");
    }
    ComplexMatrix m(dims);
    const auto& entries = j.at("entries");
    if (static_cast<int>(entries.size()) != m.side() * m.side())
        throw validation_error("matrix JSON entry count does not match dims");
    int i = 0;
    for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 2) throw validation_error("complex entries must be [re, im]");
        m(i / m.side(), i % m.side()) = Complex(e[0].get<double>(), e[1].get<double>());
        ++i;
    }
    return m;
}

inline json to_json(const DensityOperator& rho) { return to_json(rho.matrix()); }

inline json to_json(const FixedPointFamily& fam) {
    json dirs = json::array();
    for (const ComplexMatrix& d : fam.null_directions) dirs.push_back(to_json(d));
    json box = json::array();
    for (const auto& b : fam.param_box) box.push_back(json::array({b.first, b.second}));
    return json{{"particular", to_json(fam.particular)},
                {"null_directions", dirs},
                {"param_box", box},
                {"box_is_outer_approximation", fam.box_is_outer_approximation},
                {"selection_rule", fam.selection_rule}};
}

inline json to_json(const EcpTrace& t) {
    json iterates = json::array();
    for (const DensityOperator& it : t.iterates) iterates.push_back(to_json(it));
    return json{{"iterates", iterates},
                {"residuals", t.residuals},
                {"converged", t.converged},
                {"seed_state", to_json(t.seed_state)}};
}

inline json to_json(const TomographyResult& t) {
    json j{{"r", json::array({t.r[0], t.r[1], t.r[2]})},
           {"epsilon", t.epsilon},
           {"mode", to_string(t.mode)},
           {"shots", t.shots ? json(*t.shots) : json(nullptr)},
           {"reconstructed", to_json(t.reconstructed)},
           {"chosen_family_member",
            t.chosen_family_member ? to_json(*t.chosen_family_member) : json(nullptr)},
           {"trace_correction", t.trace_correction}};
    if (!t.circuit_extraction_defined)
        j["warning"] = "postselection norm vanishes; circuit extraction of r is undefined "
                       "(r taken from the reconstruction, which always exists)";
    return j;
}

inline json to_json(const VerificationReport& r) {
    return json{{"check", r.check},         {"max_residual", r.max_residual},
                {"cases", r.cases_run},     {"pass", r.pass},
                {"seed", r.seed},           {"tolerance", r.tolerance}};
}

inline json to_json(const Scenario& s, std::optional<double> oracle_g = std::nullopt,
                    const std::optional<DensityOperator>& rho = std::nullopt) {
    json j{{"name", s.name},
           {"cr_dims", s.cr_dims},
           {"cv_dim", s.cv_dim},
           {"unitary", to_json(s.unitary)}};
    json params = json::object();
    if (s.name == "power-swap") {
        params["p"] = s.p;
        j["trivial_even_power"] = s.trivial_even_power;
    }
    if (oracle_g) params["g"] = *oracle_g;
    j["params"] = params;
    if (s.preset_rho) j["preset_rho"] = to_json(*s.preset_rho);

    const std::optional<DensityOperator>& input = rho ? rho : s.preset_rho;
    if (s.oracle && input) {
        bool valid = true;
        if (s.oracle->restricted_input && s.preset_rho)
            valid = (input->matrix() - s.preset_rho->matrix()).frobenius_norm() < 1e-9;
        if (valid) {
            const double g = oracle_g.value_or(0.5);
            json oracle{{"tau_d", to_json(s.oracle->cv_state_d(*input, g))},
                        {"rho_d", to_json(s.oracle->cr_output_d(*input, g))},
                        {"tau_p", to_json(s.oracle->cv_state_p(*input))}};
            const std::optional<ComplexMatrix> rp = s.oracle->cr_output_p(*input);
            oracle["rho_p"] = rp ? to_json(*rp) : json(nullptr);
            if (s.oracle->parametrized) oracle["g"] = g;
            j["oracle"] = oracle;
        } else {
            j["oracle"] = nullptr;
            j["oracle_note"] = "closed forms are only stated for the preset CR input";
        }
    }
    return j;
}

/// State literals: projector strings "|s><s|" with s over {0,1,+,-}
/// (multi-character for several qubits, both sides equal), or the named
/// states "bell" (the pair (|00>+|11>)/sqrt(2)) and "mixed" / "mixedN"
/// (maximally mixed on 1 / N qubits).
inline DensityOperator parse_state_literal(const std::string& text) {
    if (text == "bell") return DensityOperator(ket_density(bell_ket(), {2, 2}));
    if (text.rfind("mixed", 0) == 0) {
        int n = 1;
        if (text.size() > 5) {
            try {
                n = std::stoi(text.substr(5));
            } catch (...) {
                throw validation_error("bad state literal '" + text + "'");
            }
        }
        if (n < 1 || n > 4) throw validation_error("mixed state literal supports 1..4 qubits");
        return DensityOperator::maximally_mixed(std::vector<int>(static_cast<size_t>(n), 2));
    }

    const auto bar1 = text.find('|');
    const auto ket_end = text.find("><");
    const auto bar2 = text.rfind('|');
    if (bar1 != 0 || ket_end == std::string::npos || bar2 != text.size() - 1 || ket_end <= 1)
        throw validation_error("bad state literal '" + text + "' (expected |s><s|, bell or mixed)");
    const std::string ket_sym = text.substr(1, ket_end - 1);
    const std::string bra_sym = text.substr(ket_end + 2, text.size() - ket_end - 3);
    if (ket_sym != bra_sym)
        throw validation_error("state literal must be a projector: ket and bra differ");

    std::vector<Complex> ket{Complex(1, 0)};
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (char ch : ket_sym) {
        std::vector<Complex> qubit;
        switch (ch) {
            case '0': qubit = {Complex(1, 0), Complex(0, 0)}; break;
            case '1': qubit = {Complex(0, 0), Complex(1, 0)}; break;
            case '+': qubit = {Complex(inv_sqrt2, 0), Complex(inv_sqrt2, 0)}; break;
            case '-': qubit = {Complex(inv_sqrt2, 0), Complex(-inv_sqrt2, 0)}; break;
            default:
                throw validation_error(std::string("state literal: unsupported symbol '") + ch + "'");
        }
        std::vector<Complex> next(ket.size() * 2);
        for (size_t i = 0; i < ket.size(); ++i) {
            next[2 * i] = ket[i] * qubit[0];
            next[2 * i + 1] = ket[i] * qubit[1];
        }
        ket = std::move(next);
    }
    const std::vector<int> dims(ket_sym.size(), 2);
    return DensityOperator(ket_density(ket, dims));
}

}  // namespace ctc
