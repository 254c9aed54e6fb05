// Copyright 2026 The dispenc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dispenc/predict.hpp"
#include "json.hpp"

namespace dispenc::io {

using json = nlohmann::json;

/// A complex number is a plain number, a [re, im] pair or {"re": .., "im": ..}.
inline cplx to_cplx(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    throw std::invalid_argument("bad complex value: " + j.dump());
}

inline json from_cplx(cplx z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

inline std::vector<cplx> to_cvec(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected an array of complex values");
    std::vector<cplx> out;
    for (const auto& x : j) out.push_back(to_cplx(x));
    return out;
}

inline json from_cvec(const ComplexVector& v) {
    json a = json::array();
    for (Eigen::Index q = 0; q < v.size(); ++q) a.push_back(from_cplx(v(q)));
    return a;
}

inline json from_cvec(const std::vector<cplx>& v) {
    json a = json::array();
    for (auto z : v) a.push_back(from_cplx(z));
    return a;
}

inline ComplexVector to_evec(const json& j) {
    const auto v = to_cvec(j);
    ComplexVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t q = 0; q < v.size(); ++q) out(static_cast<Eigen::Index>(q)) = v[q];
    return out;
}

inline ComplexMatrix to_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a non-empty array of rows");
    const std::size_t n = j.size();
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) throw std::invalid_argument("matrix must be square");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = to_cplx(j[i][k]);
    }
    return m;
}

inline json from_matrix(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(from_cplx(m(i, k)));
        rows.push_back(r);
    }
    return rows;
}

/// {"family": name, "seq": [...]} or, for banded, {"family": "banded", "n", "bandwidth", "band"};
/// -like families add "edits": [{"row", "col", "value"}].
inline StructuredMatrix to_spec(const json& j) {
    const Family f = family_from_name(j.at("family").get<std::string>());
    StructuredMatrix s;
    if (f == Family::banded_toeplitz) {
        s = StructuredMatrix::banded(j.at("n").get<std::size_t>(), j.at("bandwidth").get<std::size_t>(),
                                     to_cvec(j.at("band")));
    } else {
        const auto seq = to_cvec(j.at("seq"));
        switch (f) {
        case Family::toeplitz: s = StructuredMatrix::toeplitz(seq); break;
        case Family::circulant: s = StructuredMatrix::circulant(seq); break;
        case Family::hankel: s = StructuredMatrix::hankel(seq); break;
        case Family::toeplitz_like: s = StructuredMatrix::toeplitz_like(seq, {}); break;
        case Family::hankel_like: s = StructuredMatrix::hankel_like(seq, {}); break;
        default: break;
        }
    }
    if (j.contains("edits")) {
        for (const auto& e : j.at("edits"))
            s.edits.push_back({e.at("row").get<std::size_t>(), e.at("col").get<std::size_t>(), to_cplx(e.at("value"))});
    }
    validate(s);
    return s;
}

inline json from_decomposition(const LcuDecomposition& dec) {
    json terms = json::array();
    for (const auto& t : dec.terms)
        terms.push_back({{"i", t.word.i}, {"k", t.word.k}, {"J", t.word.uses_J}, {"coeff", from_cplx(t.coeff)}});
    return {{"kind", kind_name(dec.kind)},
            {"n", dec.n},
            {"prefactor", dec.prefactor},
            {"chi", dec.chi()},
            {"alpha", chi_scaling(dec)},
            {"term_count", dec.terms.size()},
            {"terms", terms}};
}

inline json from_tally(const ResourceTally& t) {
    return {{"queries", t.queries}, {"gates", t.gates}, {"ancillas", t.ancillas}};
}

inline json from_prep(const PrepReport& p) {
    return {{"p0", p.p0},           {"p0_estimate", p.p0_estimate}, {"p_min", p.p_min},
            {"p_final", p.p_final}, {"L", p.L},                     {"rounds", p.rounds},
            {"rotation_bits", p.rotation_bits}, {"queries", p.queries}, {"ae_queries", p.ae_queries},
            {"junk_norm", p.junk_norm}};
}

inline json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

}  // namespace dispenc::io
