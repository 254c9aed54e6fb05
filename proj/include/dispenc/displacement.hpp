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

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dispenc/structmat.hpp"

namespace dispenc {

enum class DisplacementKind { stein, sylvester };

inline const char* kind_name(DisplacementKind k) {
    return k == DisplacementKind::stein ? "stein" : "sylvester";
}

/// The unitary Z_1^i J^uses_J Z_{-1}^{n-1-k}.
struct Word {
    std::size_t i = 0;
    std::size_t k = 0;
    bool uses_J = false;

    friend auto operator<=>(const Word&, const Word&) = default;
};

struct LcuTerm {
    cplx coeff;
    Word word;
};

struct LcuDecomposition {
    DisplacementKind kind = DisplacementKind::sylvester;
    std::size_t n = 0;
    double prefactor = 0.5;
    std::vector<LcuTerm> terms;

    /// Sum of coefficient moduli, before the prefactor.
    double chi() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.coeff);
        return s;
    }

    std::optional<cplx> coefficient(const Word& w) const {
        for (const auto& t : terms)
            if (t.word == w) return t.coeff;
        return std::nullopt;
    }
};

inline constexpr double kDropTolerance = 1e-14;

struct SignedIndex {
    std::size_t index;
    double sign;
};

/// Image of basis vector e under a word; every word is a signed permutation.
inline SignedIndex apply_word(std::size_t n, const Word& w, std::size_t e) {
    const std::size_t p = n - 1 - w.k;
    double sign = 1.0;
    if (p > 0 && e >= n - p) sign = -1.0;
    std::size_t x = (e + p) % n;
    if (w.uses_J) x = n - 1 - x;
    x = (x + w.i) % n;
    return {x, sign};
}

inline ComplexMatrix word_matrix(std::size_t n, const Word& w) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (std::size_t e = 0; e < n; ++e) {
        const auto img = apply_word(n, w, e);
        m(img.index, e) = img.sign;
    }
    return m;
}

inline ComplexMatrix displacement(const ComplexMatrix& m, const ComplexMatrix& a, const ComplexMatrix& b,
                                  DisplacementKind kind) {
    if (m.rows() != m.cols() || a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != m.rows() ||
        b.rows() != m.rows())
        throw std::invalid_argument("displacement: shape mismatch");
    if (kind == DisplacementKind::stein) return m - a * m * b;
    return a * m - m * b;
}

namespace detail {

inline void canonicalize(LcuDecomposition& dec) {
    std::vector<LcuTerm> kept;
    for (const auto& t : dec.terms)
        if (std::abs(t.coeff) >= kDropTolerance) kept.push_back(t);
    std::sort(kept.begin(), kept.end(), [](const LcuTerm& x, const LcuTerm& y) { return x.word < y.word; });
    // merge duplicates
    std::vector<LcuTerm> merged;
    for (const auto& t : kept) {
        if (!merged.empty() && merged.back().word == t.word)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const LcuTerm& t) { return std::abs(t.coeff) < kDropTolerance; }),
                 merged.end());
    dec.terms = std::move(merged);
}

}  // namespace detail

/// General form over the operator pair (Z_1, Z_{-1}).
inline LcuDecomposition lcu_decompose(const ComplexMatrix& m, DisplacementKind kind) {
    if (m.rows() != m.cols()) throw std::invalid_argument("lcu_decompose: non-square input");
    const std::size_t n = static_cast<std::size_t>(m.rows());
    if (n < 2 || !is_power_of_two(n)) throw std::invalid_argument("lcu_decompose: n must be a power of two");
    const ComplexMatrix d = displacement(m, unit_f_circulant(n, 1.0), unit_f_circulant(n, -1.0), kind);
    LcuDecomposition dec;
    dec.kind = kind;
    dec.n = n;
    dec.prefactor = 0.5;
    const bool j = kind == DisplacementKind::stein;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) dec.terms.push_back({d(i, k), Word{i, k, j}});
    detail::canonicalize(dec);
    return dec;
}

/// Family-specialized decompositions using only the defining sequence.
inline LcuDecomposition lcu_decompose_structured(const StructuredMatrix& s) {
    validate(s);
    const std::size_t n = s.n;
    LcuDecomposition dec;
    dec.n = n;
    dec.prefactor = 0.5;
    const long ln = static_cast<long>(n);
    switch (s.family) {
    case Family::toeplitz:
    case Family::banded_toeplitz:
        dec.kind = DisplacementKind::sylvester;
        dec.terms.push_back({2.0 * s.t(0), Word{0, n - 1, false}});
        for (long j = 1; j < ln; ++j) {
            dec.terms.push_back({s.t(j) + s.t(-(ln - j)), Word{std::size_t(j), n - 1, false}});
            dec.terms.push_back({s.t(j) - s.t(-(ln - j)), Word{0, std::size_t(ln - 1 - j), false}});
        }
        break;
    case Family::circulant:
        dec.kind = DisplacementKind::sylvester;
        dec.prefactor = 1.0;
        for (std::size_t j = 0; j < n; ++j) dec.terms.push_back({s.seq[j], Word{j, n - 1, false}});
        break;
    case Family::hankel:
        dec.kind = DisplacementKind::stein;
        dec.terms.push_back({2.0 * s.h(ln - 1), Word{0, n - 1, true}});
        for (long j = 1; j < ln; ++j) {
            dec.terms.push_back({s.h(ln + j - 1) + s.h(j - 1), Word{std::size_t(j), n - 1, true}});
            dec.terms.push_back({s.h(ln - 1 - j) - s.h(2 * ln - 1 - j), Word{0, std::size_t(ln - 1 - j), true}});
        }
        break;
    case Family::toeplitz_like:
        return lcu_decompose(build_structured(s), DisplacementKind::sylvester);
    case Family::hankel_like:
        return lcu_decompose(build_structured(s), DisplacementKind::stein);
    }
    detail::canonicalize(dec);
    return dec;
}

inline ComplexMatrix reconstruct(const LcuDecomposition& dec) {
    const std::size_t n = dec.n;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (const auto& t : dec.terms) {
        for (std::size_t e = 0; e < n; ++e) {
            const auto img = apply_word(n, t.word, e);
            m(img.index, e) += dec.prefactor * t.coeff * img.sign;
        }
    }
    return m;
}

/// Block-encoding scaling factor: prefactor times the coefficient 1-norm.
inline double chi_scaling(const LcuDecomposition& dec) { return dec.prefactor * dec.chi(); }

/// Band sum over |j| <= bandwidth, the alternative banded scaling quoted in reports.
inline double banded_band_sum(const StructuredMatrix& s) {
    double acc = 0.0;
    const long r = static_cast<long>(s.bandwidth);
    for (long j = -r; j <= r; ++j) acc += std::abs(s.t(j));
    return acc;
}

/// d for -like families: one plus the largest row count of the displacement
/// sub-matrix obtained by deleting its first row and last column.
inline std::size_t displacement_row_sparsity(const LcuDecomposition& dec) {
    const std::size_t n = dec.n;
    std::vector<std::size_t> counts(n, 0);
    for (const auto& t : dec.terms)
        if (t.word.i >= 1 && t.word.k + 1 < n) ++counts[t.word.i];
    return 1 + *std::max_element(counts.begin(), counts.end());
}

inline std::size_t displacement_row_sparsity(const StructuredMatrix& s) {
    return displacement_row_sparsity(lcu_decompose_structured(s));
}

enum class Identity { induction, a_potent, switch_left, switch_right, f_circulant_stein, f_circulant_sylvester };

namespace detail {

inline ComplexMatrix mpow(const ComplexMatrix& a, std::size_t k) {
    ComplexMatrix r = ComplexMatrix::Identity(a.rows(), a.cols());
    for (std::size_t i = 0; i < k; ++i) r = r * a;
    return r;
}

/// Returns c with A^n = c I, or throws.
inline cplx potency(const ComplexMatrix& a) {
    const ComplexMatrix p = mpow(a, static_cast<std::size_t>(a.rows()));
    const cplx c = p(0, 0);
    if ((p - c * ComplexMatrix::Identity(a.rows(), a.cols())).norm() > 1e-9 * (1.0 + std::abs(c)))
        throw std::invalid_argument("check_identity: operator is not a-potent of order n");
    return c;
}

inline ComplexMatrix checked_inverse(const ComplexMatrix& a) {
    Eigen::FullPivLU<ComplexMatrix> lu(a);
    if (!lu.isInvertible()) throw std::domain_error("check_identity: singular operator matrix");
    return lu.inverse();
}

/// e for A = Z_e, read from the corner and checked.
inline double f_of(const ComplexMatrix& a) {
    const std::size_t n = static_cast<std::size_t>(a.rows());
    const double f = a(0, n - 1).real();
    if ((a - unit_f_circulant(n, f)).norm() > 1e-12)
        throw std::invalid_argument("check_identity: operator is not a unit f-circulant");
    return f;
}

}  // namespace detail

/// Maximum entrywise deviation of one of the classical displacement identities.
/// k is used by the induction identity only.
inline double check_identity(Identity which, const ComplexMatrix& m, const ComplexMatrix& a, const ComplexMatrix& b,
                             std::size_t k = 1) {
    const std::size_t n = static_cast<std::size_t>(m.rows());
    const ComplexMatrix I = ComplexMatrix::Identity(n, n);
    ComplexMatrix lhs = m, rhs;
    switch (which) {
    case Identity::induction: {
        if (k < 1) throw std::invalid_argument("check_identity: k >= 1 required");
        const ComplexMatrix d = displacement(m, a, b, DisplacementKind::stein);
        rhs = detail::mpow(a, k) * m * detail::mpow(b, k);
        ComplexMatrix ai = I, bi = I;
        for (std::size_t i = 0; i < k; ++i) {
            rhs += ai * d * bi;
            ai = ai * a;
            bi = bi * b;
        }
        break;
    }
    case Identity::a_potent: {
        const cplx ca = detail::potency(a), cb = detail::potency(b);
        if (std::abs(1.0 - ca * cb) < 1e-12) throw std::domain_error("check_identity: ab = 1");
        const ComplexMatrix d = displacement(m, a, b, DisplacementKind::stein);
        rhs = ComplexMatrix::Zero(n, n);
        ComplexMatrix ai = I, bi = I;
        for (std::size_t i = 0; i < n; ++i) {
            rhs += ai * d * bi;
            ai = ai * a;
            bi = bi * b;
        }
        rhs /= (1.0 - ca * cb);
        break;
    }
    case Identity::switch_left:
        lhs = displacement(m, a, b, DisplacementKind::sylvester);
        rhs = a * displacement(m, detail::checked_inverse(a), b, DisplacementKind::stein);
        break;
    case Identity::switch_right:
        lhs = displacement(m, a, b, DisplacementKind::sylvester);
        rhs = -displacement(m, a, detail::checked_inverse(b), DisplacementKind::stein) * b;
        break;
    case Identity::f_circulant_stein:
    case Identity::f_circulant_sylvester: {
        const double e = detail::f_of(a), f = detail::f_of(b);
        const bool stein = which == Identity::f_circulant_stein;
        const double scale = stein ? 1.0 - e * f : e - f;
        if (std::abs(scale) < 1e-12) throw std::domain_error("check_identity: degenerate (e, f) pair");
        const ComplexMatrix l =
            displacement(m, a, b, stein ? DisplacementKind::stein : DisplacementKind::sylvester);
        Eigen::JacobiSVD<ComplexMatrix> svd(l, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const ComplexMatrix g = svd.matrixU() * svd.singularValues().asDiagonal();
        const ComplexMatrix h = svd.matrixV().conjugate();  // L = G H^T
        const ComplexMatrix J = reversal_matrix(n);
        rhs = ComplexMatrix::Zero(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            const ComplexMatrix ze = f_circulant_from_vector(g.col(j), e);
            const ComplexMatrix zf = f_circulant_from_vector(J * h.col(j), f);
            rhs += stein ? ComplexMatrix(ze * zf.transpose() * J) : ComplexMatrix(ze * zf);
        }
        rhs /= scale;
        break;
    }
    }
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace dispenc
