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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dispenc {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Thrown when requested accuracy or conditioning cannot be met.
class infeasible_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// log2 of a power of two.
inline std::size_t ilog2(std::size_t n) {
    std::size_t s = 0;
    while ((std::size_t{1} << s) < n) ++s;
    return s;
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cplx z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
}

inline double spectral_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

enum class Family { toeplitz, circulant, hankel, toeplitz_like, hankel_like, banded_toeplitz };

inline const char* family_name(Family f) {
    switch (f) {
    case Family::toeplitz: return "toeplitz";
    case Family::circulant: return "circulant";
    case Family::hankel: return "hankel";
    case Family::toeplitz_like: return "toeplitz_like";
    case Family::hankel_like: return "hankel_like";
    case Family::banded_toeplitz: return "banded_toeplitz";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    for (Family f : {Family::toeplitz, Family::circulant, Family::hankel, Family::toeplitz_like,
                     Family::hankel_like, Family::banded_toeplitz})
        if (s == family_name(f)) return f;
    if (s == "banded") return Family::banded_toeplitz;
    throw std::invalid_argument("unknown family: " + s);
}

inline bool is_toeplitz_type(Family f) {
    return f == Family::toeplitz || f == Family::toeplitz_like || f == Family::banded_toeplitz;
}
inline bool is_hankel_type(Family f) { return f == Family::hankel || f == Family::hankel_like; }
inline bool is_like(Family f) { return f == Family::toeplitz_like || f == Family::hankel_like; }

struct Edit {
    std::size_t row = 0;
    std::size_t col = 0;
    cplx value;
};

/// Defining data of a structured matrix.
///
/// Sequence layout by family:
///   toeplitz-type  seq[j + n - 1] = t_j,  j = -(n-1)..n-1
///   circulant      seq[j] = c_j (first column)
///   hankel-type    seq[j] = h_j,  j = 0..2n-2
struct StructuredMatrix {
    Family family = Family::toeplitz;
    std::size_t n = 0;
    std::vector<cplx> seq;
    std::size_t bandwidth = 0;
    std::vector<Edit> edits;

    /// t_j for toeplitz-type data; zero outside the stored range.
    cplx t(long j) const {
        const long idx = j + static_cast<long>(n) - 1;
        if (idx < 0 || idx >= static_cast<long>(seq.size())) return 0.0;
        return seq[static_cast<std::size_t>(idx)];
    }
    cplx h(long j) const {
        if (j < 0 || j >= static_cast<long>(seq.size())) return 0.0;
        return seq[static_cast<std::size_t>(j)];
    }

    static StructuredMatrix toeplitz(std::vector<cplx> t_seq) {
        StructuredMatrix s;
        s.family = Family::toeplitz;
        s.n = (t_seq.size() + 1) / 2;
        s.seq = std::move(t_seq);
        return s;
    }
    static StructuredMatrix circulant(std::vector<cplx> c) {
        StructuredMatrix s;
        s.family = Family::circulant;
        s.n = c.size();
        s.seq = std::move(c);
        return s;
    }
    static StructuredMatrix hankel(std::vector<cplx> h_seq) {
        StructuredMatrix s;
        s.family = Family::hankel;
        s.n = (h_seq.size() + 1) / 2;
        s.seq = std::move(h_seq);
        return s;
    }
    /// band holds t_{-rho..rho}.
    static StructuredMatrix banded(std::size_t n, std::size_t rho, const std::vector<cplx>& band) {
        if (band.size() != 2 * rho + 1)
            throw std::invalid_argument("banded: band length must be 2*bandwidth+1");
        if (rho >= n) throw std::invalid_argument("banded: bandwidth must be below n");
        StructuredMatrix s;
        s.family = Family::banded_toeplitz;
        s.n = n;
        s.bandwidth = rho;
        s.seq.assign(2 * n - 1, 0.0);
        for (std::size_t q = 0; q < band.size(); ++q) s.seq[n - 1 - rho + q] = band[q];
        return s;
    }
    static StructuredMatrix toeplitz_like(std::vector<cplx> t_seq, std::vector<Edit> e) {
        StructuredMatrix s = toeplitz(std::move(t_seq));
        s.family = Family::toeplitz_like;
        s.edits = std::move(e);
        return s;
    }
    static StructuredMatrix hankel_like(std::vector<cplx> h_seq, std::vector<Edit> e) {
        StructuredMatrix s = hankel(std::move(h_seq));
        s.family = Family::hankel_like;
        s.edits = std::move(e);
        return s;
    }
};

inline std::size_t expected_seq_length(Family f, std::size_t n) {
    return f == Family::circulant ? n : 2 * n - 1;
}

inline void validate(const StructuredMatrix& s) {
    if (s.n < 2 || !is_power_of_two(s.n))
        throw std::invalid_argument("dimension must be a power of two >= 2");
    if (s.seq.size() != expected_seq_length(s.family, s.n))
        throw std::invalid_argument("sequence length does not match family");
    for (const cplx& z : s.seq)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("non-finite sequence entry");
    if (s.family == Family::banded_toeplitz) {
        if (s.bandwidth >= s.n) throw std::invalid_argument("bandwidth must be below n");
        for (long j = -static_cast<long>(s.n) + 1; j < static_cast<long>(s.n); ++j)
            if (std::abs(j) > static_cast<long>(s.bandwidth) && s.t(j) != 0.0)
                throw std::invalid_argument("banded: nonzero entry outside the band");
    }
    if (!s.edits.empty() && !is_like(s.family))
        throw std::invalid_argument("edits are only allowed for -like families");
    for (const Edit& e : s.edits)
        if (e.row >= s.n || e.col >= s.n) throw std::invalid_argument("edit index out of range");
}

inline ComplexMatrix build_structured(const StructuredMatrix& s) {
    validate(s);
    const std::size_t n = s.n;
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const long diff = static_cast<long>(i) - static_cast<long>(k);
            if (is_toeplitz_type(s.family))
                m(i, k) = s.t(diff);
            else if (s.family == Family::circulant)
                m(i, k) = s.seq[static_cast<std::size_t>((diff + static_cast<long>(n)) % static_cast<long>(n))];
            else
                m(i, k) = s.h(static_cast<long>(i + k));
        }
    }
    for (const Edit& e : s.edits) m(e.row, e.col) = e.value;
    return m;
}

/// Z_f: ones on the subdiagonal, f in the top-right corner.
inline ComplexMatrix unit_f_circulant(std::size_t n, double f) {
    if (n < 2) throw std::invalid_argument("unit_f_circulant: n < 2");
    ComplexMatrix z = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 1; i < n; ++i) z(i, i - 1) = 1.0;
    z(0, n - 1) = f;
    return z;
}

inline ComplexMatrix reversal_matrix(std::size_t n) {
    ComplexMatrix j = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) j(i, n - 1 - i) = 1.0;
    return j;
}

/// Columns v, Z_f v, ..., Z_f^{n-1} v.
inline ComplexMatrix f_circulant_from_vector(const ComplexVector& v, double f, std::size_t n = 0) {
    if (n == 0) n = static_cast<std::size_t>(v.size());
    if (static_cast<std::size_t>(v.size()) != n || n < 2)
        throw std::invalid_argument("f_circulant_from_vector: length mismatch");
    const ComplexMatrix z = unit_f_circulant(n, f);
    ComplexMatrix out(n, n);
    ComplexVector col = v;
    for (std::size_t c = 0; c < n; ++c) {
        out.col(c) = col;
        col = z * col;
    }
    return out;
}

/// [[0, M], [M^dagger, 0]]
inline ComplexMatrix hermitian_extend(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_extend: non-square input");
    const Eigen::Index n = m.rows();
    ComplexMatrix out = ComplexMatrix::Zero(2 * n, 2 * n);
    out.topRightCorner(n, n) = m;
    out.bottomLeftCorner(n, n) = m.adjoint();
    return out;
}

}  // namespace dispenc
