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
#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

#include "dispenc/displacement.hpp"
#include "dispenc/prep/amplify.hpp"

namespace dispenc {

/// Column positions of the nonzeros in rows 1..n-1: cols[i][k] = f(i, k), k < d.
/// Row 0 is dense and its entry is ignored.
struct PositionOracle {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::vector<std::size_t>> cols;

    void validate() const {
        if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("position oracle: n must be a power of two");
        if (d < 1 || d > n) throw std::invalid_argument("position oracle: d must lie in [1, n]");
        if (cols.size() != n) throw std::invalid_argument("position oracle: one row per index required");
        for (std::size_t i = 1; i < n; ++i) {
            if (cols[i].size() != d) throw std::invalid_argument("position oracle: each row needs d positions");
            std::set<std::size_t> seen;
            for (auto c : cols[i]) {
                if (c >= n) throw std::invalid_argument("position oracle: column out of range");
                if (!seen.insert(c).second) throw std::invalid_argument("position oracle: non-injective row");
            }
        }
    }

    /// Row permutation sending k < d to f(i, k) and the rest to the unused columns in order.
    std::vector<std::size_t> permutation(std::size_t i) const {
        std::vector<std::size_t> p(n);
        if (i == 0) {
            for (std::size_t k = 0; k < n; ++k) p[k] = k;
            return p;
        }
        std::vector<bool> used(n, false);
        for (std::size_t k = 0; k < d; ++k) {
            p[k] = cols[i][k];
            used[cols[i][k]] = true;
        }
        std::size_t next = d;
        for (std::size_t c = 0; c < n; ++c)
            if (!used[c]) p[next++] = c;
        return p;
    }
};

inline std::size_t round_up_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

/// Positions for a -like matrix from its edit list: last column plus the structural
/// support of every edit inside the displacement sub-matrix, padded to d (a power of two).
inline PositionOracle position_oracle_from_edits(const StructuredMatrix& s) {
    const std::size_t n = s.n;
    const bool stein = is_hankel_type(s.family);
    std::vector<std::set<std::size_t>> rows(n);
    auto mark = [&](std::size_t r, std::size_t c) {
        if (r >= 1 && c + 1 < n) rows[r].insert(c);
    };
    for (const auto& e : s.edits) {
        const std::size_t cm = (e.col + n - 1) % n, rp = (e.row + 1) % n;
        if (stein) {
            mark(e.row, e.col);
            mark(rp, cm);
        } else {
            mark(rp, e.col);
            mark(e.row, cm);
        }
    }
    std::size_t widest = 0;
    for (std::size_t i = 1; i < n; ++i) widest = std::max(widest, rows[i].size());
    PositionOracle po;
    po.n = n;
    po.d = std::min(n, round_up_pow2(widest + 1));
    po.cols.assign(n, {});
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<std::size_t> c = {n - 1};
        for (auto x : rows[i]) c.push_back(x);
        for (std::size_t pad = 0; c.size() < po.d; ++pad)
            if (std::find(c.begin(), c.end(), pad) == c.end()) c.push_back(pad);
        po.cols[i] = c;
    }
    return po;
}

/// Qubit layout of the sparse-support circuit: branch(1) row(s) col(s) flag(1).
struct SparseSupportLayout {
    std::size_t s = 0;
    std::size_t branch() const { return 0; }
    std::vector<std::size_t> row() const { return detail::iota_qubits(1, s); }
    std::vector<std::size_t> col() const { return detail::iota_qubits(1 + s, s); }
    std::size_t flag() const { return 2 * s + 1; }
    std::size_t qubits() const { return 2 * s + 2; }
};

namespace detail {

inline ComplexMatrix hadamard() {
    ComplexMatrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
}

/// Steps up to the controlled flag rotation, before any amplification.
inline Circuit sparse_support_stage0(const PositionOracle& po) {
    const SparseSupportLayout lay{ilog2(po.n)};
    const std::size_t s = lay.s, n = po.n, logd = ilog2(po.d);
    Circuit c(lay.qubits());
    const auto H = hadamard();
    c.dense({lay.branch()}, H, 1, "H");
    for (auto q : lay.col()) c.add(Op{DenseGate{{q}, H}, {{lay.branch(), false}}, {0, 2, 0}, "cH"});
    for (auto q : lay.row()) c.add(Op{DenseGate{{q}, H}, {{lay.branch(), true}}, {0, 2, 0}, "cH"});
    for (std::size_t q = 0; q < logd; ++q)
        c.add(Op{DenseGate{{lay.col()[s - 1 - q]}, H}, {{lay.branch(), true}}, {0, 2, 0}, "cH"});
    auto perms = std::make_shared<std::vector<std::vector<std::size_t>>>();
    auto inv = std::make_shared<std::vector<std::vector<std::size_t>>>();
    for (std::size_t i = 0; i < n; ++i) {
        perms->push_back(po.permutation(i));
        std::vector<std::size_t> b(n);
        for (std::size_t k = 0; k < n; ++k) b[(*perms)[i][k]] = k;
        inv->push_back(b);
    }
    auto make = [s](std::shared_ptr<std::vector<std::vector<std::size_t>>> table) {
        return [s, table](std::uint64_t v) -> BasisImage {
            const std::uint64_t i = v >> s, k = v & ((std::uint64_t{1} << s) - 1);
            return {(i << s) | (*table)[i][k], 1.0};
        };
    };
    Op pos{BasisMap{concat(lay.row(), lay.col()), make(perms), make(inv)}, {{lay.branch(), true}},
           ResourceTally{1, 2 * cost::adder(s), 0}, "position"};
    c.add(std::move(pos));
    const double a = 1.0 / std::sqrt(double(po.d));
    ComplexMatrix r(2, 2);
    r << a, -std::sqrt(1.0 - a * a), std::sqrt(1.0 - a * a), a;
    c.add(Op{DenseGate{{lay.flag()}, r}, {{lay.branch(), false}}, {0, 2, 0}, "cRy"});
    return c;
}

}  // namespace detail

/// Equal superposition over {(0,k)} and {(i, f(i,k)) : i >= 1, k < d} on (row, col),
/// with branch and flag returned to |0>.
inline Circuit sparse_support_circuit(const PositionOracle& po) {
    po.validate();
    if (!is_power_of_two(po.d)) throw std::invalid_argument("sparse support: d must be a power of two");
    const SparseSupportLayout lay{ilog2(po.n)};
    const std::size_t n = po.n, d = po.d, s = lay.s;
    const Circuit stage0 = detail::sparse_support_stage0(po);
    const std::size_t flag = lay.flag();
    auto mark_flag = [flag](Circuit& c, double phi) { c.dense({flag}, detail::phase_on_zero(phi), 1, "mark"); };
    const Circuit stage1 = long_amplify(stage0, std::sqrt(double(d + 1) / double(2 * d)), mark_flag);
    const auto regs = detail::concat({lay.branch()}, lay.row());
    auto mark_rows = [regs, s](Circuit& c, double phi) {
        const cplx ph = std::polar(1.0, phi);
        const std::uint64_t top = std::uint64_t{1} << s;
        auto good = [top](std::uint64_t v) { return !((v & top) != 0 && (v & (top - 1)) == 0); };
        c.basis_map(
            regs, [=](std::uint64_t v) { return BasisImage{v, good(v) ? ph : cplx(1.0)}; },
            [=](std::uint64_t v) { return BasisImage{v, good(v) ? std::conj(ph) : cplx(1.0)}; },
            ResourceTally{0, cost::multi_controlled(s + 1), 0}, "mark");
    };
    const double amp2 = double(n + (n - 1) * d) / double(n * (d + 1));
    Circuit out = long_amplify(stage1, std::sqrt(amp2), mark_rows);
    // branch ^= [row != 0]
    auto unbranch = [s](std::uint64_t v) -> BasisImage {
        const std::uint64_t top = std::uint64_t{1} << s;
        return {(v & (top - 1)) != 0 ? v ^ top : v, 1.0};
    };
    out.basis_map(regs, unbranch, unbranch, ResourceTally{0, cost::multi_controlled(s), 0}, "unbranch");
    return out;
}

inline QState sparse_support_prep(const PositionOracle& po) {
    const Circuit c = sparse_support_circuit(po);
    return apply(c, QState::basis(c.qubits(), 0));
}

/// Support of the sparse-support state as (row, col) pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> sparse_support_set(const PositionOracle& po) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 0; k < po.n; ++k) out.push_back({0, k});
    for (std::size_t i = 1; i < po.n; ++i)
        for (std::size_t k = 0; k < po.d; ++k) out.push_back({i, po.cols[i][k]});
    return out;
}

}  // namespace dispenc
