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

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dispenc/prep/steerable.hpp"

namespace dispenc {

/// Binary tree over leaf moduli. nodes holds the internal nodes in heap order
/// (nodes[0] is the root, children of p are 2p+1 and 2p+2).
struct QramTree {
    std::size_t n = 0;
    std::vector<cplx> leaves;
    std::vector<double> nodes;

    std::size_t depth() const { return ilog2(n); }
    double root() const { return nodes.empty() ? std::abs(leaves.at(0)) : nodes[0]; }

    /// Modulus sum of the subtree at `level` (0 = root) with address prefix p.
    double subtree(std::size_t level, std::size_t p) const {
        if (level == depth()) return std::abs(leaves[p]);
        return nodes[(std::size_t{1} << level) - 1 + p];
    }

    /// Entries stored: leaves plus internal nodes.
    std::size_t memory_entries() const { return leaves.size() + nodes.size(); }
};

inline QramTree qram_build(const std::vector<cplx>& x) {
    if (!is_power_of_two(x.size())) throw std::invalid_argument("qram_build: length must be a power of two");
    QramTree t;
    t.n = x.size();
    t.leaves = x;
    t.nodes.assign(t.n - 1, 0.0);
    const std::size_t s = t.depth();
    for (std::size_t lv = s; lv-- > 0;) {
        for (std::size_t p = 0; p < (std::size_t{1} << lv); ++p)
            t.nodes[(std::size_t{1} << lv) - 1 + p] = t.subtree(lv + 1, 2 * p) + t.subtree(lv + 1, 2 * p + 1);
    }
    if (t.root() == 0.0) throw std::invalid_argument("qram_build: zero vector");
    return t;
}

inline QramTree qram_build(const ComplexVector& x) {
    return qram_build(std::vector<cplx>(x.data(), x.data() + x.size()));
}

/// Angle bits so that a depth-s loader is within eps_p of the exact state.
inline std::size_t qram_bits(std::size_t depth, double eps_p) {
    if (eps_p <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(std::log2(3.0 * std::numbers::pi * double(depth + 1) / eps_p)));
}

/// Gates for one tree level: node lookup over the address, angle arithmetic, rotation, uncompute.
inline std::size_t qram_level_gates(std::size_t level, std::size_t bits) {
    const std::size_t b = bits ? bits : 52;
    return 2 * (level + 1) + 2 * cost::adder(b) + b;
}

namespace detail {

inline Eigen::Matrix2cd tree_block(double left, double right, cplx phase_l, cplx phase_r, std::size_t bits) {
    const double tot = left + right;
    if (tot == 0.0) return Eigen::Matrix2cd::Identity();
    double th = std::atan2(std::sqrt(right / tot), std::sqrt(left / tot));
    double p0 = std::arg(phase_l), p1 = std::arg(phase_r);
    if (bits > 0) {
        th = quantize(th, bits);
        p0 = quantize(p0, bits);
        p1 = quantize(p1, bits);
    }
    const double c = std::cos(th), sn = std::sin(th);
    Eigen::Matrix2cd m;
    m << c * std::polar(1.0, p0), -sn * std::polar(1.0, -p1), sn * std::polar(1.0, p1), c * std::polar(1.0, -p0);
    return m;
}

/// Appends the level rotations of each tree, selected by `outer` (may be empty) plus
/// the address prefix on `reg`. trees[v] is used when outer holds v.
inline void tree_loader(Circuit& c, const std::vector<const QramTree*>& trees, const std::vector<std::size_t>& outer,
                        const std::vector<std::size_t>& reg, RootBranch branch, std::size_t bits) {
    const std::size_t s = reg.size();
    for (std::size_t lv = 0; lv < s; ++lv) {
        std::vector<Eigen::Matrix2cd> blocks;
        for (const QramTree* t : trees) {
            for (std::size_t p = 0; p < (std::size_t{1} << lv); ++p) {
                if (t == nullptr) {
                    blocks.push_back(Eigen::Matrix2cd::Identity());
                    continue;
                }
                cplx pl = 1.0, pr = 1.0;
                if (lv + 1 == s) {
                    auto root = [branch](cplx z) {
                        const cplx r = branch == RootBranch::principal ? principal_sqrt(z) : conjugate_root(z);
                        return r == 0.0 ? cplx(1.0) : r;
                    };
                    pl = root(t->leaves[2 * p]);
                    pr = root(t->leaves[2 * p + 1]);
                }
                blocks.push_back(tree_block(t->subtree(lv + 1, 2 * p), t->subtree(lv + 1, 2 * p + 1), pl, pr, bits));
            }
        }
        std::vector<std::size_t> sel = outer;
        sel.insert(sel.end(), reg.begin(), reg.begin() + lv);
        c.uniform(sel, reg[lv], std::move(blocks), ResourceTally{0, qram_level_gates(lv + outer.size(), bits), 0},
                  "qram");
    }
}

}  // namespace detail

/// Loader circuit for sum_i root(x_i)|i> / sqrt(||x||_1) on log n qubits.
inline Circuit qram_circuit(const QramTree& tree, double eps_p, RootBranch branch = RootBranch::principal) {
    const std::size_t s = tree.depth();
    Circuit c(s);
    if (s == 0) return c;
    detail::tree_loader(c, {&tree}, {}, detail::iota_qubits(0, s), branch, qram_bits(s, eps_p));
    return c;
}

inline QState qram_prep(const QramTree& tree, double eps_p) {
    const Circuit c = qram_circuit(tree, eps_p);
    return apply(c, QState::basis(c.qubits(), 0));
}

/// Row-wise loaders on the register pair (i, k), 2 log n qubits.
///   P : |i>|0> -> |i> sum_k root(x_ik)|k> / sqrt(||x_i.||_1)
///   Pc: the same with conjugate roots
///   Q : |0>|k> -> sum_i sqrt(||x_i.||_1)|i>|k> / sqrt(sum of norms)
struct RowMaps {
    Circuit P;
    Circuit Pc;
    Circuit Q;
    std::size_t memory_entries = 0;
};

inline RowMaps qram_row_maps(const std::vector<QramTree>& rows, const QramTree& norms, double eps_p) {
    const std::size_t n = norms.n;
    if (rows.size() != n) throw std::invalid_argument("qram_row_maps: missing row tree");
    for (const auto& r : rows)
        if (r.n != n) throw std::invalid_argument("qram_row_maps: row tree size mismatch");
    const std::size_t s = ilog2(n);
    const auto iq = detail::iota_qubits(0, s), kq = detail::iota_qubits(s, s);
    const std::size_t bits = qram_bits(2 * s, eps_p);
    RowMaps m{Circuit(2 * s), Circuit(2 * s), Circuit(2 * s), 0};
    std::vector<const QramTree*> ptrs;
    for (std::size_t i = 0; i < n; ++i) {
        ptrs.push_back(norms.leaves[i] == 0.0 ? nullptr : &rows[i]);
        if (ptrs.back()) {
            std::size_t nnz = 0;
            for (const auto& z : rows[i].leaves) nnz += z != 0.0;
            m.memory_entries += nnz + nnz * s;  // leaves plus their root paths
        }
    }
    m.memory_entries += norms.memory_entries();
    detail::tree_loader(m.Q, {&norms}, {}, iq, RootBranch::principal, bits);
    detail::tree_loader(m.P, ptrs, iq, kq, RootBranch::principal, bits);
    detail::tree_loader(m.Pc, ptrs, iq, kq, RootBranch::conjugate, bits);
    return m;
}

/// Row trees and the norm tree for an n x n coefficient grid stored row-major.
inline std::pair<std::vector<QramTree>, QramTree> qram_grid_trees(const std::vector<cplx>& grid, std::size_t n) {
    std::vector<QramTree> rows;
    std::vector<cplx> norm(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<cplx> row(grid.begin() + i * n, grid.begin() + (i + 1) * n);
        double l1 = 0.0;
        for (const auto& z : row) l1 += std::abs(z);
        norm[i] = l1;
        if (l1 == 0.0) row[0] = 1.0;  // placeholder tree, never selected
        rows.push_back(qram_build(row));
    }
    return {rows, qram_build(norm)};
}

}  // namespace dispenc
