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
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "dispenc/structmat.hpp"

namespace dispenc {

/// Maximum qubit count for dense materialization.
inline constexpr std::size_t kExplicitCap = 12;
/// Maximum qubit count for statevector simulation (2^20 amplitudes).
inline constexpr std::size_t kStatevectorCap = 20;

struct ResourceTally {
    std::size_t queries = 0;
    std::size_t gates = 0;
    std::size_t ancillas = 0;

    ResourceTally& operator+=(const ResourceTally& o) {
        queries += o.queries;
        gates += o.gates;
        ancillas = std::max(ancillas, o.ancillas);
        return *this;
    }
    friend ResourceTally operator+(ResourceTally a, const ResourceTally& b) { return a += b; }
};

/// Basis-state index in [0, 2^m). Qubit 0 is the most significant bit.
struct BasisImage {
    std::uint64_t value;
    cplx phase;
};
using BasisFn = std::function<BasisImage(std::uint64_t)>;

struct Control {
    std::size_t qubit;
    bool value = true;
};

/// Unitary on a few target qubits; targets[0] is the most significant row bit.
struct DenseGate {
    std::vector<std::size_t> targets;
    ComplexMatrix matrix;
};

/// Phased permutation of the target register's basis states.
struct BasisMap {
    std::vector<std::size_t> targets;
    BasisFn forward;
    BasisFn backward;
};

/// One 2x2 block on `target` per basis value of the select register.
struct UniformlyControlled {
    std::vector<std::size_t> selects;
    std::size_t target;
    std::vector<Eigen::Matrix2cd> blocks;
};

struct Op {
    std::variant<DenseGate, BasisMap, UniformlyControlled> body;
    std::vector<Control> controls;
    ResourceTally cost;
    std::string label;
};

struct Register {
    std::string name;
    std::size_t offset = 0;
    std::size_t width = 0;

    std::vector<std::size_t> qubits() const {
        std::vector<std::size_t> q(width);
        for (std::size_t i = 0; i < width; ++i) q[i] = offset + i;
        return q;
    }
};

/// Named, contiguous, disjoint registers laid out in order.
class RegisterLayout {
  public:
    const Register& add(const std::string& name, std::size_t width) {
        for (const auto& r : regs_)
            if (r.name == name) throw std::invalid_argument("duplicate register: " + name);
        regs_.push_back({name, total_, width});
        total_ += width;
        return regs_.back();
    }
    const Register& at(const std::string& name) const {
        for (const auto& r : regs_)
            if (r.name == name) return r;
        throw std::out_of_range("no register named " + name);
    }
    bool has(const std::string& name) const {
        for (const auto& r : regs_)
            if (r.name == name) return true;
        return false;
    }
    std::size_t total() const { return total_; }
    const std::vector<Register>& registers() const { return regs_; }

  private:
    std::vector<Register> regs_;
    std::size_t total_ = 0;
};

namespace detail {

inline std::uint64_t extract_bits(std::uint64_t idx, const std::vector<std::uint64_t>& masks) {
    std::uint64_t v = 0;
    for (std::uint64_t mk : masks) v = (v << 1) | ((idx & mk) ? 1u : 0u);
    return v;
}

inline std::uint64_t deposit_bits(std::uint64_t v, const std::vector<std::uint64_t>& masks) {
    std::uint64_t out = 0;
    const std::size_t k = masks.size();
    for (std::size_t q = 0; q < k; ++q)
        if ((v >> (k - 1 - q)) & 1u) out |= masks[q];
    return out;
}

inline Eigen::Matrix2cd adjoint2(const Eigen::Matrix2cd& b) { return b.adjoint(); }

}  // namespace detail

/// Ordered gate list on m qubits.
class Circuit {
  public:
    explicit Circuit(std::size_t m = 0) : m_(m) {}

    std::size_t qubits() const { return m_; }
    const std::vector<Op>& ops() const { return ops_; }

    /// Ancilla qubits that the encoding projects onto |0>.
    std::size_t declared_ancillas = 0;

    Circuit& add(Op op) {
        auto check = [&](std::size_t q) {
            if (q >= m_) throw std::out_of_range("circuit: qubit index out of range");
        };
        std::visit(
            [&](auto& b) {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, UniformlyControlled>) {
                    for (auto q : b.selects) check(q);
                    check(b.target);
                } else {
                    for (auto q : b.targets) check(q);
                }
                if constexpr (std::is_same_v<T, DenseGate>) {
                    const Eigen::Index d = Eigen::Index(1) << b.targets.size();
                    if (b.matrix.rows() != d || b.matrix.cols() != d)
                        throw std::invalid_argument("dense gate: matrix size mismatch");
                }
            },
            op.body);
        for (const auto& c : op.controls) check(c.qubit);
        ops_.push_back(std::move(op));
        return *this;
    }

    Circuit& dense(std::vector<std::size_t> targets, ComplexMatrix u, std::size_t gates = 1, std::string label = {}) {
        return add(Op{DenseGate{std::move(targets), std::move(u)}, {}, ResourceTally{0, gates, 0}, std::move(label)});
    }

    Circuit& basis_map(std::vector<std::size_t> targets, BasisFn fwd, BasisFn bwd, ResourceTally cost,
                       std::string label = {}) {
        return add(Op{BasisMap{std::move(targets), std::move(fwd), std::move(bwd)}, {}, cost, std::move(label)});
    }

    Circuit& uniform(std::vector<std::size_t> selects, std::size_t target, std::vector<Eigen::Matrix2cd> blocks,
                     ResourceTally cost, std::string label = {}) {
        return add(Op{UniformlyControlled{std::move(selects), target, std::move(blocks)}, {}, cost, std::move(label)});
    }

    /// Appends `sub` with its qubit q mapped to map[q].
    Circuit& append(const Circuit& sub, const std::vector<std::size_t>& map) {
        if (map.size() != sub.qubits()) throw std::invalid_argument("append: qubit map size mismatch");
        for (Op op : sub.ops_) {
            std::visit(
                [&](auto& b) {
                    using T = std::decay_t<decltype(b)>;
                    if constexpr (std::is_same_v<T, UniformlyControlled>) {
                        for (auto& q : b.selects) q = map[q];
                        b.target = map[b.target];
                    } else {
                        for (auto& q : b.targets) q = map[q];
                    }
                },
                op.body);
            for (auto& c : op.controls) c.qubit = map[c.qubit];
            add(std::move(op));
        }
        return *this;
    }

    Circuit& append(const Circuit& sub) {
        std::vector<std::size_t> map(sub.qubits());
        for (std::size_t q = 0; q < map.size(); ++q) map[q] = q;
        return append(sub, map);
    }

    Circuit adjoint() const {
        Circuit out(m_);
        out.declared_ancillas = declared_ancillas;
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
            Op op = *it;
            std::visit(
                [](auto& b) {
                    using T = std::decay_t<decltype(b)>;
                    if constexpr (std::is_same_v<T, DenseGate>) {
                        b.matrix = ComplexMatrix(b.matrix.adjoint());
                    } else if constexpr (std::is_same_v<T, BasisMap>) {
                        std::swap(b.forward, b.backward);
                    } else {
                        for (auto& blk : b.blocks) blk = detail::adjoint2(blk);
                    }
                },
                op.body);
            if (!op.label.empty()) op.label += "^dag";
            out.ops_.push_back(std::move(op));
        }
        return out;
    }

    /// Every op gains the extra controls; each control adds one gate per op.
    Circuit controlled(const std::vector<Control>& extra) const {
        Circuit out(m_);
        out.declared_ancillas = declared_ancillas;
        for (Op op : ops_) {
            op.controls.insert(op.controls.end(), extra.begin(), extra.end());
            op.cost.gates += extra.size();
            out.add(std::move(op));
        }
        return out;
    }

    ResourceTally tally() const {
        ResourceTally t;
        for (const auto& op : ops_) {
            t.queries += op.cost.queries;
            t.gates += op.cost.gates;
        }
        t.ancillas = declared_ancillas;
        return t;
    }

    /// In-place application to a raw amplitude vector of length 2^m.
    void run(ComplexVector& amps) const {
        if (static_cast<std::uint64_t>(amps.size()) != (std::uint64_t{1} << m_))
            throw std::invalid_argument("circuit: qubit-count mismatch");
        for (const auto& op : ops_) apply_op(op, amps);
    }

  private:
    std::uint64_t mask_of(std::size_t q) const { return std::uint64_t{1} << (m_ - 1 - q); }

    std::vector<std::uint64_t> masks_of(const std::vector<std::size_t>& qs) const {
        std::vector<std::uint64_t> out;
        out.reserve(qs.size());
        for (auto q : qs) out.push_back(mask_of(q));
        return out;
    }

    void apply_op(const Op& op, ComplexVector& amps) const {
        std::uint64_t cmask = 0, cval = 0;
        for (const auto& c : op.controls) {
            cmask |= mask_of(c.qubit);
            if (c.value) cval |= mask_of(c.qubit);
        }
        const std::uint64_t dim = static_cast<std::uint64_t>(amps.size());
        if (const auto* g = std::get_if<DenseGate>(&op.body)) {
            const auto masks = masks_of(g->targets);
            std::uint64_t tmask = 0;
            for (auto mk : masks) tmask |= mk;
            const std::size_t d = std::size_t{1} << masks.size();
            std::vector<std::uint64_t> off(d);
            for (std::size_t r = 0; r < d; ++r) off[r] = detail::deposit_bits(r, masks);
            ComplexVector v(d), w(d);
            for (std::uint64_t idx = 0; idx < dim; ++idx) {
                if ((idx & tmask) != 0 || (idx & cmask) != cval) continue;
                for (std::size_t r = 0; r < d; ++r) v(r) = amps(idx | off[r]);
                w.noalias() = g->matrix * v;
                for (std::size_t r = 0; r < d; ++r) amps(idx | off[r]) = w(r);
            }
        } else if (const auto* b = std::get_if<BasisMap>(&op.body)) {
            const auto masks = masks_of(b->targets);
            std::uint64_t tmask = 0;
            for (auto mk : masks) tmask |= mk;
            const std::uint64_t width = std::uint64_t{1} << masks.size();
            ComplexVector out = ComplexVector::Zero(amps.size());
            for (std::uint64_t idx = 0; idx < dim; ++idx) {
                const cplx a = amps(idx);
                if (a == 0.0) continue;
                if ((idx & cmask) != cval) {
                    out(idx) += a;
                    continue;
                }
                const BasisImage img = b->forward(detail::extract_bits(idx, masks));
                if (img.value >= width) throw std::logic_error("basis map image out of range");
                out((idx & ~tmask) | detail::deposit_bits(img.value, masks)) += img.phase * a;
            }
            amps.swap(out);
        } else {
            const auto& u = std::get<UniformlyControlled>(op.body);
            const auto smasks = masks_of(u.selects);
            const std::uint64_t tm = mask_of(u.target);
            for (std::uint64_t idx = 0; idx < dim; ++idx) {
                if ((idx & tm) != 0 || (idx & cmask) != cval) continue;
                const std::uint64_t sel = detail::extract_bits(idx, smasks);
                if (sel >= u.blocks.size()) continue;
                const Eigen::Matrix2cd& blk = u.blocks[sel];
                const cplx a0 = amps(idx), a1 = amps(idx | tm);
                amps(idx) = blk(0, 0) * a0 + blk(0, 1) * a1;
                amps(idx | tm) = blk(1, 0) * a0 + blk(1, 1) * a1;
            }
        }
    }

    std::size_t m_;
    std::vector<Op> ops_;
};

/// l2-normalized amplitude vector on m qubits.
class QState {
  public:
    QState(std::size_t m, ComplexVector amps) : m_(m), amps_(std::move(amps)) {
        if (m_ > kStatevectorCap) throw std::length_error("QState: too many qubits");
        if (static_cast<std::uint64_t>(amps_.size()) != (std::uint64_t{1} << m_))
            throw std::invalid_argument("QState: amplitude count must be 2^m");
        if (std::abs(amps_.norm() - 1.0) > 1e-12) throw std::invalid_argument("QState: not normalized");
    }

    static QState basis(std::size_t m, std::uint64_t index) {
        ComplexVector v = ComplexVector::Zero(Eigen::Index(1) << m);
        if (index >= static_cast<std::uint64_t>(v.size())) throw std::out_of_range("QState: basis index");
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return QState(m, std::move(v));
    }

    /// Normalizes v; its length must be a power of two.
    static QState from_vector(const ComplexVector& v) {
        const std::size_t len = static_cast<std::size_t>(v.size());
        if (!is_power_of_two(len)) throw std::invalid_argument("QState: length must be a power of two");
        const double nrm = v.norm();
        if (nrm == 0.0) throw std::invalid_argument("QState: zero vector");
        return QState(ilog2(len), v / nrm);
    }

    std::size_t qubits() const { return m_; }
    const ComplexVector& amps() const { return amps_; }

  private:
    std::size_t m_;
    ComplexVector amps_;
};

/// Applies U and renormalizes away round-off; adds U's tally to `run` if given.
inline QState apply(const Circuit& u, const QState& s, ResourceTally* run = nullptr) {
    if (u.qubits() != s.qubits()) throw std::invalid_argument("apply: qubit-count mismatch");
    ComplexVector v = s.amps();
    u.run(v);
    if (run) *run += u.tally();
    return QState(s.qubits(), v / v.norm());
}

inline ComplexMatrix materialize(const Circuit& u) {
    if (u.qubits() > kExplicitCap) throw std::length_error("materialize: above the explicit cap");
    const Eigen::Index d = Eigen::Index(1) << u.qubits();
    ComplexMatrix out(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        ComplexVector v = ComplexVector::Zero(d);
        v(c) = 1.0;
        u.run(v);
        out.col(c) = v;
    }
    return out;
}

inline double unitarity_defect(const ComplexMatrix& u) {
    return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

}  // namespace dispenc
