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

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dispenc/displacement.hpp"
#include "dispenc/sim/circuit.hpp"

namespace dispenc {

/// Elementary-gate charges for the arithmetic gadgets. The absolute constants
/// are implementation-defined; only their O(log n) form matters.
namespace cost {
inline constexpr std::size_t toffoli = 1;
inline std::size_t adder(std::size_t s) { return 6 * s + 1; }
inline std::size_t comparator(std::size_t s) { return 6 * s + 1; }
inline std::size_t constant_load(std::size_t s) { return s; }
/// Multi-controlled gate on c controls, linear decomposition.
inline std::size_t multi_controlled(std::size_t c) { return c == 0 ? 1 : 2 * c + 1; }
}  // namespace cost

enum class ArithKind { mod_adder, mod_subtractor, comparator };
enum class PhaseKind { f1, f2 };

namespace detail {

inline std::vector<std::size_t> iota_qubits(std::size_t first, std::size_t count) {
    std::vector<std::size_t> q(count);
    std::iota(q.begin(), q.end(), first);
    return q;
}

inline std::vector<std::size_t> concat(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline void require_pow2(std::size_t n) {
    if (n < 2 || !is_power_of_two(n)) throw std::invalid_argument("n must be a power of two >= 2");
}

}  // namespace detail

// ---- ops usable inside larger circuits -----------------------------------

/// b <- (b + sign * a) mod modulus, with a and b given as qubit lists.
inline void add_mod(Circuit& c, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                    std::uint64_t modulus, int sign = 1) {
    const std::size_t wa = a.size(), wb = b.size();
    const std::uint64_t mb = std::uint64_t{1} << wb;
    auto fwd = [=](std::uint64_t v) -> BasisImage {
        const std::uint64_t x = v >> wb, y = v & (mb - 1);
        if (y >= modulus) return {v, 1.0};
        const std::uint64_t xm = x % modulus;
        const std::uint64_t r = sign > 0 ? (y + xm) % modulus : (y + modulus - xm) % modulus;
        return {(x << wb) | r, 1.0};
    };
    auto bwd = [=](std::uint64_t v) -> BasisImage {
        const std::uint64_t x = v >> wb, y = v & (mb - 1);
        if (y >= modulus) return {v, 1.0};
        const std::uint64_t xm = x % modulus;
        const std::uint64_t r = sign > 0 ? (y + modulus - xm) % modulus : (y + xm) % modulus;
        return {(x << wb) | r, 1.0};
    };
    c.basis_map(detail::concat(a, b), fwd, bwd, ResourceTally{0, cost::adder(std::max(wa, wb)), 0},
                sign > 0 ? "add" : "sub");
}

/// b <- (b + sign * constant) mod modulus.
inline void add_const_mod(Circuit& c, const std::vector<std::size_t>& b, std::uint64_t constant,
                          std::uint64_t modulus, int sign = 1) {
    const std::uint64_t k = constant % modulus;
    if (k == 0) return;
    auto shift = [=](std::uint64_t y, int sg) -> std::uint64_t {
        if (y >= modulus) return y;
        return sg > 0 ? (y + k) % modulus : (y + modulus - k) % modulus;
    };
    c.basis_map(
        b, [=](std::uint64_t y) { return BasisImage{shift(y, sign), 1.0}; },
        [=](std::uint64_t y) { return BasisImage{shift(y, -sign), 1.0}; },
        ResourceTally{0, cost::adder(b.size()) + cost::constant_load(b.size()), 0}, "addc");
}

/// t <- t xor [value(b) < value(a)].
inline void compare(Circuit& c, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                    std::size_t t) {
    const std::size_t wb = b.size();
    auto f = [=](std::uint64_t v) -> BasisImage {
        const std::uint64_t rest = v >> 1;
        const std::uint64_t x = rest >> wb, y = rest & ((std::uint64_t{1} << wb) - 1);
        return {v ^ (y < x ? std::uint64_t{1} : std::uint64_t{0}), 1.0};
    };
    c.basis_map(detail::concat(detail::concat(a, b), {t}), f, f,
                ResourceTally{0, cost::comparator(std::max(a.size(), wb)), 0}, "cmp");
}

/// Multiplies by -1 where pred(value of qs) holds.
template <class Pred>
inline void phase_flip_where(Circuit& c, const std::vector<std::size_t>& qs, Pred pred, std::size_t gates,
                             const char* label) {
    auto f = [=](std::uint64_t v) -> BasisImage { return {v, pred(v) ? -1.0 : 1.0}; };
    c.basis_map(qs, f, f, ResourceTally{0, gates, 0}, label);
}

// ---- gadgets -------------------------------------------------------------

/// Z_f^j on log n qubits.
inline Circuit shift_power_circuit(std::size_t n, int f, std::size_t j) {
    detail::require_pow2(n);
    if (f != 1 && f != -1) throw std::invalid_argument("shift_power_circuit: f must be +1 or -1");
    if (j >= n) throw std::invalid_argument("shift_power_circuit: j out of range");
    const std::size_t s = ilog2(n);
    Circuit c(s);
    if (j == 0) return c;
    const auto q = detail::iota_qubits(0, s);
    if (f == -1)
        phase_flip_where(
            c, q, [=](std::uint64_t e) { return e >= n - j; }, cost::comparator(s), "wrap-sign");
    add_const_mod(c, q, j, n);
    return c;
}

/// J: |e> -> |n-1-e>, one X per qubit.
inline Circuit reversal_circuit(std::size_t n) {
    detail::require_pow2(n);
    const std::size_t s = ilog2(n);
    Circuit c(s);
    ComplexMatrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    for (std::size_t q = 0; q < s; ++q) c.dense({q}, x, 1, "X");
    return c;
}

/// mod_adder / mod_subtractor act on |j>|e> (log n qubits each);
/// comparator on |a>|b>|c> sets c ^= [b < a].
inline Circuit arith_circuit(ArithKind kind, std::size_t n) {
    detail::require_pow2(n);
    const std::size_t s = ilog2(n);
    const auto a = detail::iota_qubits(0, s), b = detail::iota_qubits(s, s);
    if (kind == ArithKind::comparator) {
        Circuit c(2 * s + 1);
        compare(c, a, b, 2 * s);
        return c;
    }
    Circuit c(2 * s);
    add_mod(c, a, b, n, kind == ArithKind::mod_adder ? 1 : -1);
    return c;
}

/// Compact phase oracle. f1 acts on |j>|e> with j on log n + 1 qubits; f2 on |k>|e>.
/// Charged at the cost of the comparator netlist in phase_oracle_netlist.
inline Circuit phase_oracle(PhaseKind kind, std::size_t n) {
    detail::require_pow2(n);
    const std::size_t s = ilog2(n);
    if (kind == PhaseKind::f1) {
        Circuit c(2 * s + 1);
        const std::size_t we = s;
        phase_flip_where(
            c, detail::iota_qubits(0, 2 * s + 1),
            [=](std::uint64_t v) {
                const std::uint64_t j = v >> we, e = v & ((std::uint64_t{1} << we) - 1);
                return j >= n && j <= 2 * n - 1 && e >= 2 * n - j && e <= n - 1;
            },
            2 * (cost::constant_load(s + 1) + cost::adder(s + 1) + 2 * cost::comparator(s + 1)) + cost::toffoli + 4,
            "f1");
        return c;
    }
    Circuit c(2 * s);
    phase_flip_where(
        c, detail::iota_qubits(0, 2 * s),
        [=](std::uint64_t v) {
            const std::uint64_t k = v >> s, e = v & ((std::uint64_t{1} << s) - 1);
            return k < e;
        },
        cost::comparator(s) + 2, "f2");
    return c;
}

/// The comparator + Toffoli construction with explicit scratch registers.
/// Layout f1: j(s+1) e(s) b1(s+1) b2(s+1) c1 c2 c3.  f2: k(s) e(s) c.
/// Scratch must start in |0> and is returned to |0>.
inline Circuit phase_oracle_netlist(PhaseKind kind, std::size_t n) {
    detail::require_pow2(n);
    const std::size_t s = ilog2(n);
    ComplexMatrix x(2, 2), h(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    auto load_const = [&](Circuit& c, const std::vector<std::size_t>& reg, std::uint64_t v) {
        for (std::size_t q = 0; q < reg.size(); ++q)
            if ((v >> (reg.size() - 1 - q)) & 1u) c.dense({reg[q]}, x, 1, "X");
    };
    if (kind == PhaseKind::f1) {
        const auto j = detail::iota_qubits(0, s + 1);
        const auto e = detail::iota_qubits(s + 1, s);
        const auto b1 = detail::iota_qubits(2 * s + 1, s + 1);
        const auto b2 = detail::iota_qubits(3 * s + 2, s + 1);
        const std::size_t c1 = 4 * s + 3, c2 = c1 + 1, c3 = c1 + 2;
        Circuit c(4 * s + 6);
        Circuit compute(4 * s + 6);
        load_const(compute, b1, n - 1);
        load_const(compute, b2, 2 * n - 1);
        add_mod(compute, j, b2, 2 * n, -1);  // b2 = 2n-1-j
        compare(compute, j, b1, c1);         // c1 = [n-1 < j]
        compare(compute, e, b2, c2);         // c2 = [2n-1-j < e]
        c.append(compute);
        c.dense({c3}, x, 1, "X");
        c.dense({c3}, h, 1, "H");
        c.add(Op{DenseGate{{c3}, x}, {{c1, true}, {c2, true}}, ResourceTally{0, cost::toffoli, 0}, "CCX"});
        c.dense({c3}, h, 1, "H");
        c.dense({c3}, x, 1, "X");
        c.append(compute.adjoint());
        return c;
    }
    const auto k = detail::iota_qubits(0, s);
    const auto e = detail::iota_qubits(s, s);
    const std::size_t t = 2 * s;
    Circuit c(2 * s + 1);
    c.dense({t}, x, 1, "X");
    c.dense({t}, h, 1, "H");
    compare(c, e, k, t);  // kickback of [k < e]
    c.dense({t}, h, 1, "H");
    c.dense({t}, x, 1, "X");
    return c;
}

// ---- select ---------------------------------------------------------------

/// How LCU terms are laid out on the index register of select.
///   shift_pair: 2n slots; slot j < n holds Z_1^j, slot n + m holds Z_{-1}^m
///               (each followed by J when reflect is set); slot n is unused.
///   grid:       n^2 slots (i, k), the general displacement words.
///   compact:    an explicit word list, padded to a power of two.
struct SlotLayout {
    enum class Kind { shift_pair, grid, compact };

    Kind kind = Kind::shift_pair;
    std::size_t n = 0;
    bool reflect = false;  // shift_pair: J applied first
    bool stein = false;    // grid: words carry J
    std::vector<Word> words;

    std::size_t index_qubits() const {
        const std::size_t s = ilog2(n);
        switch (kind) {
        case Kind::shift_pair: return s + 1;
        case Kind::grid: return 2 * s;
        case Kind::compact: return std::max<std::size_t>(1, ilog2(words.size()));
        }
        return 0;
    }
    std::size_t slots() const { return std::size_t{1} << index_qubits(); }

    struct Slot {
        Word word;
        double sign = 1.0;
        bool used = false;
    };

    Slot slot(std::size_t j) const {
        switch (kind) {
        case Kind::shift_pair:
            if (j < n) return {Word{j, n - 1, reflect}, 1.0, true};
            if (j == n) return {};
            if (!reflect) return {Word{0, 2 * n - 1 - j, false}, 1.0, true};
            // Z_{-1}^m J = -J Z_{-1}^{n-m}
            return {Word{0, j - n - 1, true}, -1.0, true};
        case Kind::grid: return {Word{j / n, j % n, stein}, 1.0, true};
        case Kind::compact:
            if (j < words.size()) return {words[j], 1.0, true};
            return {};
        }
        return {};
    }
};

inline bool is_single_shift(const Word& w, std::size_t n) { return w.i == 0 || w.k == n - 1; }

inline SlotLayout default_layout(const LcuDecomposition& dec) {
    SlotLayout lay;
    lay.n = dec.n;
    bool single = true, all_j = true, no_j = true;
    for (const auto& t : dec.terms) {
        single = single && is_single_shift(t.word, dec.n);
        all_j = all_j && t.word.uses_J;
        no_j = no_j && !t.word.uses_J;
    }
    if (single && (all_j || no_j)) {
        lay.kind = SlotLayout::Kind::shift_pair;
        lay.reflect = all_j && !dec.terms.empty();
    } else if (all_j || no_j) {
        lay.kind = SlotLayout::Kind::grid;
        lay.stein = all_j && !dec.terms.empty();
    } else {
        throw std::invalid_argument("select_u: mixed word alphabet");
    }
    return lay;
}

inline SlotLayout compact_layout(const LcuDecomposition& dec) {
    SlotLayout lay;
    lay.kind = SlotLayout::Kind::compact;
    lay.n = dec.n;
    for (const auto& t : dec.terms) lay.words.push_back(t.word);
    if (lay.words.empty()) lay.words.push_back(Word{0, dec.n - 1, false});
    return lay;
}

/// Coefficient per slot so that sum_j c_j U_slot(j) = sum_terms coeff * word.
inline std::vector<cplx> slot_coefficients(const LcuDecomposition& dec, const SlotLayout& lay) {
    std::vector<cplx> out(lay.slots(), 0.0);
    std::vector<bool> placed(dec.terms.size(), false);
    for (std::size_t j = 0; j < lay.slots(); ++j) {
        const auto sl = lay.slot(j);
        if (!sl.used) continue;
        for (std::size_t t = 0; t < dec.terms.size(); ++t) {
            if (!placed[t] && dec.terms[t].word == sl.word) {
                out[j] = sl.sign * dec.terms[t].coeff;
                placed[t] = true;
                break;
            }
        }
    }
    for (bool p : placed)
        if (!p) throw std::invalid_argument("slot_coefficients: term outside the slot layout");
    return out;
}

/// sum_j |j><j| (x) U_j on (index register, system register).
inline Circuit select_u(const LcuDecomposition& dec, const SlotLayout& lay) {
    const std::size_t n = dec.n;
    detail::require_pow2(n);
    const std::size_t s = ilog2(n), w = lay.index_qubits();
    Circuit c(w + s);
    const auto idx = detail::iota_qubits(0, w);
    const auto sys = detail::iota_qubits(w, s);
    switch (lay.kind) {
    case SlotLayout::Kind::shift_pair: {
        if (lay.reflect) c.append(reversal_circuit(n), sys);
        c.append(phase_oracle(PhaseKind::f1, n), detail::concat(idx, sys));
        add_mod(c, idx, sys, n, 1);
        break;
    }
    case SlotLayout::Kind::grid: {
        const auto ri = detail::iota_qubits(0, s), rk = detail::iota_qubits(s, s);
        c.append(phase_oracle(PhaseKind::f2, n), detail::concat(rk, sys));
        // e <- e - k - 1
        add_mod(c, rk, sys, n, -1);
        add_const_mod(c, sys, 1, n, -1);
        if (lay.stein) c.append(reversal_circuit(n), sys);
        add_mod(c, ri, sys, n, 1);
        break;
    }
    case SlotLayout::Kind::compact: {
        const std::vector<Word> words = lay.words;
        const std::uint64_t mask = (std::uint64_t{1} << s) - 1;
        auto fwd = [=](std::uint64_t v) -> BasisImage {
            const std::uint64_t t = v >> s, e = v & mask;
            if (t >= words.size()) return {v, 1.0};
            const auto img = apply_word(n, words[t], e);
            return {(t << s) | img.index, img.sign};
        };
        auto bwd = [=](std::uint64_t v) -> BasisImage {
            const std::uint64_t t = v >> s, y = v & mask;
            if (t >= words.size()) return {v, 1.0};
            for (std::uint64_t e = 0; e < n; ++e) {
                const auto img = apply_word(n, words[t], e);
                if (img.index == y) return {(t << s) | e, img.sign};
            }
            throw std::logic_error("select_u: word is not a permutation");
        };
        const std::size_t per_word = 2 * cost::adder(s) + cost::comparator(s) + s + cost::multi_controlled(w);
        c.basis_map(detail::concat(idx, sys), fwd, bwd, ResourceTally{0, words.size() * per_word, 0}, "select");
        break;
    }
    }
    return c;
}

inline Circuit select_u(const LcuDecomposition& dec) { return select_u(dec, default_layout(dec)); }

}  // namespace dispenc
