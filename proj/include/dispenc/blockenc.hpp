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
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dispenc/displacement.hpp"
#include "dispenc/sim/circuit.hpp"
#include "dispenc/sim/gadgets.hpp"
#include "dispenc/stateprep.hpp"

namespace dispenc {

enum class ModelKind { blackbox, qram, explicit_ };

inline const char* model_name(ModelKind m) {
    switch (m) {
    case ModelKind::blackbox: return "blackbox";
    case ModelKind::qram: return "qram";
    case ModelKind::explicit_: return "explicit";
    }
    return "?";
}

inline ModelKind model_from_name(const std::string& s) {
    if (s == "blackbox") return ModelKind::blackbox;
    if (s == "qram") return ModelKind::qram;
    if (s == "explicit") return ModelKind::explicit_;
    throw std::invalid_argument("unknown access model: " + s);
}

/// Claimed deviation for exactly loaded encodings (floating-point floor).
inline constexpr double kExactTolerance = 1e-8;

struct AccessModel {
    ModelKind kind = ModelKind::blackbox;
    double delta = 0.05;      // blackbox amplification target
    double eps_p = 1e-3;      // preparation precision
    bool exact_prep = true;   // numerically exact amplitude loading
    double target_eps = 0.0;  // when positive, delta and eps_p must respect it
    std::size_t oracle_bits = 52;
    double eps0 = 0.5;
    std::uint64_t seed = 7;
};

struct BlockEncoding {
    Circuit circuit;
    double alpha = 0.0;
    std::size_t ancillas = 0;
    std::size_t system_qubits = 0;
    double epsilon_bound = 0.0;
    ResourceTally tally;
    Family family = Family::toeplitz;
    AccessModel model;
    LcuDecomposition dec;
    std::optional<SlotLayout> layout;
    std::size_t memory_entries = 0;
    std::optional<PrepReport> prep;
    bool hermitian_complement = false;
};

/// Ancilla count for a family and access model. `terms` is used by the explicit model.
inline std::size_t expected_ancillas(Family f, ModelKind m, std::size_t n, std::size_t terms = 0) {
    const std::size_t s = ilog2(n);
    switch (m) {
    case ModelKind::blackbox: return is_like(f) ? 2 * s + 2 : s + 2;
    case ModelKind::qram: return is_like(f) ? 2 * s : s + 1;
    case ModelKind::explicit_: return std::max<std::size_t>(1, ilog2(std::max<std::size_t>(terms, 1)));
    }
    return 0;
}

namespace detail {

/// Unitary whose first column is the unit vector v (a phased Householder reflection).
inline ComplexMatrix unitary_with_first_column(const ComplexVector& v) {
    const Eigen::Index d = v.size();
    const double phi = std::abs(v(0)) > 0.0 ? std::arg(v(0)) : 0.0;
    const ComplexVector y = v * std::polar(1.0, -phi);
    ComplexVector w = -y;
    w(0) += 1.0;
    ComplexMatrix r = ComplexMatrix::Identity(d, d);
    const double wn = w.squaredNorm();
    if (wn > 1e-30) r -= (2.0 / wn) * w * w.adjoint();
    return std::polar(1.0, phi) * r;
}

inline Circuit exact_loader(std::size_t m, const std::vector<std::size_t>& index, const std::vector<cplx>& coeffs,
                            RootBranch branch) {
    Circuit c(m);
    const ComplexVector v = root_state(coeffs, branch);
    c.dense(index, unitary_with_first_column(v), std::size_t{1} << index.size(), "load");
    return c;
}

/// Resolves delta and eps_p against a target epsilon: chi*delta^2 <= eps/2 and chi*eps_p <= eps/2.
inline void resolve_budget(AccessModel& m, double chi) {
    if (!(m.target_eps > 0.0)) return;
    const double half = m.target_eps / 2.0;
    if (m.delta <= 0.0) m.delta = std::min(0.5, std::sqrt(half / chi));
    if (m.eps_p <= 0.0) m.eps_p = std::min(0.5, half / chi);
    const double slack = 1.0 + 1e-12;
    if (m.kind == ModelKind::blackbox && chi * m.delta * m.delta > half * slack)
        throw infeasible_error("encode: chi*delta^2 exceeds eps/2");
    if (m.kind != ModelKind::explicit_ && chi * m.eps_p > half * slack)
        throw infeasible_error("encode: chi*eps_p exceeds eps/2");
}

}  // namespace detail

/// Builds V*^dag . select . V for the family decomposition of `s`.
/// Qubits: ancillas first, then the log n system qubits.
inline BlockEncoding encode(const StructuredMatrix& s, AccessModel model) {
    validate(s);
    const std::size_t n = s.n;
    if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("encode: n must be a power of two >= 2");
    const std::size_t sq = ilog2(n);

    BlockEncoding be;
    be.family = s.family;
    be.dec = lcu_decompose_structured(s);
    be.system_qubits = sq;
    be.alpha = chi_scaling(be.dec);
    if (!(be.alpha > 0.0)) throw std::invalid_argument("encode: zero matrix has no block-encoding");
    const double chi = 2.0 * be.alpha;

    if (model.kind == ModelKind::explicit_ &&
        !(s.family == Family::banded_toeplitz || s.family == Family::circulant))
        throw std::invalid_argument("encode: explicit model supports banded and circulant only");
    if (model.kind != ModelKind::explicit_ && !model.exact_prep) {
        if (!(model.eps_p > 0.0 && model.eps_p < 1.0) && model.target_eps <= 0.0)
            throw infeasible_error("encode: eps_p must lie in (0,1)");
        if (model.kind == ModelKind::blackbox && !(model.delta > 0.0 && model.delta < 1.0) && model.target_eps <= 0.0)
            throw infeasible_error("encode: delta must lie in (0,1)");
    }
    detail::resolve_budget(model, chi);
    be.model = model;

    SlotLayout lay = model.kind == ModelKind::explicit_ ? compact_layout(be.dec) : default_layout(be.dec);
    if (model.kind != ModelKind::explicit_ && is_like(s.family)) {
        lay.kind = SlotLayout::Kind::grid;
        lay.stein = is_hankel_type(s.family);
    }
    be.layout = lay;
    const std::vector<cplx> coeffs = slot_coefficients(be.dec, lay);
    const std::size_t w = lay.index_qubits();
    const Circuit sel = select_u(be.dec, lay);

    std::size_t anc = 0;
    std::vector<std::size_t> index;  // index register inside the ancilla block
    std::optional<std::size_t> flag;
    if (model.kind == ModelKind::blackbox && lay.kind == SlotLayout::Kind::grid) {
        const SparseSupportLayout sl{sq};
        anc = sl.qubits();
        index = detail::concat(sl.row(), sl.col());
        flag = sl.flag();
    } else if (model.kind == ModelKind::blackbox) {
        anc = w + 1;
        index = detail::iota_qubits(0, w);
        flag = w;
    } else {
        anc = w;
        index = detail::iota_qubits(0, w);
    }
    be.ancillas = anc;

    Circuit V(anc), Vs(anc);
    if (model.kind == ModelKind::explicit_) {
        auto tree = qram_build(coeffs);
        V = Circuit(anc);
        V.append(qram_circuit(tree, 0.0, RootBranch::principal), index);
        Vs.append(qram_circuit(tree, 0.0, RootBranch::conjugate), index);
        be.epsilon_bound = kExactTolerance;
    } else if (model.exact_prep) {
        V = detail::exact_loader(anc, index, coeffs, RootBranch::principal);
        Vs = detail::exact_loader(anc, index, coeffs, RootBranch::conjugate);
        be.epsilon_bound = kExactTolerance;
        if (model.kind == ModelKind::qram) be.memory_entries = qram_build(coeffs).memory_entries();
    } else if (model.kind == ModelKind::qram) {
        if (lay.kind == SlotLayout::Kind::grid) {
            auto [rows, norms] = qram_grid_trees(coeffs, n);
            auto maps = qram_row_maps(rows, norms, model.eps_p);
            V.append(maps.Q).append(maps.P);
            Vs.append(maps.Q).append(maps.Pc);
            be.memory_entries = maps.memory_entries;
        } else {
            auto tree = qram_build(coeffs);
            V.append(qram_circuit(tree, model.eps_p, RootBranch::principal), index);
            Vs.append(qram_circuit(tree, model.eps_p, RootBranch::conjugate), index);
            be.memory_entries = tree.memory_entries();
        }
        be.epsilon_bound = chi * model.eps_p;
    } else {
        double mx = 0.0;
        for (const auto& z : coeffs) mx = std::max(mx, std::abs(z));
        auto shared = std::make_shared<std::vector<cplx>>(coeffs);
        // Each slot value combines two matrix entries.
        AmplitudeOracle oracle(coeffs.size(), [shared](std::size_t i) { return (*shared)[i]; }, mx,
                               model.oracle_bits, 2);
        Circuit w0 = lay.kind == SlotLayout::Kind::grid ? sparse_support_circuit(position_oracle_from_edits(s))
                                                         : hadamard_layer(anc, index);
        SteerableOptions opt;
        opt.delta = model.delta;
        opt.eps_p = model.eps_p;
        opt.exact_rotation = false;
        opt.eps0 = model.eps0;
        opt.seed = model.seed;
        std::mt19937_64 rng(model.seed);
        auto plan = steerable_circuit(w0, index, *flag, oracle, RootBranch::principal, opt, rng);
        auto plan_c = steerable_circuit(w0, index, *flag, oracle, RootBranch::conjugate, opt, rng,
                                        std::make_pair(plan.schedule, plan.report.rotation_bits));
        V = plan.circuit;
        Vs = plan_c.circuit;
        be.prep = plan.report;
        be.epsilon_bound = chi * (model.delta * model.delta + model.eps_p);
    }

    Circuit u(anc + sq);
    const auto anc_map = detail::iota_qubits(0, anc);
    const auto sys = detail::iota_qubits(anc, sq);
    u.append(V, anc_map);
    std::vector<std::size_t> sel_map = index;
    sel_map.insert(sel_map.end(), sys.begin(), sys.end());
    u.append(sel, sel_map);
    u.append(Vs.adjoint(), anc_map);
    u.declared_ancillas = anc;
    be.circuit = std::move(u);
    be.tally = be.circuit.tally();
    return be;
}

/// alpha * (<0|^a (x) I) U (|0>^a (x) I) as a dense matrix.
inline ComplexMatrix extract_block(const Circuit& u, std::size_t a, double alpha) {
    if (a > u.qubits()) throw std::invalid_argument("extract_block: more ancillas than qubits");
    const std::size_t s = u.qubits() - a;
    if (s > kExplicitCap || u.qubits() > kStatevectorCap)
        throw std::length_error("extract_block: system too large to materialize");
    const Eigen::Index d = Eigen::Index(1) << s;
    ComplexMatrix out(d, d);
    ComplexVector v(Eigen::Index(1) << u.qubits());
    for (Eigen::Index col = 0; col < d; ++col) {
        v.setZero();
        v(col) = 1.0;
        u.run(v);
        out.col(col) = alpha * v.head(d);
    }
    return out;
}

inline ComplexMatrix extract_block(const BlockEncoding& be) { return extract_block(be.circuit, be.ancillas, be.alpha); }

struct VerifyReport {
    double deviation = 0.0;  // spectral norm of M - alpha * block
    double norm_m = 0.0;
    bool alpha_ok = false;   // alpha >= ||M|| - eps
    bool ancilla_ok = false;
    bool deviation_ok = false;
    bool pass = false;
    std::size_t ancillas = 0;
    std::size_t expected_ancillas = 0;
    ResourceTally tally;
};

inline VerifyReport verify_block_encoding(const BlockEncoding& be, const ComplexMatrix& m) {
    VerifyReport r;
    const ComplexMatrix blk = extract_block(be);
    if (blk.rows() != m.rows() || blk.cols() != m.cols())
        throw std::invalid_argument("verify: dimension mismatch");
    const ComplexMatrix diff = m - blk;
    r.deviation = spectral_norm(diff);
    r.norm_m = spectral_norm(m);
    r.alpha_ok = be.alpha >= r.norm_m - be.epsilon_bound - 1e-12;
    r.ancillas = be.ancillas;
    const std::size_t n = std::size_t{1} << (be.system_qubits - (be.hermitian_complement ? 1 : 0));
    r.expected_ancillas = expected_ancillas(be.family, be.model.kind, n, be.dec.terms.size());
    r.ancilla_ok = r.ancillas == r.expected_ancillas;
    r.deviation_ok = r.deviation <= be.epsilon_bound;
    r.tally = be.tally;
    r.pass = r.alpha_ok && r.ancilla_ok && r.deviation_ok;
    return r;
}

/// Encoding of [[0, M], [M^dag, 0]] with the same alpha and ancillas; one extra system qubit
/// placed before the original system register.
inline BlockEncoding complement_to_hermitian(const BlockEncoding& be) {
    const std::size_t a = be.ancillas, s = be.system_qubits;
    const std::size_t c = a;
    std::vector<std::size_t> map = detail::iota_qubits(0, a);
    for (std::size_t q = 0; q < s; ++q) map.push_back(a + 1 + q);
    Circuit fwd(a + s + 1), bwd(a + s + 1);
    fwd.append(be.circuit, map);
    bwd.append(be.circuit.adjoint(), map);
    Circuit out(a + s + 1);
    ComplexMatrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    out.append(fwd.controlled({{c, true}}));
    out.append(bwd.controlled({{c, false}}));
    out.dense({c}, x, 1, "X");
    out.declared_ancillas = a;
    BlockEncoding h = be;
    h.circuit = std::move(out);
    h.system_qubits = s + 1;
    h.tally = h.circuit.tally();
    h.hermitian_complement = true;
    return h;
}

/// Closed-form resource counts; builds no statevector.
struct ResourceEstimate {
    std::size_t n = 0;
    std::size_t queries = 0;
    std::size_t gates = 0;
    std::size_t ancillas = 0;
    std::size_t memory_entries = 0;
    std::size_t dense_memory_entries = 0;  // QRAM over all n^2 entries
    std::size_t L = 1;
    double p0 = 1.0;
};

struct EstimateInputs {
    double chi = 2.0;        // l1 norm of the slot coefficients times 2 * prefactor
    double max_coeff = 1.0;  // largest slot coefficient modulus
    double prefactor = 0.5;
    std::size_t d = 1;       // row sparsity for -like families
    double eps0 = 0.5;
};

namespace detail {

inline std::size_t select_gates(std::size_t n, bool like) {
    LcuDecomposition dec;
    dec.n = n;
    SlotLayout lay;
    lay.n = n;
    lay.kind = like ? SlotLayout::Kind::grid : SlotLayout::Kind::shift_pair;
    return select_u(dec, lay).tally().gates;
}

}  // namespace detail

inline ResourceEstimate resource_estimate(Family f, ModelKind m, std::size_t n, double delta, double eps,
                                          const EstimateInputs& in = {}) {
    if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("resource_estimate: n must be a power of two");
    if (!(delta > 0.0 && delta < 1.0) || !(eps > 0.0)) throw std::invalid_argument("resource_estimate: bad budget");
    const bool like = is_like(f);
    const std::size_t s = ilog2(n);
    const std::size_t d = std::min(n, round_up_pow2(std::max<std::size_t>(in.d, 1)));
    ResourceEstimate r;
    r.n = n;
    r.ancillas = expected_ancillas(f, m, n);
    r.dense_memory_entries = 2 * n * n - 1;
    const std::size_t sel = detail::select_gates(n, like);
    const double l1 = in.chi / (2.0 * in.prefactor);
    if (m == ModelKind::blackbox) {
        const double support = like ? double(n + (n - 1) * d) : double(2 * n);
        r.p0 = std::min(1.0, l1 / (support * in.max_coeff));
        r.L = fixed_point_length(r.p0 / (1.0 + in.eps0), delta);
        // two oracle invocations per steering rotation, two entry calls per slot value
        std::size_t per_u = 4;
        if (like) {
            // position-oracle calls inside the sparse-support start, one per stage-0 use
            const std::size_t r1 = long_plan(std::sqrt(double(d + 1) / double(2 * d))).iterations;
            const std::size_t r2 =
                long_plan(std::sqrt(double(n + (n - 1) * d) / double(n * (d + 1)))).iterations;
            per_u += (2 * r1 + 1) * (2 * r2 + 1);
        }
        r.queries = 2 * r.L * per_u;
        const double eps_p = eps / in.chi;
        const std::size_t b = rotation_bits_for(rotation_precision(eps_p, r.p0 / (1.0 + in.eps0), like ? n * n : 2 * n));
        const std::size_t steer = 4 * b + 2 * cost::adder(b);
        const std::size_t w = like ? 2 * s + 2 : s + 2;
        const std::size_t per_round = 2 * steer + cost::multi_controlled(w) + 1;
        r.gates = 2 * (r.L * steer + (r.L / 2) * per_round) + sel;
        r.memory_entries = 0;
    } else if (m == ModelKind::qram) {
        const double eps_p = eps / in.chi;
        const std::size_t depth = like ? 2 * s : s + 1;
        const std::size_t b = qram_bits(depth, eps_p);
        std::size_t load = 0;
        for (std::size_t lv = 0; lv < depth; ++lv) load += qram_level_gates(lv, b);
        r.gates = 2 * load + sel;
        r.queries = 0;
        if (like) {
            const std::size_t nnz_rows = n + (n - 1) * d;
            r.memory_entries = nnz_rows * (1 + s) + (2 * n - 1);
        } else {
            r.memory_entries = 2 * (2 * n) - 1;
        }
    } else {
        r.gates = sel;
    }
    return r;
}

/// Least-squares slope of log y against log x; pairs with y <= 0 are skipped.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t q = 0; q < x.size(); ++q) {
        if (!(y[q] > 0.0) || !(x[q] > 0.0)) continue;
        const double a = std::log(x[q]), b = std::log(y[q]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
        ++m;
    }
    if (m < 2) return 0.0;
    const double den = double(m) * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (double(m) * sxy - sx * sy) / den;
}

/// Growth exponent in n (y ~ n^p) and polylog degree (y ~ (log2 n)^k) of a count series.
/// tail_power is the exponent over the last two octaves only.
struct GrowthFit {
    double power = 0.0;
    double polylog = 0.0;
    double tail_power = 0.0;
};

inline GrowthFit fit_growth(const std::vector<std::size_t>& ns, const std::vector<double>& y) {
    std::vector<double> x, lx;
    for (auto n : ns) {
        x.push_back(double(n));
        lx.push_back(std::log2(double(n)));
    }
    const std::size_t t = x.size() > 3 ? x.size() - 3 : 0;
    const std::vector<double> xt(x.begin() + long(t), x.end()), yt(y.begin() + long(t), y.end());
    return {loglog_slope(x, y), loglog_slope(lx, y), loglog_slope(xt, yt)};
}

}  // namespace dispenc
