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
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dispenc/blockenc.hpp"

namespace dispenc {

inline constexpr double kKappaCap = 1e8;

struct SolveReport {
    ComplexVector solution;  // normalized
    double kappa = 1.0;
    double success_prob = 0.0;
    double fidelity = 0.0;  // against the dense oracle when one is given
    double delta = 0.0;
    ResourceTally tally;
};

/// Runs U on |0>^a|b> and keeps the ancilla-zero branch.
inline std::pair<QState, double> apply_and_postselect(const BlockEncoding& be, const QState& b) {
    if (b.qubits() != be.system_qubits) throw std::invalid_argument("apply_and_postselect: dimension mismatch");
    const Eigen::Index d = Eigen::Index(1) << be.system_qubits;
    ComplexVector v = ComplexVector::Zero(Eigen::Index(1) << be.circuit.qubits());
    v.head(d) = b.amps();
    be.circuit.run(v);
    const ComplexVector kept = v.head(d);
    const double p = kept.squaredNorm();
    if (p <= 1e-300) throw std::domain_error("apply_and_postselect: zero postselection probability");
    return {QState(be.system_qubits, kept / std::sqrt(p)), p};
}

/// Normalized H^{-1} b from the extracted (Hermitian) block.
inline SolveReport solve_reference(const BlockEncoding& be, const ComplexVector& b, const ComplexMatrix* oracle = nullptr,
                                   double kappa_cap = kKappaCap) {
    const ComplexMatrix h = extract_block(be);
    if (b.size() != h.rows()) throw std::invalid_argument("solve_reference: dimension mismatch");
    if (b.norm() == 0.0) throw std::invalid_argument("solve_reference: zero right-hand side");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    // An encoding within epsilon_bound of a Hermitian matrix may be off by up to twice that.
    const double tol = std::max(1e-8 * scale, 2.0 * be.epsilon_bound);
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("solve_reference: block is not Hermitian; complement it first");
    const ComplexMatrix hp = 0.5 * (h + h.adjoint());
    Eigen::JacobiSVD<ComplexMatrix> svd(hp, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    SolveReport r;
    r.kappa = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(r.kappa <= kappa_cap)) throw std::domain_error("solve_reference: condition number above cap");
    const ComplexVector x = svd.solve(b);
    r.solution = x / x.norm();
    r.tally = be.tally;
    r.delta = be.model.delta;
    if (oracle) {
        const ComplexVector y = oracle->fullPivLu().solve(b);
        r.fidelity = std::norm(r.solution.dot(y / y.norm()));
    }
    return r;
}

/// delta = eps / (kappa^2 ln^3(kappa/eps)).
inline double error_budget(double kappa, double eps) {
    if (!(kappa > 2.0)) throw std::invalid_argument("error_budget: kappa must exceed 2");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("error_budget: eps must lie in (0,1)");
    const double l = std::log(kappa / eps);
    return eps / (kappa * kappa * l * l * l);
}

struct WienerCheck {
    bool in_class = false;
    double abs_sum = 0.0;
    double chi = 0.0;
    bool chi_bound_ok = false;  // chi < 2 rho
};

/// t_seq holds t_{-(n-1)}..t_{n-1}.
inline WienerCheck wiener_class_check(const std::vector<cplx>& t_seq, double rho) {
    WienerCheck w;
    for (const auto& z : t_seq) w.abs_sum += std::abs(z);
    w.in_class = w.abs_sum < rho;
    w.chi = lcu_decompose_structured(StructuredMatrix::toeplitz(t_seq)).chi();
    w.chi_bound_ok = w.chi < 2.0 * rho;
    return w;
}

struct GeneratingBounds {
    double f_min = 0.0;
    double f_max = 0.0;
    double kappa_bound = 0.0;
    bool unbounded = false;
};

inline GeneratingBounds generating_fn_bounds(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("generating_fn_bounds: no samples");
    GeneratingBounds g;
    g.f_min = *std::min_element(samples.begin(), samples.end());
    g.f_max = *std::max_element(samples.begin(), samples.end());
    if (g.f_min <= 0.0) {
        g.unbounded = true;
        g.kappa_bound = std::numeric_limits<double>::infinity();
    } else {
        g.kappa_bound = g.f_max / g.f_min;
    }
    return g;
}

/// Evaluates f on m equispaced points of [0, 2pi).
template <class F>
std::vector<double> sample_on_circle(F f, std::size_t m) {
    std::vector<double> out(m);
    for (std::size_t q = 0; q < m; ++q) out[q] = f(2.0 * std::numbers::pi * double(q) / double(m));
    return out;
}

struct InnerEstimate {
    cplx value;
    double p_real = 0.0;  // ancilla-zero probability, real-part circuit
    double p_imag = 0.0;  // ancilla-zero probability, S^dag circuit
};

namespace detail {

/// Ancilla-zero probability of H . P . (|0>|u> + |1>|w>)/sqrt 2, P a phase on ancilla |1>.
inline double hadamard_zero_probability(const ComplexVector& u, const ComplexVector& w, cplx phase) {
    const std::size_t s = ilog2(static_cast<std::size_t>(u.size()));
    Circuit c(s + 1);
    ComplexMatrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    ComplexMatrix p = ComplexMatrix::Identity(2, 2);
    p(1, 1) = phase;
    c.dense({0}, p, 1, "phase");
    c.dense({0}, h, 1, "H");
    ComplexVector v(2 * u.size());
    v << u, w;
    v /= std::sqrt(2.0);
    c.run(v);
    return v.head(u.size()).squaredNorm();
}

}  // namespace detail

/// Hadamard-test estimate of <u|w> from `shots` samples per component.
inline InnerEstimate hadamard_test_inner(const QState& u, const QState& w, std::size_t shots, std::mt19937_64& rng) {
    if (u.qubits() != w.qubits()) throw std::invalid_argument("hadamard_test: dimension mismatch");
    if (shots < 1) throw std::invalid_argument("hadamard_test: shots must be positive");
    InnerEstimate e;
    e.p_real = detail::hadamard_zero_probability(u.amps(), w.amps(), 1.0);
    e.p_imag = detail::hadamard_zero_probability(u.amps(), w.amps(), cplx(0.0, -1.0));
    std::binomial_distribution<std::size_t> br(shots, std::clamp(e.p_real, 0.0, 1.0));
    std::binomial_distribution<std::size_t> bi(shots, std::clamp(e.p_imag, 0.0, 1.0));
    const double re = 2.0 * double(br(rng)) / double(shots) - 1.0;
    const double im = 2.0 * double(bi(rng)) / double(shots) - 1.0;
    e.value = cplx(re, im);
    return e;
}

}  // namespace dispenc
