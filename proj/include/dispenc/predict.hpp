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
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dispenc/solver.hpp"

namespace dispenc {

/// Budget used by the stochastic quantum route at a target epsilon.
struct RouteBudget {
    double kappa = 1.0;
    double delta = 0.0;
    double eps_p = 0.0;
};

/// delta from the solver budget (kappa floored just above 2) and eps_p = eps / (2 chi).
inline RouteBudget route_budget(const ComplexMatrix& m, double chi, double eps) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& sv = svd.singularValues();
    RouteBudget b;
    b.kappa = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(b.kappa <= kKappaCap)) throw std::domain_error("route budget: condition number above cap");
    b.delta = error_budget(std::max(b.kappa, 2.0 + 1e-9), eps);
    b.eps_p = eps / (2.0 * chi);
    return b;
}

struct StructuredSolve {
    SolveReport report;
    VerifyReport verify;
    RouteBudget budget;
    bool complemented = false;
    double alpha = 0.0;
    std::size_t ancillas = 0;
};

/// Quantum route for M x = b: encode, complement when M is not Hermitian, then solve
/// on the extracted block. With exact_prep off, delta and eps_p follow the budget for eps.
inline StructuredSolve solve_structured(const StructuredMatrix& s, const ComplexVector& b, AccessModel model,
                                        double eps) {
    const ComplexMatrix m = build_structured(s);
    if (b.size() != m.rows()) throw std::invalid_argument("solve: right-hand side length mismatch");
    StructuredSolve out;
    if (!model.exact_prep) {
        const double chi = 2.0 * chi_scaling(lcu_decompose_structured(s));
        out.budget = route_budget(m, chi, eps);
        if (model.kind == ModelKind::blackbox) model.delta = out.budget.delta;
        model.eps_p = out.budget.eps_p;
    }
    BlockEncoding be = encode(s, model);
    out.verify = verify_block_encoding(be, m);
    out.alpha = be.alpha;
    out.ancillas = be.ancillas;
    const bool hermitian = (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
    const ComplexVector exact_inv_rhs = m.fullPivLu().solve(b);
    if (hermitian) {
        out.report = solve_reference(be, b);
    } else {
        out.complemented = true;
        const BlockEncoding h = complement_to_hermitian(be);
        ComplexVector bb = ComplexVector::Zero(2 * b.size());
        bb.head(b.size()) = b;
        SolveReport r = solve_reference(h, bb);
        ComplexVector x = r.solution.tail(b.size());
        r.solution = x / x.norm();
        out.report = r;
    }
    const ComplexVector y = exact_inv_rhs / exact_inv_rhs.norm();
    out.report.fidelity = std::norm(out.report.solution.dot(y));
    out.report.delta = be.model.delta;
    auto [state, p] = apply_and_postselect(be, QState::from_vector(b));
    (void)state;
    out.report.success_prob = p;
    return out;
}

/// Linear-prediction task on a stationary process.
struct PredictionTask {
    std::size_t n = 8;
    std::optional<double> ar_a;       // AR(1) coefficient
    double ar_sigma2 = 1.0;           // AR(1) innovation variance
    std::vector<cplx> r;              // explicit r(0..n) when no AR(1) model is given
    std::vector<cplx> past;           // u(i-1), ..., u(i-n)
    std::size_t shots = 100000;
    double rho = 0.0;                 // Wiener-class tail bound; 0 picks a default
};

struct PredictConfig {
    std::uint64_t seed = 7;
    double eps = 1e-3;
    bool exact_prep = false;
    ModelKind model = ModelKind::blackbox;
};

struct PredictionReport {
    std::vector<cplx> r;  // r(0..n)
    ComplexVector w_classical;
    ComplexVector w_quantum;
    double route_fidelity = 1.0;
    cplx u_hat_exact = 0.0;
    cplx u_hat_estimate = 0.0;
    cplx inner_exact = 0.0;     // <w|u> of the normalized vectors
    cplx inner_estimate = 0.0;
    double kappa = 1.0;
    GeneratingBounds spectrum;
    WienerCheck wiener;
    double autocov_selftest_error = 0.0;
    double block_deviation = 0.0;
    double epsilon_bound = 0.0;
    double delta = 0.0;
    double eps_p = 0.0;
    std::vector<std::string> warnings;
};

/// r(k) = sigma^2 a^k / (1 - a^2).
inline std::vector<cplx> ar1_autocovariance(double a, double sigma2, std::size_t upto) {
    if (!(std::abs(a) < 1.0)) throw std::invalid_argument("AR(1): |a| < 1 required");
    std::vector<cplx> r(upto + 1);
    for (std::size_t k = 0; k <= upto; ++k) r[k] = sigma2 * std::pow(a, double(k)) / (1.0 - a * a);
    return r;
}

/// sigma^2 / |1 - a e^{i lambda}|^2.
inline double ar1_spectral_density(double a, double sigma2, double lambda) {
    return sigma2 / std::norm(1.0 - a * std::polar(1.0, lambda));
}

/// Toeplitz R with R(i,k) = r(k-i) above the diagonal and conj(r(i-k)) below.
inline StructuredMatrix covariance_toeplitz(const std::vector<cplx>& r, std::size_t n) {
    std::vector<cplx> seq(2 * n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        seq[n - 1 - k] = r[k];
        seq[n - 1 + k] = std::conj(r[k]);
    }
    seq[n - 1] = r[0].real();
    return StructuredMatrix::toeplitz(seq);
}

inline PredictionReport predict(const PredictionTask& task, const PredictConfig& cfg) {
    const std::size_t n = task.n;
    if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("predict: n must be a power of two >= 2");
    PredictionReport rep;
    if (task.ar_a) {
        rep.r = ar1_autocovariance(*task.ar_a, task.ar_sigma2, n);
    } else {
        if (task.r.size() != n + 1) throw std::invalid_argument("predict: r(0..n) required");
        rep.r = task.r;
    }
    if (!(rep.r[0].real() > 0.0)) throw std::invalid_argument("predict: r(0) must be positive");
    if (!task.past.empty() && task.past.size() != n) throw std::invalid_argument("predict: n past samples required");

    const StructuredMatrix spec = covariance_toeplitz(rep.r, n);
    const ComplexMatrix R = build_structured(spec);
    Eigen::LLT<ComplexMatrix> llt(R);
    if (llt.info() != Eigen::Success) throw infeasible_error("predict: R is not positive definite");
    ComplexVector rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs(k) = std::conj(rep.r[k + 1]);

    // spectrum and Wiener-class diagnostics
    const std::size_t m = std::max<std::size_t>(1024, 128 * n);
    std::vector<double> f;
    if (task.ar_a) {
        const double a = *task.ar_a, s2 = task.ar_sigma2;
        f = sample_on_circle([=](double l) { return ar1_spectral_density(a, s2, l); }, m);
        double err = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            cplx acc = 0.0;
            for (std::size_t q = 0; q < m; ++q) acc += f[q] * std::polar(1.0, 2.0 * std::numbers::pi * double(k * q) / double(m));
            err = std::max(err, std::abs(acc / double(m) - rep.r[k]));
        }
        rep.autocov_selftest_error = err;
    } else {
        const auto r = rep.r;
        f = sample_on_circle(
            [&](double l) {
                double acc = r[0].real();
                for (std::size_t k = 1; k < n; ++k) acc += 2.0 * (r[k] * std::polar(1.0, -double(k) * l)).real();
                return acc;
            },
            m);
    }
    rep.spectrum = generating_fn_bounds(f);
    double tail = 0.0;
    for (const auto& z : spec.seq) tail += std::abs(z);
    double rho = task.rho;
    if (rho <= 0.0) rho = task.ar_a ? task.ar_sigma2 / std::pow(1.0 - std::abs(*task.ar_a), 2) + 1e-12 : 2.0 * tail;
    rep.wiener = wiener_class_check(spec.seq, rho);
    if (!rep.wiener.in_class) rep.warnings.push_back("autocovariance sum exceeds the declared Wiener-class bound");

    rep.w_classical = llt.solve(rhs);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(R);
    rep.kappa = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();

    if (rhs.norm() == 0.0) {
        rep.w_quantum = ComplexVector::Zero(n);
        rep.route_fidelity = 1.0;
    } else {
        AccessModel model;
        model.kind = cfg.model;
        model.exact_prep = cfg.exact_prep;
        model.seed = cfg.seed;
        const double chi = 2.0 * chi_scaling(lcu_decompose_structured(spec));
        if (!cfg.exact_prep) {
            const RouteBudget b = route_budget(R, chi, cfg.eps);
            model.delta = b.delta;
            model.eps_p = b.eps_p;
        }
        const BlockEncoding be = encode(spec, model);
        rep.delta = be.model.delta;
        rep.eps_p = be.model.eps_p;
        rep.epsilon_bound = be.epsilon_bound;
        const ComplexMatrix blk = extract_block(be);
        rep.block_deviation = spectral_norm(R - blk);
        const SolveReport sr = solve_reference(be, rhs);
        const ComplexVector rx = blk * sr.solution;
        const cplx scale = rx.dot(rhs) / rx.squaredNorm();
        rep.w_quantum = sr.solution * scale;
        rep.route_fidelity =
            std::norm(sr.solution.dot(rep.w_classical / rep.w_classical.norm()));
    }

    if (!task.past.empty()) {
        ComplexVector u(n);
        for (std::size_t k = 0; k < n; ++k) u(k) = task.past[k];
        rep.u_hat_exact = rep.w_classical.dot(u);
        const double wn = rep.w_quantum.norm(), un = u.norm();
        if (wn > 0.0 && un > 0.0) {
            const QState ws = QState::from_vector(rep.w_quantum), us = QState::from_vector(u);
            rep.inner_exact = ws.amps().dot(us.amps());
            std::mt19937_64 rng(cfg.seed);
            rep.inner_estimate = hadamard_test_inner(ws, us, task.shots, rng).value;
            rep.u_hat_estimate = wn * un * rep.inner_estimate;
        }
    }
    return rep;
}

}  // namespace dispenc
