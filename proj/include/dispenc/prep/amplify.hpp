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
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "dispenc/sim/gadgets.hpp"

namespace dispenc {

/// Chebyshev polynomial of the first kind for real order.
inline double chebyshev_t(double order, double x) {
    if (std::abs(x) <= 1.0) return std::cos(order * std::acos(x));
    if (x > 1.0) return std::cosh(order * std::acosh(x));
    // x < -1, integer order only
    return (std::fmod(order, 2.0) == 0.0 ? 1.0 : -1.0) * std::cosh(order * std::acosh(-x));
}

struct PhaseSchedule {
    std::size_t L = 1;
    std::size_t l = 0;
    double delta = 0.0;
    double gamma = 0.0;
    std::vector<double> alpha;  // phases on the start-state reflection
    std::vector<double> beta;   // phases on the target reflection, beta_j = alpha_{l-j+1}
};

/// Fixed-point amplification schedule of length L = 2l + 1.
inline PhaseSchedule fixed_point_phase_schedule(std::size_t l, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("phase schedule: delta must lie in (0,1)");
    if (l < 1) throw std::invalid_argument("phase schedule: l >= 1 required");
    PhaseSchedule s;
    s.l = l;
    s.L = 2 * l + 1;
    s.delta = delta;
    const double L = double(s.L);
    s.gamma = 1.0 / std::cosh(std::acosh(1.0 / delta) / L);
    const double root = std::sqrt(1.0 - s.gamma * s.gamma);
    for (std::size_t j = 1; j <= l; ++j) {
        const double x = root * std::tan(2.0 * std::numbers::pi * double(j) / L);
        // arccot with range (0, pi)
        s.alpha.push_back(-2.0 * (std::numbers::pi / 2.0 - std::atan(x)));
    }
    for (std::size_t j = 1; j <= l; ++j) s.beta.push_back(s.alpha[l - j]);
    return s;
}

/// Closed-form success probability after fixed-point amplification.
inline double fixed_point_success(std::size_t L, double delta, double p0) {
    const double t = chebyshev_t(1.0 / double(L), 1.0 / delta) * std::sqrt(std::max(0.0, 1.0 - p0));
    const double v = chebyshev_t(double(L), t);
    return 1.0 - delta * delta * v * v;
}

/// Smallest odd L with L >= log(2/delta) / sqrt(p_min).
inline std::size_t fixed_point_length(double p_min, double delta) {
    const double need = std::log(2.0 / delta) / std::sqrt(p_min);
    std::size_t L = static_cast<std::size_t>(std::ceil(need - 1e-12));
    if (L < 1) L = 1;
    if (L % 2 == 0) ++L;
    return L;
}

namespace detail {

inline ComplexMatrix phase_on_zero(double phi) {
    ComplexMatrix d = ComplexMatrix::Identity(2, 2);
    d(0, 0) = std::polar(1.0, phi);
    return d;
}

/// Multiplies the all-zero state of `qs` by e^{i phi}.
inline void zero_phase(Circuit& c, const std::vector<std::size_t>& qs, double phi) {
    const cplx ph = std::polar(1.0, phi), back = std::conj(ph);
    c.basis_map(
        qs, [ph](std::uint64_t v) { return BasisImage{v, v == 0 ? ph : cplx(1.0)}; },
        [back](std::uint64_t v) { return BasisImage{v, v == 0 ? back : cplx(1.0)}; },
        ResourceTally{0, cost::multi_controlled(qs.size()), 0}, "S0");
}

inline void global_phase(Circuit& c, std::size_t q, cplx ph) {
    ComplexMatrix d = ph * ComplexMatrix::Identity(2, 2);
    c.dense({q}, d, 0, "phase");
}

}  // namespace detail

/// -U S_0(alpha_j) U^dag S_t(beta_j) applied l times after U. Good means flag = 0.
inline Circuit fixed_point_amplify(const Circuit& u, std::size_t flag, const PhaseSchedule& sched) {
    Circuit c(u.qubits());
    c.declared_ancillas = u.declared_ancillas;
    const auto all = detail::iota_qubits(0, u.qubits());
    const Circuit ud = u.adjoint();
    c.append(u);
    for (std::size_t j = 0; j < sched.l; ++j) {
        c.dense({flag}, detail::phase_on_zero(sched.beta[j]), 1, "St");
        c.append(ud);
        detail::zero_phase(c, all, sched.alpha[j]);
        c.append(u);
        detail::global_phase(c, flag, -1.0);
    }
    return c;
}

/// Zero-failure amplification for a known good amplitude a = sin(beta).
struct LongPlan {
    std::size_t iterations = 0;
    double phi = 0.0;
};

inline LongPlan long_plan(double amplitude) {
    if (!(amplitude > 0.0)) throw std::invalid_argument("long_aa: zero good amplitude");
    if (amplitude >= 1.0 - 1e-15) return {};
    const double b = std::asin(std::min(1.0, amplitude));
    const std::size_t J = static_cast<std::size_t>(std::floor((std::numbers::pi / 2.0 - b) / (2.0 * b)));
    LongPlan p;
    p.iterations = J + 1;
    p.phi = 2.0 * std::asin(std::sin(std::numbers::pi / (4.0 * double(J) + 6.0)) / std::sin(b));
    return p;
}

/// Circuit form: -U S_0(phi) U^dag S_good(phi), repeated after U.
/// mark_good adds a phase e^{i phi} on the good subspace.
inline Circuit long_amplify(const Circuit& u, double amplitude,
                            const std::function<void(Circuit&, double)>& mark_good) {
    const LongPlan p = long_plan(amplitude);
    Circuit c(u.qubits());
    c.declared_ancillas = u.declared_ancillas;
    const auto all = detail::iota_qubits(0, u.qubits());
    const Circuit ud = u.adjoint();
    c.append(u);
    for (std::size_t r = 0; r < p.iterations; ++r) {
        mark_good(c, p.phi);
        c.append(ud);
        detail::zero_phase(c, all, p.phi);
        c.append(u);
        detail::global_phase(c, 0, -1.0);
    }
    return c;
}

/// State form: amplifies the component of `state` selected by `good`.
inline QState long_aa(const QState& state, const std::function<bool(std::uint64_t)>& good, double amplitude) {
    const LongPlan p = long_plan(amplitude);
    const ComplexVector psi = state.amps();
    ComplexVector v = psi;
    const cplx e = std::polar(1.0, p.phi) - 1.0;
    for (std::size_t r = 0; r < p.iterations; ++r) {
        for (Eigen::Index q = 0; q < v.size(); ++q)
            if (good(static_cast<std::uint64_t>(q))) v(q) *= std::polar(1.0, p.phi);
        const cplx ov = psi.dot(v);  // <psi|v>
        v += e * ov * psi;
        v = -v;
    }
    return QState(state.qubits(), v / v.norm());
}

inline double good_probability(const ComplexVector& v, const std::function<bool(std::uint64_t)>& good) {
    double p = 0.0;
    for (Eigen::Index q = 0; q < v.size(); ++q)
        if (good(static_cast<std::uint64_t>(q))) p += std::norm(v(q));
    return p;
}

/// Probability that `flag` reads 0 after running u on |0...0>.
inline double flag_zero_probability(const Circuit& u, std::size_t flag) {
    ComplexVector v = ComplexVector::Zero(Eigen::Index(1) << u.qubits());
    v(0) = 1.0;
    u.run(v);
    const std::uint64_t mask = std::uint64_t{1} << (u.qubits() - 1 - flag);
    return good_probability(v, [mask](std::uint64_t q) { return (q & mask) == 0; });
}

struct AmplitudeEstimate {
    double estimate = 0.0;     // P'_0
    double lower_bound = 0.0;  // P'_0 / (1 + eps0)
    std::size_t m = 0;         // final number of phase-estimation grid points
    std::size_t prep_uses = 0; // applications of the preparation unitary
    bool zero_flag = false;
};

namespace detail {

/// Phase-estimation readout distribution for amplitude a on an M-point grid.
inline std::vector<double> ae_distribution(double a, std::size_t M) {
    const double theta = std::asin(std::sqrt(std::clamp(a, 0.0, 1.0)));
    const double c = double(M) * theta / std::numbers::pi;
    auto F = [M](double d) {
        const double s = std::sin(std::numbers::pi * d / double(M));
        if (std::abs(s) < 1e-15) return 1.0;
        const double num = std::sin(std::numbers::pi * d);
        return (num * num) / (double(M) * double(M) * s * s);
    };
    std::vector<double> p(M);
    double tot = 0.0;
    for (std::size_t y = 0; y < M; ++y) {
        p[y] = 0.5 * F(double(y) - c) + 0.5 * F(double(y) + c);
        tot += p[y];
    }
    for (auto& x : p) x /= tot;
    return p;
}

}  // namespace detail

/// Simulated amplitude estimation with an adaptively doubled grid and median-of-3 readout.
/// The exact good probability `a` comes from the statevector; only the readout is sampled.
inline AmplitudeEstimate amplitude_estimate_value(double a, double eps0, std::mt19937_64& rng,
                                                  std::size_t max_m = std::size_t{1} << 20) {
    if (!(eps0 > 0.0)) throw std::invalid_argument("amplitude_estimate: eps0 must be positive");
    AmplitudeEstimate out;
    std::size_t M = 4;
    while (true) {
        const auto dist = detail::ae_distribution(a, M);
        std::discrete_distribution<std::size_t> pick(dist.begin(), dist.end());
        double est[3];
        for (double& e : est) {
            const double s = std::sin(std::numbers::pi * double(pick(rng)) / double(M));
            e = s * s;
        }
        std::sort(est, est + 3);
        out.estimate = est[1];
        out.m = M;
        out.prep_uses += 3 * (2 * M - 1);
        const double bound = 2.0 * std::numbers::pi * std::sqrt(out.estimate * (1.0 - out.estimate)) / double(M) +
                             std::pow(std::numbers::pi / double(M), 2);
        if (out.estimate > 0.0 && bound <= eps0 * out.estimate / 2.0) break;
        if (M >= max_m) break;
        M *= 2;
    }
    if (out.estimate <= 0.0) {
        out.estimate = 0.0;
        out.zero_flag = true;
    }
    out.lower_bound = out.estimate / (1.0 + eps0);
    return out;
}

inline AmplitudeEstimate amplitude_estimate(const Circuit& prep, std::size_t flag, double eps0,
                                            std::mt19937_64& rng) {
    return amplitude_estimate_value(flag_zero_probability(prep, flag), eps0, rng);
}

}  // namespace dispenc
