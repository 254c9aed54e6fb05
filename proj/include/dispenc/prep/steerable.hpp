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
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dispenc/prep/amplify.hpp"

namespace dispenc {

/// sqrt(r) e^{i theta/2} with theta in (-pi, pi]; negative reals give +i sqrt(r).
inline cplx principal_sqrt(cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) return 0.0;
    double th = std::atan2(z.imag(), z.real());
    if (z.imag() == 0.0 && z.real() < 0.0) th = std::numbers::pi;
    return std::polar(std::sqrt(r), th / 2.0);
}

/// Root loaded by the conjugate preparation, chosen so that
/// conj(conjugate_root(z)) * principal_sqrt(z) == z on every branch.
inline cplx conjugate_root(cplx z) { return std::conj(principal_sqrt(z)); }

enum class RootBranch { principal, conjugate };

/// Black-box access to x_i. `calls_per_query` counts elementary entry-oracle
/// calls spent per invocation (2 for slot values built from two matrix entries).
class AmplitudeOracle {
  public:
    AmplitudeOracle(std::size_t size, std::function<cplx(std::size_t)> value, double max_abs,
                    std::size_t bits = 52, std::size_t calls_per_query = 1)
        : size_(size), value_(std::move(value)), max_abs_(max_abs), bits_(bits), calls_(calls_per_query) {
        if (!is_power_of_two(size_)) throw std::invalid_argument("oracle: domain size must be a power of two");
        if (!(max_abs_ > 0.0)) throw std::invalid_argument("oracle: max |x| must be positive");
    }

    static AmplitudeOracle table(std::vector<cplx> values, std::size_t bits = 52) {
        double mx = 0.0;
        for (const auto& z : values) mx = std::max(mx, std::abs(z));
        if (mx == 0.0) throw std::invalid_argument("oracle: all-zero vector");
        auto shared = std::make_shared<std::vector<cplx>>(std::move(values));
        const std::size_t n = shared->size();
        return AmplitudeOracle(n, [shared](std::size_t i) { return (*shared)[i]; }, mx, bits);
    }

    std::size_t size() const { return size_; }
    double max_abs() const { return max_abs_; }
    std::size_t bits() const { return bits_; }
    std::size_t calls_per_query() const { return calls_; }
    std::size_t queries() const { return queries_; }

    /// One (superposed) invocation: returns every value and charges the counter once.
    std::vector<cplx> invoke() {
        queries_ += calls_;
        std::vector<cplx> out(size_);
        for (std::size_t i = 0; i < size_; ++i) {
            out[i] = value_(i);
            if (std::abs(out[i]) > max_abs_ * (1.0 + 1e-12))
                throw std::invalid_argument("oracle: value exceeds declared max |x|");
        }
        return out;
    }

    /// Values without charging, for oracles in tests and reports.
    std::vector<cplx> peek() const {
        std::vector<cplx> out(size_);
        for (std::size_t i = 0; i < size_; ++i) out[i] = value_(i);
        return out;
    }

  private:
    std::size_t size_;
    std::function<cplx(std::size_t)> value_;
    double max_abs_;
    std::size_t bits_;
    std::size_t calls_;
    std::size_t queries_ = 0;
};

struct PrepReport {
    double fidelity = 1.0;
    double p0 = 0.0;           // exact start success probability
    double p0_estimate = 0.0;  // amplitude-estimation readout P'_0
    double p_min = 0.0;        // P'_0 / (1 + eps0)
    double p_final = 0.0;      // success probability after amplification
    std::size_t L = 1;
    std::size_t rounds = 0;
    std::size_t rotation_bits = 0;  // 0 means exact rotations
    std::size_t queries = 0;        // entry-oracle calls in the circuit
    std::size_t ae_queries = 0;     // entry-oracle calls spent on amplitude estimation
    std::size_t gates = 0;
    bool ae_zero_flag = false;
    double junk_norm = 0.0;  // sqrt(1 - p_final); the junk state itself is treated as arbitrary
};

/// Required rotation precision and the bit width that achieves it.
inline double rotation_precision(double eps_p, double p0, std::size_t n) {
    return eps_p * std::sqrt(p0) / (2.0 * std::sqrt(double(n)));
}
inline std::size_t rotation_bits_for(double eps_r) {
    return static_cast<std::size_t>(std::ceil(std::log2(2.0 * std::numbers::pi / eps_r)));
}

namespace detail {

inline double quantize(double x, std::size_t bits) {
    const double step = 2.0 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(bits));
    return std::round(x / step) * step;
}

/// [[a, -conj b], [b, conj a]] with |a|^2 + |b|^2 = 1, a = cos(t) e^{i phi}.
inline Eigen::Matrix2cd steering_block(cplx a, std::size_t bits) {
    double t = std::acos(std::clamp(std::abs(a), 0.0, 1.0));
    double ph = std::abs(a) > 0.0 ? std::arg(a) : 0.0;
    if (bits > 0) {
        t = quantize(t, bits);
        ph = quantize(ph, bits);
    }
    const cplx aa = std::polar(std::cos(t), ph);
    const cplx bb = std::sin(t);
    Eigen::Matrix2cd m;
    m << aa, -std::conj(bb), bb, std::conj(aa);
    return m;
}

}  // namespace detail

/// Rotation of `flag` by a_i = root(x_i) / sqrt(max|x|), selected by the index register.
/// bits = 0 gives exact rotations. Charged as one oracle invocation, a rotation and
/// an uncomputing invocation.
inline void steering_rotation(Circuit& c, const std::vector<std::size_t>& index, std::size_t flag,
                              AmplitudeOracle& oracle, RootBranch branch, std::size_t bits) {
    if ((std::size_t{1} << index.size()) != oracle.size())
        throw std::invalid_argument("steering: index register does not match oracle domain");
    const auto vals = oracle.invoke();
    oracle.invoke();  // uncompute of the value register
    const double scale = 1.0 / std::sqrt(oracle.max_abs());
    std::vector<Eigen::Matrix2cd> blocks;
    blocks.reserve(vals.size());
    for (const auto& x : vals) {
        const cplx r = branch == RootBranch::principal ? principal_sqrt(x) : conjugate_root(x);
        blocks.push_back(detail::steering_block(r * scale, bits));
    }
    const std::size_t b = bits ? bits : 52;
    ResourceTally t{2 * oracle.calls_per_query(), 4 * b + 2 * cost::adder(b), 0};
    c.uniform(index, flag, std::move(blocks), t, "steer");
}

/// Uniform start: Hadamards on the index register.
inline Circuit hadamard_layer(std::size_t m, const std::vector<std::size_t>& qs) {
    ComplexMatrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    Circuit c(m);
    for (auto q : qs) c.dense({q}, h, 1, "H");
    return c;
}

struct SteerableOptions {
    double delta = 0.1;
    double eps_p = 1e-3;
    bool exact_rotation = true;
    double eps0 = 0.5;
    std::uint64_t seed = 7;
};

/// Start unitary W followed by the steering rotation, then fixed-point amplification.
struct SteerablePlan {
    Circuit circuit;
    std::size_t flag = 0;
    PrepReport report;
    std::optional<PhaseSchedule> schedule;
};

/// Builds the amplified preparation. W acts on all `m` qubits and must leave `flag` in |0>.
/// If `forced` is given it is used instead of estimating P_0, so two preparations can
/// share one schedule.
inline SteerablePlan steerable_circuit(const Circuit& w, const std::vector<std::size_t>& index, std::size_t flag,
                                       AmplitudeOracle& oracle, RootBranch branch, const SteerableOptions& opt,
                                       std::mt19937_64& rng,
                                       std::optional<std::pair<std::optional<PhaseSchedule>, std::size_t>> forced =
                                           std::nullopt) {
    if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw std::invalid_argument("steerable: delta must lie in (0,1)");
    if (!(opt.eps_p > 0.0 && opt.eps_p < 1.0)) throw std::invalid_argument("steerable: eps_p must lie in (0,1)");
    SteerablePlan plan;
    plan.flag = flag;
    const std::size_t q0 = oracle.queries();

    Circuit exact(w.qubits());
    exact.append(w);
    steering_rotation(exact, index, flag, oracle, branch, 0);
    const std::size_t per_u = oracle.queries() - q0;
    plan.report.p0 = flag_zero_probability(exact, flag);

    std::size_t bits = 0;
    if (forced) {
        plan.schedule = forced->first;
        bits = forced->second;
    } else {
        const auto ae = amplitude_estimate_value(plan.report.p0, opt.eps0, rng);
        plan.report.p0_estimate = ae.estimate;
        plan.report.p_min = ae.lower_bound;
        plan.report.ae_zero_flag = ae.zero_flag;
        plan.report.ae_queries = ae.prep_uses * per_u;
        if (ae.zero_flag) throw std::invalid_argument("steerable: zero good amplitude");
        bool skip = false;
        if (ae.estimate >= 1.0) {
            // Certify P_0 >= 1 - delta^2 before skipping amplification.
            std::size_t M = 4;
            while (M < std::size_t(std::ceil(std::numbers::pi / opt.delta))) M *= 2;
            const auto dist = detail::ae_distribution(plan.report.p0, M);
            std::discrete_distribution<std::size_t> pick(dist.begin(), dist.end());
            const double s = std::sin(std::numbers::pi * double(pick(rng)) / double(M));
            plan.report.ae_queries += (2 * M - 1) * per_u;
            skip = s * s >= 1.0;
        }
        if (!skip) {
            const std::size_t L = fixed_point_length(ae.lower_bound, opt.delta);
            if (L > 1) plan.schedule = fixed_point_phase_schedule((L - 1) / 2, opt.delta);
        }
        if (!opt.exact_rotation) {
            const double eps_r = rotation_precision(opt.eps_p, ae.lower_bound, oracle.size());
            bits = rotation_bits_for(eps_r);
            if (oracle.bits() < bits) throw std::invalid_argument("steerable: oracle width too small");
        }
    }
    plan.report.rotation_bits = bits;

    Circuit u(w.qubits());
    u.append(w);
    steering_rotation(u, index, flag, oracle, branch, bits);
    if (plan.schedule) {
        plan.circuit = fixed_point_amplify(u, flag, *plan.schedule);
        plan.report.L = plan.schedule->L;
        plan.report.rounds = plan.schedule->l;
    } else {
        plan.circuit = u;
    }
    plan.circuit.declared_ancillas = u.declared_ancillas;
    const auto t = plan.circuit.tally();
    plan.report.queries = t.queries;
    plan.report.gates = t.gates;
    plan.report.p_final = flag_zero_probability(plan.circuit, flag);
    plan.report.junk_norm = std::sqrt(std::max(0.0, 1.0 - plan.report.p_final));
    return plan;
}

/// Exact target sum_i root(x_i) |i> / sqrt(||x||_1).
inline ComplexVector root_state(const std::vector<cplx>& x, RootBranch branch = RootBranch::principal) {
    ComplexVector v(x.size());
    double l1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        v(i) = branch == RootBranch::principal ? principal_sqrt(x[i]) : conjugate_root(x[i]);
        l1 += std::abs(x[i]);
    }
    if (l1 == 0.0) throw std::invalid_argument("root_state: all-zero vector");
    return v / std::sqrt(l1);
}

/// |<a|b>|^2 for unit vectors.
inline double state_fidelity(const ComplexVector& a, const ComplexVector& b) { return std::norm(a.dot(b)); }

/// Fixes the global phase so the first nonzero amplitude is real and nonnegative.
inline ComplexVector canonical_phase(const ComplexVector& v) {
    for (Eigen::Index q = 0; q < v.size(); ++q)
        if (std::abs(v(q)) > 1e-12) return v * std::polar(1.0, -std::arg(v(q)));
    return v;
}

struct SteerableResult {
    QState state;  // success-branch state on the index register
    PrepReport report;
};

/// Prepares sum_i sqrt(x_i)|i>/sqrt(||x||_1) on log n qubits from a uniform start.
inline SteerableResult steerable_prep(AmplitudeOracle& oracle, std::size_t n, double delta, double eps_p,
                                      std::uint64_t seed = 7, bool exact_rotation = true) {
    if (!is_power_of_two(n) || oracle.size() != n) throw std::invalid_argument("steerable_prep: bad dimension");
    const std::size_t s = ilog2(n);
    const auto idx = detail::iota_qubits(0, s);
    const Circuit w = hadamard_layer(s + 1, idx);
    std::mt19937_64 rng(seed);
    SteerableOptions opt;
    opt.delta = delta;
    opt.eps_p = eps_p;
    opt.exact_rotation = exact_rotation;
    opt.seed = seed;
    auto plan = steerable_circuit(w, idx, s, oracle, RootBranch::principal, opt, rng);
    ComplexVector v = ComplexVector::Zero(Eigen::Index(1) << (s + 1));
    v(0) = 1.0;
    plan.circuit.run(v);
    ComplexVector good(n);
    for (std::size_t i = 0; i < n; ++i) good(i) = v(Eigen::Index(i) << 1);
    good /= good.norm();
    plan.report.fidelity = state_fidelity(root_state(oracle.peek()), good);
    return {QState(s, canonical_phase(good)), plan.report};
}

}  // namespace dispenc
