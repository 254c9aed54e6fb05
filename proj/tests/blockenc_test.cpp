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

#include <gtest/gtest.h>

#include "dispenc/blockenc.hpp"
#include "test_util.hpp"

using namespace dispenc;
using dispenc::testing::rand_c;
using dispenc::testing::rand_seq;

namespace {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return dispenc::testing::max_abs(a - b); }

StructuredMatrix random_spec(Family f, std::size_t n, std::mt19937_64& rng) {
    switch (f) {
    case Family::toeplitz: return StructuredMatrix::toeplitz(rand_seq(rng, 2 * n - 1));
    case Family::circulant: return StructuredMatrix::circulant(rand_seq(rng, n));
    case Family::hankel: return StructuredMatrix::hankel(rand_seq(rng, 2 * n - 1));
    case Family::banded_toeplitz: return StructuredMatrix::banded(n, 1, rand_seq(rng, 3));
    case Family::toeplitz_like:
        return StructuredMatrix::toeplitz_like(rand_seq(rng, 2 * n - 1), {{1, 2 % n, rand_c(rng)}, {n - 1, 0, rand_c(rng)}});
    case Family::hankel_like:
        return StructuredMatrix::hankel_like(rand_seq(rng, 2 * n - 1), {{0, 1, rand_c(rng)}, {n / 2, n / 2, rand_c(rng)}});
    }
    throw std::logic_error("family");
}

AccessModel exact(ModelKind k) {
    AccessModel m;
    m.kind = k;
    m.exact_prep = true;
    return m;
}

AccessModel stochastic(double delta, double eps_p, std::uint64_t seed = 7) {
    AccessModel m;
    m.kind = ModelKind::blackbox;
    m.exact_prep = false;
    m.delta = delta;
    m.eps_p = eps_p;
    m.seed = seed;
    return m;
}

const Family kAll[] = {Family::toeplitz, Family::circulant, Family::hankel, Family::banded_toeplitz,
                       Family::toeplitz_like, Family::hankel_like};

}  // namespace

TEST(Encode, BandedTridiagonalExplicit) {
    auto s = StructuredMatrix::banded(4, 1, {-1.0, 2.0, -1.0});
    auto be = encode(s, exact(ModelKind::explicit_));
    EXPECT_NEAR(be.alpha, 4.0, 1e-12);
    EXPECT_LE(max_abs_diff(extract_block(be), build_structured(s)), 1e-10);
    EXPECT_EQ(be.ancillas, 3u);
    EXPECT_EQ(be.tally.queries, 0u);
}

TEST(Encode, CirculantExplicitIsExact) {
    auto s = StructuredMatrix::circulant({0.5, 0.5, 0.0, 0.0});
    auto be = encode(s, exact(ModelKind::explicit_));
    EXPECT_NEAR(be.alpha, 1.0, 1e-12);
    EXPECT_EQ(be.ancillas, 1u);
    EXPECT_LE(max_abs_diff(extract_block(be), build_structured(s)), 1e-12);
}

TEST(Encode, ExplicitRejectsDenseFamilies) {
    std::mt19937_64 rng(1);
    for (Family f : {Family::toeplitz, Family::hankel, Family::toeplitz_like, Family::hankel_like})
        EXPECT_THROW(encode(random_spec(f, 4, rng), exact(ModelKind::explicit_)), std::invalid_argument);
}

TEST(Encode, ToeplitzQramExactAncillas) {
    std::mt19937_64 rng(2);
    auto s = random_spec(Family::toeplitz, 4, rng);
    auto be = encode(s, exact(ModelKind::qram));
    EXPECT_EQ(be.ancillas, 3u);
    EXPECT_LE(spectral_norm(build_structured(s) - extract_block(be)), 1e-8);
}

TEST(Encode, EveryFamilyEveryModelExact) {
    std::mt19937_64 rng(3);
    for (std::size_t n : {2u, 4u, 8u})
        for (Family f : kAll)
            for (ModelKind k : {ModelKind::blackbox, ModelKind::qram, ModelKind::explicit_}) {
                if (k == ModelKind::explicit_ && !(f == Family::banded_toeplitz || f == Family::circulant)) continue;
                if (f == Family::banded_toeplitz && n == 2) continue;
                auto s = random_spec(f, n, rng);
                auto be = encode(s, exact(k));
                const ComplexMatrix m = build_structured(s);
                auto rep = verify_block_encoding(be, m);
                EXPECT_LE(rep.deviation, 1e-8) << family_name(f) << " " << model_name(k) << " n=" << n;
                EXPECT_TRUE(rep.pass) << family_name(f) << " " << model_name(k) << " n=" << n;
                if (k != ModelKind::explicit_) EXPECT_EQ(be.ancillas, expected_ancillas(f, k, n));
                EXPECT_NEAR(be.alpha, chi_scaling(lcu_decompose_structured(s)), 1e-12);
            }
}

TEST(Encode, AncillaFormulas) {
    for (std::size_t n : {2u, 4u, 8u, 1024u}) {
        const std::size_t s = ilog2(n);
        EXPECT_EQ(expected_ancillas(Family::toeplitz, ModelKind::blackbox, n), s + 2);
        EXPECT_EQ(expected_ancillas(Family::hankel, ModelKind::qram, n), s + 1);
        EXPECT_EQ(expected_ancillas(Family::toeplitz_like, ModelKind::blackbox, n), 2 * s + 2);
        EXPECT_EQ(expected_ancillas(Family::hankel_like, ModelKind::qram, n), 2 * s);
    }
}

TEST(Encode, NonnegativeCirculantAlphaIsNorm) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        std::vector<cplx> c(8);
        for (auto& z : c) z = u(rng);
        auto s = StructuredMatrix::circulant(c);
        auto be = encode(s, exact(ModelKind::qram));
        EXPECT_NEAR(be.alpha, spectral_norm(build_structured(s)), 1e-10);
    }
}

TEST(Encode, HankelExtractedBlock) {
    std::mt19937_64 rng(5);
    auto s = random_spec(Family::hankel, 4, rng);
    for (ModelKind k : {ModelKind::blackbox, ModelKind::qram})
        EXPECT_LE(spectral_norm(build_structured(s) - extract_block(encode(s, exact(k)))), 1e-8);
}

TEST(Encode, BlackboxErrorBudgetGrid) {
    std::mt19937_64 rng(6);
    auto s = random_spec(Family::toeplitz, 8, rng);
    const ComplexMatrix m = build_structured(s);
    for (double delta : {0.02, 0.05, 0.1})
        for (double eps_p : {1e-4, 1e-3}) {
            auto be = encode(s, stochastic(delta, eps_p));
            const double chi = 2.0 * be.alpha;
            auto rep = verify_block_encoding(be, m);
            EXPECT_LE(rep.deviation, chi * (delta * delta + eps_p)) << delta << " " << eps_p;
            EXPECT_TRUE(rep.pass);
            EXPECT_EQ(be.ancillas, 5u);
            ASSERT_TRUE(be.prep.has_value());
            EXPECT_GE(be.prep->p_final, 1.0 - delta * delta - 1e-9);
        }
}

TEST(Encode, BlackboxOtherFamilies) {
    std::mt19937_64 rng(7);
    for (Family f : kAll) {
        auto s = random_spec(f, 4, rng);
        auto be = encode(s, stochastic(0.05, 1e-3));
        auto rep = verify_block_encoding(be, build_structured(s));
        EXPECT_TRUE(rep.pass) << family_name(f) << " deviation " << rep.deviation << " bound " << be.epsilon_bound;
        EXPECT_GT(be.tally.queries, 0u);
    }
}

TEST(Encode, QramFinitePrecision) {
    std::mt19937_64 rng(8);
    for (Family f : kAll) {
        auto s = random_spec(f, 4, rng);
        AccessModel m = exact(ModelKind::qram);
        m.exact_prep = false;
        m.eps_p = 1e-3;
        auto be = encode(s, m);
        auto rep = verify_block_encoding(be, build_structured(s));
        EXPECT_TRUE(rep.pass) << family_name(f) << " deviation " << rep.deviation;
        EXPECT_GT(be.memory_entries, 0u);
    }
}

TEST(Encode, MonotoneErrorEnvelope) {
    std::mt19937_64 rng(9);
    auto s = random_spec(Family::toeplitz, 4, rng);
    const ComplexMatrix m = build_structured(s);
    double prev_bound = 0.0;
    for (double delta : {0.02, 0.1, 0.3}) {
        auto be = encode(s, stochastic(delta, 1e-3));
        const double dev = verify_block_encoding(be, m).deviation;
        EXPECT_LE(dev, be.epsilon_bound);
        EXPECT_GE(be.epsilon_bound, prev_bound);
        prev_bound = be.epsilon_bound;
    }
}

TEST(Encode, BudgetFeasibility) {
    std::mt19937_64 rng(10);
    auto s = random_spec(Family::toeplitz, 4, rng);
    AccessModel m = stochastic(0.3, 1e-3);
    m.target_eps = 1e-3;
    EXPECT_THROW(encode(s, m), infeasible_error);
    AccessModel a = stochastic(-1.0, -1.0);
    a.target_eps = 0.05;
    auto be = encode(s, a);
    const double chi = 2.0 * be.alpha;
    EXPECT_LE(chi * be.model.delta * be.model.delta, 0.025 * (1 + 1e-12));
    EXPECT_LE(verify_block_encoding(be, build_structured(s)).deviation, 0.05);
    AccessModel bad = stochastic(1.5, 1e-3);
    EXPECT_THROW(encode(s, bad), infeasible_error);
}

TEST(Extract, IdentityAndCaps) {
    Circuit u(3);
    EXPECT_LE(max_abs_diff(extract_block(u, 1, 1.0), ComplexMatrix::Identity(4, 4)), 0.0);
    EXPECT_THROW(extract_block(Circuit(kStatevectorCap + 1), 1, 1.0), std::length_error);
}

TEST(Verify, WrongAlphaIsFlagged) {
    auto s = StructuredMatrix::circulant({0.5, 0.5, 0.0, 0.0});
    auto be = encode(s, exact(ModelKind::qram));
    EXPECT_TRUE(verify_block_encoding(be, build_structured(s)).pass);
    be.alpha *= 1.5;
    EXPECT_FALSE(verify_block_encoding(be, build_structured(s)).pass);
    auto be2 = encode(s, exact(ModelKind::qram));
    be2.ancillas += 1;
    EXPECT_THROW(verify_block_encoding(be2, build_structured(s)), std::invalid_argument);
}

TEST(Complement, OneByOne) {
    Circuit u(1);
    BlockEncoding be;
    be.circuit = u;
    be.alpha = 1.0;
    be.ancillas = 1;
    be.system_qubits = 0;
    auto h = complement_to_hermitian(be);
    ComplexMatrix want(2, 2);
    want << 0.0, 1.0, 1.0, 0.0;
    EXPECT_LE(max_abs_diff(extract_block(h), want), 1e-12);
}

TEST(Complement, MatchesHermitianExtension) {
    std::mt19937_64 rng(11);
    for (Family f : kAll) {
        auto s = random_spec(f, 4, rng);
        auto be = encode(s, exact(ModelKind::qram));
        auto h = complement_to_hermitian(be);
        EXPECT_EQ(h.alpha, be.alpha);
        EXPECT_EQ(h.ancillas, be.ancillas);
        EXPECT_LE(max_abs_diff(extract_block(h), hermitian_extend(extract_block(be))), 1e-8);
        EXPECT_LE(h.tally.gates, 2 * be.tally.gates + 2 * be.circuit.ops().size() + 1);
        EXPECT_EQ(h.tally.queries, 2 * be.tally.queries);
        EXPECT_TRUE(verify_block_encoding(h, hermitian_extend(build_structured(s))).pass);
    }
}

TEST(Resources, QueryRatioAtFixedChi) {
    for (std::size_t n = 16; n <= (std::size_t{1} << 18); n *= 4) {
        auto a = resource_estimate(Family::toeplitz, ModelKind::blackbox, n, 0.05, 1e-2);
        auto b = resource_estimate(Family::toeplitz, ModelKind::blackbox, 4 * n, 0.05, 1e-2);
        const double r = double(b.queries) / double(a.queries);
        EXPECT_GE(r, 1.8) << n;
        EXPECT_LE(r, 2.2) << n;
    }
}

TEST(Resources, QramGatesPolylog) {
    auto a = resource_estimate(Family::toeplitz, ModelKind::qram, 1u << 8, 0.05, 1e-2);
    auto b = resource_estimate(Family::toeplitz, ModelKind::qram, 1u << 16, 0.05, 1e-2);
    EXPECT_LE(double(b.gates) / double(a.gates), 4.0);
}

TEST(Resources, MemoryScaling) {
    for (std::size_t n = 16; n <= 4096; n *= 2) {
        auto t = resource_estimate(Family::toeplitz, ModelKind::qram, n, 0.05, 1e-2);
        EXPECT_EQ(t.memory_entries, 4 * n - 1);
        EXPECT_LT(double(t.memory_entries) / double(t.dense_memory_entries), 4.0 / double(n));
        EstimateInputs in;
        in.d = 4;
        auto l = resource_estimate(Family::toeplitz_like, ModelKind::qram, n, 0.05, 1e-2, in);
        const double dnlogn = 4.0 * double(n) * std::log2(double(n));
        EXPECT_LE(double(l.memory_entries), 2.0 * dnlogn);
    }
}

TEST(Resources, EstimateMatchesCircuitQueries) {
    std::mt19937_64 rng(12);
    auto s = random_spec(Family::toeplitz, 8, rng);
    auto be = encode(s, stochastic(0.05, 1e-3));
    ASSERT_TRUE(be.prep.has_value());
    EXPECT_EQ(be.tally.queries, 2 * be.prep->L * 4);
    EXPECT_EQ(be.tally.ancillas, resource_estimate(Family::toeplitz, ModelKind::blackbox, 8, 0.05, 1e-2).ancillas);
}

TEST(Resources, GrowthFitOnKnownSeries) {
    std::vector<std::size_t> ns;
    std::vector<double> root, logn;
    for (std::size_t n = 16; n <= (std::size_t{1} << 20); n *= 2) {
        ns.push_back(n);
        root.push_back(3.0 * std::sqrt(double(n)));
        logn.push_back(5.0 * std::log2(double(n)));
    }
    const GrowthFit r = fit_growth(ns, root);
    EXPECT_NEAR(r.power, 0.5, 1e-12);
    EXPECT_NEAR(r.tail_power, 0.5, 1e-12);
    const GrowthFit l = fit_growth(ns, logn);
    EXPECT_NEAR(l.polylog, 1.0, 1e-12);
    EXPECT_LE(l.tail_power, 0.1);
    EXPECT_GT(l.power, 0.1);
}
