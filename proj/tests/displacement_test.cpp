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

#include "dispenc/displacement.hpp"
#include "test_util.hpp"

using namespace dispenc;
using dispenc::testing::max_abs;
using dispenc::testing::power;
using dispenc::testing::rand_matrix;
using dispenc::testing::rand_seq;

namespace {

// Word matrix built from dense powers, independent of apply_word.
ComplexMatrix dense_word(std::size_t n, const Word& w) {
    ComplexMatrix m = power(unit_f_circulant(n, 1.0), w.i);
    if (w.uses_J) m = m * reversal_matrix(n);
    return m * power(unit_f_circulant(n, -1.0), n - 1 - w.k);
}

std::vector<Edit> rand_edits(std::mt19937_64& rng, std::size_t n, std::size_t count) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<Edit> e;
    for (std::size_t q = 0; q < count; ++q) e.push_back({pick(rng), pick(rng), dispenc::testing::rand_c(rng)});
    return e;
}

}  // namespace

TEST(Displacement, Examples) {
    std::mt19937_64 rng(1);
    auto m = rand_matrix(rng, 3);
    ComplexMatrix zero = ComplexMatrix::Zero(3, 3);
    EXPECT_EQ(max_abs(displacement(m, zero, zero, DisplacementKind::stein) - m), 0.0);
    auto a = rand_matrix(rng, 3);
    EXPECT_EQ(max_abs(displacement(ComplexMatrix::Identity(3, 3), a, a, DisplacementKind::sylvester)), 0.0);
    ComplexMatrix want(2, 2);
    want << 0.0, 2.0, 0.0, 0.0;
    auto d = displacement(ComplexMatrix::Identity(2, 2), unit_f_circulant(2, 1.0), unit_f_circulant(2, -1.0),
                          DisplacementKind::sylvester);
    EXPECT_EQ(max_abs(d - want), 0.0);
    EXPECT_THROW(displacement(m, ComplexMatrix::Zero(2, 2), zero, DisplacementKind::stein), std::invalid_argument);
}

TEST(Words, ApplyWordMatchesDensePowers) {
    for (std::size_t n : {2u, 4u, 8u})
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (bool j : {false, true}) {
                    Word w{i, k, j};
                    EXPECT_EQ(max_abs(word_matrix(n, w) - dense_word(n, w)), 0.0);
                }
}

TEST(LcuDecompose, IdentitySylvester) {
    auto dec = lcu_decompose(ComplexMatrix::Identity(2, 2), DisplacementKind::sylvester);
    ASSERT_EQ(dec.terms.size(), 1u);
    EXPECT_EQ(dec.terms[0].coeff, cplx(2.0));
    EXPECT_EQ(dec.terms[0].word, (Word{0, 1, false}));
    EXPECT_EQ(dec.prefactor, 0.5);
    EXPECT_EQ(max_abs(reconstruct(dec) - ComplexMatrix::Identity(2, 2)), 0.0);
}

TEST(LcuDecompose, CoefficientsAreDisplacementEntries) {
    std::mt19937_64 rng(2);
    auto m = rand_matrix(rng, 4);
    for (auto kind : {DisplacementKind::stein, DisplacementKind::sylvester}) {
        auto dec = lcu_decompose(m, kind);
        auto d = displacement(m, unit_f_circulant(4, 1.0), unit_f_circulant(4, -1.0), kind);
        EXPECT_EQ(dec.terms.size(), 16u);
        for (const auto& t : dec.terms) {
            EXPECT_EQ(t.coeff, d(t.word.i, t.word.k));
            EXPECT_EQ(t.word.uses_J, kind == DisplacementKind::stein);
        }
        EXPECT_LE(max_abs(reconstruct(dec) - m), 1e-12);
    }
}

TEST(LcuDecompose, RoundTripProperty) {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = std::size_t{2} << (trial % 4);
        auto m = rand_matrix(rng, n);
        for (auto kind : {DisplacementKind::stein, DisplacementKind::sylvester}) {
            auto dec = lcu_decompose(m, kind);
            worst = std::max(worst, max_abs(reconstruct(dec) - m));
            EXPECT_GE(chi_scaling(dec) + 1e-12, spectral_norm(m));
        }
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(LcuDecompose, ToeplitzSupportIsFirstRowAndLastColumn) {
    std::mt19937_64 rng(4);
    const std::size_t n = 8;
    auto t = build_structured(StructuredMatrix::toeplitz(rand_seq(rng, 2 * n - 1)));
    auto dec = lcu_decompose(t, DisplacementKind::sylvester);
    for (const auto& term : dec.terms) EXPECT_TRUE(term.word.i == 0 || term.word.k == n - 1);
    EXPECT_EQ(dec.terms.size(), 2 * n - 1);
}

TEST(LcuStructured, ToeplitzCoefficientsAndAgreement) {
    std::mt19937_64 rng(5);
    for (std::size_t n : {2u, 4u, 8u, 16u}) {
        auto s = StructuredMatrix::toeplitz(rand_seq(rng, 2 * n - 1));
        auto dec = lcu_decompose_structured(s);
        auto dense = lcu_decompose(build_structured(s), DisplacementKind::sylvester);
        ASSERT_EQ(dec.terms.size(), dense.terms.size());
        for (std::size_t q = 0; q < dec.terms.size(); ++q) {
            EXPECT_EQ(dec.terms[q].word, dense.terms[q].word);
            EXPECT_NEAR(std::abs(dec.terms[q].coeff - dense.terms[q].coeff), 0.0, 1e-12);
        }
        EXPECT_EQ(*dec.coefficient({0, n - 1, false}), 2.0 * s.t(0));
        EXPECT_LE(max_abs(reconstruct(dec) - build_structured(s)), 1e-12);
    }
}

TEST(LcuStructured, CirculantUnit) {
    auto dec = lcu_decompose_structured(StructuredMatrix::circulant({1.0, 0.0, 0.0, 0.0}));
    ASSERT_EQ(dec.terms.size(), 1u);
    EXPECT_EQ(dec.prefactor, 1.0);
    EXPECT_EQ(dec.terms[0].word, (Word{0, 3, false}));
    EXPECT_EQ(dec.terms[0].coeff, cplx(1.0));
}

TEST(LcuStructured, CirculantNormEqualsSum) {
    auto s = StructuredMatrix::circulant({0.5, 0.25, 0.0, 1.0});
    auto dec = lcu_decompose_structured(s);
    EXPECT_NEAR(chi_scaling(dec), 1.75, 1e-15);
    EXPECT_NEAR(chi_scaling(dec), spectral_norm(build_structured(s)), 1e-12);
}

TEST(LcuStructured, HankelTwoByTwo) {
    auto s = StructuredMatrix::hankel({0.0, 1.0, 2.0});
    auto dec = lcu_decompose_structured(s);
    EXPECT_EQ(dec.kind, DisplacementKind::stein);
    ASSERT_EQ(dec.terms.size(), 3u);
    EXPECT_EQ(*dec.coefficient({0, 0, true}), cplx(-2.0));
    EXPECT_EQ(*dec.coefficient({0, 1, true}), cplx(2.0));
    EXPECT_EQ(*dec.coefficient({1, 1, true}), cplx(2.0));
    ComplexMatrix want(2, 2);
    want << 0.0, 1.0, 1.0, 2.0;
    EXPECT_EQ(max_abs(reconstruct(dec) - want), 0.0);
    // the word (0,0,J) is -Z_{-1} J
    EXPECT_EQ(max_abs(word_matrix(2, {0, 0, true}) + unit_f_circulant(2, -1.0) * reversal_matrix(2)), 0.0);
}

TEST(LcuStructured, HankelAgreesWithDenseStein) {
    std::mt19937_64 rng(6);
    for (std::size_t n : {2u, 4u, 8u, 16u}) {
        auto s = StructuredMatrix::hankel(rand_seq(rng, 2 * n - 1));
        auto dec = lcu_decompose_structured(s);
        auto dense = lcu_decompose(build_structured(s), DisplacementKind::stein);
        EXPECT_LE(dec.terms.size(), 2 * n - 1);
        ASSERT_EQ(dec.terms.size(), dense.terms.size());
        for (std::size_t q = 0; q < dec.terms.size(); ++q) {
            EXPECT_EQ(dec.terms[q].word, dense.terms[q].word);
            EXPECT_NEAR(std::abs(dec.terms[q].coeff - dense.terms[q].coeff), 0.0, 1e-12);
            EXPECT_TRUE(dec.terms[q].word.uses_J);
        }
    }
}

TEST(LcuStructured, BandedTridiagonal) {
    auto s = StructuredMatrix::banded(4, 1, {-1.0, 2.0, -1.0});
    auto dec = lcu_decompose_structured(s);
    ASSERT_EQ(dec.terms.size(), 5u);
    EXPECT_EQ(*dec.coefficient({0, 3, false}), cplx(4.0));   // I
    EXPECT_EQ(*dec.coefficient({1, 3, false}), cplx(-1.0));  // Z_1
    EXPECT_EQ(*dec.coefficient({3, 3, false}), cplx(-1.0));  // Z_1^3
    EXPECT_EQ(*dec.coefficient({0, 2, false}), cplx(-1.0));  // Z_{-1}
    EXPECT_EQ(*dec.coefficient({0, 0, false}), cplx(1.0));   // Z_{-1}^3
    EXPECT_DOUBLE_EQ(dec.chi(), 8.0);
    EXPECT_DOUBLE_EQ(chi_scaling(dec), 4.0);
    EXPECT_DOUBLE_EQ(banded_band_sum(s), 4.0);
    EXPECT_LE(max_abs(reconstruct(dec) - build_structured(s)), 1e-15);
}

TEST(LcuStructured, TermCountBoundsProperty) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pickn(1, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = std::size_t{1} << pickn(rng);
        auto t = lcu_decompose_structured(StructuredMatrix::toeplitz(rand_seq(rng, 2 * n - 1)));
        EXPECT_EQ(t.terms.size(), 2 * n - 1);
        auto c = lcu_decompose_structured(StructuredMatrix::circulant(rand_seq(rng, n)));
        EXPECT_EQ(c.terms.size(), n);
        std::uniform_int_distribution<std::size_t> pickr(0, n / 2 - (n > 2 ? 1 : 0));
        const std::size_t rho = n == 2 ? 0 : pickr(rng);
        auto b = lcu_decompose_structured(StructuredMatrix::banded(n, rho, rand_seq(rng, 2 * rho + 1)));
        EXPECT_EQ(b.terms.size(), std::min(4 * rho + 1, 2 * n - 1));
        auto sl = StructuredMatrix::toeplitz_like(rand_seq(rng, 2 * n - 1), rand_edits(rng, n, trial % 4));
        auto l = lcu_decompose_structured(sl);
        const std::size_t d = displacement_row_sparsity(l);
        EXPECT_LE(l.terms.size(), n + (n - 1) * d);
        EXPECT_LE(max_abs(reconstruct(l) - build_structured(sl)), 1e-10);
    }
}

TEST(LcuStructured, LikeFamiliesFallBackToDense) {
    std::mt19937_64 rng(8);
    auto th = StructuredMatrix::hankel_like(rand_seq(rng, 7), rand_edits(rng, 4, 2));
    auto dec = lcu_decompose_structured(th);
    EXPECT_EQ(dec.kind, DisplacementKind::stein);
    EXPECT_LE(max_abs(reconstruct(dec) - build_structured(th)), 1e-12);
    // one edit in the interior raises d to 3 (two supports in one row is possible, or spread)
    auto tl = StructuredMatrix::toeplitz_like(std::vector<cplx>(7, 0.0), {{1, 1, 1.0}});
    EXPECT_EQ(displacement_row_sparsity(tl), 2u);
}

TEST(Reconstruct, EmptyIsZero) {
    LcuDecomposition dec;
    dec.n = 4;
    EXPECT_EQ(max_abs(reconstruct(dec)), 0.0);
}

TEST(Identities, SuiteOnRandomInstances) {
    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = std::size_t{2} << (trial % 3);
        const std::size_t k = 1 + trial % 5;
        auto m = rand_matrix(rng, n);
        ComplexMatrix a = rand_matrix(rng, n) / std::sqrt(double(n));
        ComplexMatrix b = rand_matrix(rng, n) / std::sqrt(double(n));
        worst = std::max(worst, check_identity(Identity::induction, m, a, b, k));
        worst = std::max(worst, check_identity(Identity::switch_left, m, a, b));
        worst = std::max(worst, check_identity(Identity::switch_right, m, a, b));
        const auto z1 = unit_f_circulant(n, 1.0), zm = unit_f_circulant(n, -1.0);
        worst = std::max(worst, check_identity(Identity::a_potent, m, z1, zm));
        worst = std::max(worst, check_identity(Identity::f_circulant_stein, m, z1, zm));
        worst = std::max(worst, check_identity(Identity::f_circulant_sylvester, m, z1, zm));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(Identities, SwitchWithShiftIsExact) {
    std::mt19937_64 rng(10);
    auto m = rand_matrix(rng, 4);
    auto b = rand_matrix(rng, 4);
    // Z_1 is a permutation, so its inverse is exact.
    EXPECT_EQ(check_identity(Identity::switch_left, m, unit_f_circulant(4, 1.0), b), 0.0);
}

TEST(Identities, Errors) {
    auto m = ComplexMatrix::Identity(2, 2);
    ComplexMatrix sing = ComplexMatrix::Zero(2, 2);
    EXPECT_THROW(check_identity(Identity::switch_left, m, sing, m), std::domain_error);
    EXPECT_THROW(check_identity(Identity::a_potent, m, ComplexMatrix::Ones(2, 2), m), std::invalid_argument);
    EXPECT_THROW(check_identity(Identity::f_circulant_sylvester, m, unit_f_circulant(2, 1.0),
                                unit_f_circulant(2, 1.0)),
                 std::domain_error);
}
