#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "support/line_integral_oracle.hpp"
#include "fvtomo/phantom.hpp"
#include "fvtomo/projector.hpp"

using namespace fvtomo;

namespace {

struct Triplet {
    std::size_t row, col;
    double weight;
};
#include "data/matrix_8x8_a4.inc"

std::vector<double> random_vector(std::size_t n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST(Geometry, EquallySpacedAngles) {
    const auto g = ParallelGeometry::equally_spaced(4, 8);
    ASSERT_EQ(g.angles.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g.angles[i], i * std::numbers::pi / 4);
    EXPECT_EQ(g.num_measurements(), 32u);
    EXPECT_DOUBLE_EQ(g.ray_offset(0), -3.5);
    EXPECT_DOUBLE_EQ(g.ray_offset(7), 3.5);
}

TEST(Geometry, RejectsBadAngles) {
    EXPECT_THROW(ParallelGeometry::with_angles({0.5, 0.2}, 4), std::invalid_argument);
    EXPECT_THROW(ParallelGeometry::with_angles({0.0, std::numbers::pi}, 4), std::invalid_argument);
    EXPECT_THROW(ParallelGeometry::with_angles({}, 4), std::invalid_argument);
    EXPECT_THROW(ParallelGeometry::equally_spaced(0, 4), std::invalid_argument);
    EXPECT_THROW(build_system_matrix(ParallelGeometry::equally_spaced(2, 4), 8), std::invalid_argument);
}

TEST(SystemMatrixBuild, Side2VerticalRays) {
    const auto A = build_system_matrix(ParallelGeometry::with_angles({0.0}, 2), 2);
    ASSERT_EQ(A.rows(), 2u);
    for (std::size_t r = 0; r < 2; ++r) {
        ASSERT_EQ(A.row_cols(r).size(), 2u);
        for (double w : A.row_values(r)) EXPECT_DOUBLE_EQ(w, 1.0);
        // Ray r runs down column r.
        EXPECT_EQ(A.row_cols(r)[0], r);
        EXPECT_EQ(A.row_cols(r)[1], 2 + r);
    }
}

TEST(SystemMatrixBuild, Side2UniformImage) {
    const auto A = build_system_matrix(ParallelGeometry::with_angles({0.0, std::numbers::pi / 2}, 2), 2);
    const std::vector<double> ones(4, 1.0);
    for (double v : forward_project(A, ones)) EXPECT_NEAR(v, 2.0, 1e-12);
}

TEST(SystemMatrixBuild, MatchesExactIntersectionTable) {
    const auto A = build_system_matrix(ParallelGeometry::equally_spaced(4, 8), 8);
    const auto dense = A.to_dense();
    std::vector<std::vector<double>> expected(32, std::vector<double>(64, 0.0));
    for (const auto& t : kMatrix8x4) expected[t.row][t.col] = t.weight;
    EXPECT_EQ(A.nnz(), std::size(kMatrix8x4));
    for (std::size_t r = 0; r < 32; ++r)
        for (std::size_t c = 0; c < 64; ++c) EXPECT_NEAR(dense[r][c], expected[r][c], 1e-9) << r << "," << c;
}

TEST(SystemMatrixBuild, MatchesMidpointLineIntegral) {
    for (std::size_t alpha : {1u, 3u, 4u, 7u}) {
        const auto g = ParallelGeometry::equally_spaced(alpha, 8);
        const auto dense = build_system_matrix(g, 8).to_dense();
        const auto reference = oracle::midpoint_matrix(g, 8, 1e-3);
        for (std::size_t r = 0; r < dense.size(); ++r)
            for (std::size_t c = 0; c < 64; ++c)
                ASSERT_NEAR(dense[r][c], reference[r][c], 5e-3) << "alpha " << alpha << " row " << r << " col " << c;
    }
}

TEST(SystemMatrixBuild, WeightsPositiveAndBounded) {
    for (std::size_t side : {8u, 32u}) {
        const auto A = build_system_matrix(ParallelGeometry::equally_spaced(6, side), side);
        for (std::size_t r = 0; r < A.rows(); ++r) {
            for (double w : A.row_values(r)) {
                EXPECT_GT(w, 0.0);
                EXPECT_LE(w, side * std::numbers::sqrt2);
            }
            for (auto c : A.row_cols(r)) EXPECT_LT(c, A.cols());
        }
    }
}

TEST(SystemMatrixBuild, Deterministic) {
    const auto g = ParallelGeometry::equally_spaced(6, 32);
    std::ostringstream a, b;
    build_system_matrix(g, 32).dump_triplets(a);
    build_system_matrix(g, 32).dump_triplets(b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(SystemMatrixBuild, TripletRoundTrip) {
    const auto g = ParallelGeometry::equally_spaced(5, 8);
    const auto A = build_system_matrix(g, 8);
    std::stringstream ss;
    A.dump_triplets(ss);
    const auto B = SystemMatrix::from_triplets(g, 8, ss);
    EXPECT_EQ(A.to_dense(), B.to_dense());
}

TEST(Projection, ZeroAndHomogeneity) {
    const auto A = build_system_matrix(ParallelGeometry::equally_spaced(4, 8), 8);
    for (double v : forward_project(A, std::vector<double>(64, 0.0))) EXPECT_EQ(v, 0.0);
    for (double v : back_project(A, std::vector<double>(32, 0.0))) EXPECT_EQ(v, 0.0);
    std::mt19937_64 gen(3);
    auto x = random_vector(64, gen);
    auto x2 = x;
    for (auto& v : x2) v *= 2;
    const auto b = forward_project(A, x), b2 = forward_project(A, x2);
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b2[i], 2 * b[i], 1e-12);
}

TEST(Projection, AgreesWithDenseOnPhantom) {
    const auto A = build_system_matrix(ParallelGeometry::equally_spaced(4, 8), 8);
    const auto dense = A.to_dense();
    const Image x = generate_shepp_logan(8);
    const auto b = forward_project(A, x.pixels());
    for (std::size_t r = 0; r < dense.size(); ++r) {
        double ref = 0;
        for (std::size_t c = 0; c < 64; ++c) ref += dense[r][c] * x[c];
        EXPECT_NEAR(b[r], ref, 1e-9 * std::max(1.0, std::abs(ref)));
    }
    std::mt19937_64 gen(5);
    const auto res = random_vector(32, gen);
    const auto bt = back_project(A, res);
    for (std::size_t c = 0; c < 64; ++c) {
        double ref = 0;
        for (std::size_t r = 0; r < 32; ++r) ref += dense[r][c] * res[r];
        EXPECT_NEAR(bt[c], ref, 1e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST(Projection, AdjointIdentity) {
    std::mt19937_64 gen(11);
    for (std::size_t side : {8u, 32u}) {
        const auto A = build_system_matrix(ParallelGeometry::equally_spaced(6, side), side);
        for (int k = 0; k < 100; ++k) {
            const auto x = random_vector(A.cols(), gen);
            const auto r = random_vector(A.rows(), gen);
            const double lhs = dot(forward_project(A, x), r);
            const double rhs = dot(x, back_project(A, r));
            EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST(Projection, AxisAlignedAnglesGiveColumnAndRowSums) {
    const std::size_t side = 16;
    const auto A = build_system_matrix(ParallelGeometry::with_angles({0.0, std::numbers::pi / 2}, side), side);
    std::mt19937_64 gen(2);
    const auto x = random_vector(side * side, gen);
    const auto b = forward_project(A, x);
    for (std::size_t col = 0; col < side; ++col) {
        double s = 0;
        for (std::size_t row = 0; row < side; ++row) s += x[row * side + col];
        EXPECT_NEAR(b[col], s, 1e-9);
    }
    // At pi/2 the ray with the most negative offset crosses the bottom row.
    for (std::size_t r = 0; r < side; ++r) {
        const std::size_t row = side - 1 - r;
        double s = 0;
        for (std::size_t col = 0; col < side; ++col) s += x[row * side + col];
        EXPECT_NEAR(b[side + r], s, 1e-9);
    }
}

TEST(Projection, MassConservationPerAngle) {
    const std::size_t side = 32;
    const auto g = ParallelGeometry::equally_spaced(8, side);
    const auto A = build_system_matrix(g, side);
    const Image x = generate_shepp_logan(side);
    const auto b = forward_project(A, x.pixels());
    for (std::size_t a = 0; a < g.num_angles; ++a) {
        std::vector<double> chord(side * side, 0.0);
        double sino = 0;
        for (std::size_t r = 0; r < side; ++r) {
            const std::size_t row = a * side + r;
            sino += b[row];
            const auto cols = A.row_cols(row);
            const auto vals = A.row_values(row);
            for (std::size_t k = 0; k < cols.size(); ++k) chord[cols[k]] += vals[k];
        }
        double expected = 0;
        for (std::size_t p = 0; p < chord.size(); ++p) expected += x[p] * chord[p];
        EXPECT_NEAR(sino, expected, 1e-9 * expected);
        if (a == 0 || 2 * a == g.num_angles) {
            double total = 0;
            for (double v : x.pixels()) total += v;
            EXPECT_NEAR(sino, total, 1e-9 * total);
        }
    }
}

TEST(Projection, NonnegativeSinogramFromNonnegativeImage) {
    const auto A = build_system_matrix(ParallelGeometry::equally_spaced(6, 32), 32);
    for (double v : forward_project(A, generate_shepp_logan(32).pixels())) EXPECT_GE(v, 0.0);
}

TEST(Projection, LengthMismatchThrows) {
    const auto A = build_system_matrix(ParallelGeometry::equally_spaced(2, 4), 4);
    EXPECT_THROW(forward_project(A, std::vector<double>(15)), std::invalid_argument);
    EXPECT_THROW(back_project(A, std::vector<double>(7)), std::invalid_argument);
}
