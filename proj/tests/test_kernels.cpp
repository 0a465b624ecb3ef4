#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "cdb/examples.hpp"
#include "cdb/kernels.hpp"

using namespace cdb;

namespace {

std::shared_ptr<const Spectrum> spectrum_of(const std::vector<Complex>& t, const std::vector<double>& mu) {
    return std::make_shared<const Spectrum>(Spectrum::from(t, mu));
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidArgument;
}

std::shared_ptr<const Spectrum> power_line(int n, double p) {
    std::vector<Complex> t;
    std::vector<double> mu;
    for (int k = 1; k <= n; ++k) {
        t.push_back({double(k), 0.0});
        mu.push_back(std::pow(double(k), -p));
    }
    return spectrum_of(t, mu);
}

}  // namespace

TEST(KernelVector, AtNodeIsBasisVector) {
    const auto s = spectrum_of({{1, 0}, {2, 0}, {3, 0}, {4, 1}}, {1, 2, 3, 4});
    const KernelVector k = kernel_vector(*s, s->node(2));
    EXPECT_TRUE(k.is_node);
    EXPECT_EQ(k.node_index, 2u);
    for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(k.coeffs[n], Complex(n == 2 ? 1.0 : 0.0, 0.0));
}

TEST(KernelVector, HandComputationAtOrigin) {
    const auto s = spectrum_of({{1, 0}, {2, 0}}, {1, 1});
    const KernelVector k = kernel_vector(*s, 0.0);
    const double norm = std::sqrt(1.25);
    EXPECT_NEAR(k.raw_norm, norm, 1e-15);
    EXPECT_NEAR(std::abs(k.coeffs[0] - Complex(-1.0 / norm, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(k.coeffs[1] - Complex(-0.5 / norm, 0)), 0.0, 1e-15);
}

TEST(KernelVector, ReproducingProperty) {
    const auto s = spectrum_of({{1, 0}, {2, 0}}, {1, 1});
    const std::vector<Complex> f{1.0, 0.0};
    // <f, K_0> = f(0) / A(0) = sum c_n mu_n^(1/2) / (0 - t_n) = -1.
    const KernelVector k = kernel_vector(*s, 0.0);
    std::vector<Complex> raw(k.coeffs);
    for (Complex& c : raw) c *= k.raw_norm;
    EXPECT_NEAR(std::abs(inner(f, raw) - Complex(-1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(inner(f, evaluation_vector(*s, 0.0)) - Complex(-1, 0)), 0.0, 1e-15);
}

TEST(KernelVector, PropertyReproducingOnRandomData) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3, 3);
    const auto s = power_line(40, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> f(s->size());
        for (Complex& c : f) c = {u(rng), u(rng)};
        const Complex w{u(rng) + 10.0, u(rng)};
        Complex direct = 0.0;
        for (std::size_t n = 0; n < s->size(); ++n) direct += f[n] * std::sqrt(s->weight(n)) / (w - s->node(n));
        const std::vector<Complex> coef = analysis_coefficients(*s, f, std::vector<Complex>{w});
        EXPECT_NEAR(std::abs(coef[0] * kernel_vector(*s, w).raw_norm - direct), 0.0, 1e-12 * (1 + std::abs(direct)));
    }
}

TEST(Gram, NodesGiveIdentity) {
    const auto s = power_line(12, 1.0);
    const KernelFrameReport r = gram(*s, s->nodes());
    EXPECT_TRUE(r.gram.isApprox(Eigen::MatrixXcd::Identity(12, 12), 1e-15));
    EXPECT_NEAR(r.lambda_min, 1.0, 1e-14);
    EXPECT_NEAR(r.lambda_max, 1.0, 1e-14);
    EXPECT_NEAR(r.condition, 1.0, 1e-13);
}

TEST(Gram, DuplicatePoint) {
    const auto s = power_line(4, 1.0);
    const std::vector<Complex> pts{{0.5, 0.5}, {0.5, 0.5}};
    EXPECT_EQ(kind_of([&] { (void)gram(*s, pts); }), ErrorKind::DuplicatePoint);
}

TEST(Gram, PaleyWienerZerosStableUnderDoubling) {
    const WorkedSpace pw = pw_spectrum(100);
    const ZeroReport rep = find_zeros(pw.closed_form(1.0), Rect{-20.25, 20.25, -1.0, 1.0});
    const std::vector<Complex> z = rep.locations();
    ASSERT_EQ(z.size(), 41u);
    const double c100 = gram(*pw.spectrum, z).condition;
    const double c200 = gram(*pw_spectrum(200).spectrum, z).condition;
    EXPECT_LE(c100, 10.0);
    EXPECT_LE(c200, 10.0);
    EXPECT_LT(std::abs(c200 - c100) / c100, 0.1);
}

TEST(Gram, PropertyHermitianPositiveWithUnitDiagonal) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    const auto s = power_line(60, 1.5);
    std::vector<Complex> pts;
    for (int i = 0; i < 25; ++i) pts.push_back({u(rng), u(rng) - 15.0});
    const KernelFrameReport r = gram(*s, pts, 3);
    for (Eigen::Index i = 0; i < r.gram.rows(); ++i) {
        EXPECT_NEAR(std::abs(r.gram(i, i) - 1.0), 0.0, 1e-14);
        for (Eigen::Index j = 0; j < r.gram.cols(); ++j)
            EXPECT_NEAR(std::abs(r.gram(i, j) - std::conj(r.gram(j, i))), 0.0, 1e-15);
    }
    EXPECT_GE(r.lambda_min, 0.0);
    EXPECT_LE(r.lambda_max, double(pts.size()) + 1e-12);
}

TEST(Closeness, ExactPairsGiveZeroTerms) {
    const auto s = power_line(6, 2.0);
    const std::vector<Complex> z = s->nodes();
    const ZeroPairing p = pair_zeros(*s, z, 0.0, 1.0 / 3.0);
    const ClosenessReport c = quadratic_closeness(*s, p, z, 1.0);
    for (double t : c.terms) EXPECT_EQ(t, 0.0);
}

TEST(Closeness, SingleOffNodePair) {
    const auto s = spectrum_of({{1, 0}, {2, 0}}, {1, 1});
    const std::vector<Complex> z{{1.1, 0}, {2.0, 0}};
    const ZeroPairing p = pair_zeros(*s, z, 0.0, 1.0 / 3.0);
    const ClosenessReport c = quadratic_closeness(*s, p, z, 1.0);
    ASSERT_EQ(c.terms.size(), 2u);
    EXPECT_NEAR(c.terms[0], 0.01 / 0.81, 1e-15);
    EXPECT_EQ(c.terms[1], 0.0);
}

TEST(Closeness, InverseQuarticWeightsConverge) {
    const auto s = power_line(100, 4.0);
    const auto h = MeromorphicHandle::plain(s, 1.0);
    const std::vector<Complex> z = find_zeros(h, default_region(h)).locations();
    const ZeroPairing p = pair_zeros(*s, z, 0.0, 1.0 / 3.0);
    const ClosenessReport c = quadratic_closeness(*s, p, z, 1.0);
    ASSERT_GE(c.partial_sums.size(), 90u);
    const double total = c.partial_sums.back();
    // Nodes 91..100 are the last decade.
    const auto it = std::find(c.indices.begin(), c.indices.end(), std::size_t{89});
    ASSERT_NE(it, c.indices.end());
    const double before = c.partial_sums[std::size_t(it - c.indices.begin())];
    EXPECT_LT((total - before) / total, 0.01);
    EXPECT_TRUE(std::isfinite(c.bound_ratio));
    EXPECT_GT(c.bound_ratio, 0.0);
}

TEST(Closeness, Errors) {
    const auto s = spectrum_of({{1, 0}, {2, 0}}, {1, 1});
    const std::vector<Complex> z{{1.1, 0}};
    const ZeroPairing p = pair_zeros(*s, z, 0.0, 1.0 / 3.0);
    const std::vector<std::size_t> want{1};
    EXPECT_EQ(kind_of([&] { (void)quadratic_closeness(*s, p, z, 1.0, want); }), ErrorKind::MissingPair);
    EXPECT_EQ(kind_of([&] { (void)quadratic_closeness(*s, p, z, 0.0); }), ErrorKind::GammaZero);
}

TEST(Analysis, BasisVectorAtNodes) {
    const auto s = power_line(5, 1.0);
    std::vector<Complex> f(5, 0.0);
    f[3] = 1.0;
    const std::vector<Complex> c = analysis_coefficients(*s, f, s->nodes());
    for (std::size_t n = 0; n < 5; ++n) EXPECT_EQ(c[n], Complex(n == 3 ? 1.0 : 0.0, 0.0));
}

TEST(Analysis, ZeroVector) {
    const auto s = power_line(5, 1.0);
    const std::vector<Complex> f(5, 0.0);
    const std::vector<Complex> pts{{0.5, 0.5}, {7, 1}};
    for (const Complex& c : analysis_coefficients(*s, f, pts)) EXPECT_EQ(c, Complex(0, 0));
}

TEST(Analysis, ExceptionalDiagonalGrowth) {
    // |<f, u_w>| for f = A / (z - 1/2) at the diagonal zeros w_k should track
    // k^(1/2) / |w_k - 1/2| up to a constant factor.
    const WorkedSpace cross = cross_pw_spectrum(1000);
    std::vector<Complex> f(cross.spectrum->size(), 0.0);
    for (std::size_t n = 0; n < f.size(); ++n)
        if (cross.spectrum->node(n) == Complex(0.5, 0)) f[n] = 1.0;
    std::vector<Complex> w;
    for (int k = 10; k <= 30; ++k) w.push_back(ExceptionalData::diagonal(k));
    const std::vector<Complex> c = analysis_coefficients(*cross.spectrum, f, w);
    double lo = INFINITY;
    double hi = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double k = 10.0 + double(i);
        const double r = std::abs(c[i]) * std::abs(w[i] - 0.5) / std::sqrt(k);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    EXPECT_LT(hi / lo, 1.1);
}

TEST(BVectors, SquareRootsOfWeights) {
    const auto s = spectrum_of({{1, 0}, {2, 0}}, {1, 4});
    const BVectors b = bvectors(*s, 1);
    ASSERT_EQ(b.vectors.size(), 1u);
    EXPECT_EQ(b.vectors[0][0], Complex(1, 0));
    EXPECT_EQ(b.vectors[0][1], Complex(2, 0));
    EXPECT_DOUBLE_EQ(b.moment_check[0], 5.0);
}

TEST(BVectors, ConjugatedPowers) {
    const auto s = spectrum_of({{1, 0}, {0, 2}}, {1, 1});
    const BVectors b = bvectors(*s, 2);
    EXPECT_EQ(b.vectors[1][0], Complex(1, 0));
    EXPECT_NEAR(std::abs(b.vectors[1][1] - Complex(0, -2)), 0.0, 1e-15);
}

TEST(BVectors, OriginInSpectrum) {
    const auto s = spectrum_of({{0, 0}, {1, 0}}, {1, 1});
    EXPECT_EQ(kind_of([&] { (void)bvectors(*s, 1); }), ErrorKind::OriginInSpectrum);
}

TEST(ProjectDomain, HandProjection) {
    const auto s = spectrum_of({{1, 0}, {2, 0}}, {1, 1});
    const std::vector<Complex> f{1.0, 0.0};
    const std::vector<Complex> g = project_domain(*s, f, 1);
    EXPECT_NEAR(std::abs(g[0] - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g[1] + 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g[0] * std::sqrt(s->weight(0)) + g[1] * std::sqrt(s->weight(1))), 0.0, 1e-15);
}

TEST(ProjectDomain, OrthogonalVectorUnchanged) {
    const auto s = spectrum_of({{1, 0}, {2, 0}, {3, 0}}, {1, 1, 1});
    const std::vector<Complex> f{1.0, -1.0, 0.0};
    const std::vector<Complex> g = project_domain(*s, f, 1);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(g[i] - f[i]), 0.0, 1e-15);
}

TEST(ProjectDomain, FullCodimensionGivesZero) {
    const auto s = spectrum_of({{1, 0}, {2, 0}, {3, 0}}, {1, 1, 1});
    const std::vector<Complex> f{1.0, 2.0, 3.0};
    for (const Complex& c : project_domain(*s, f, 3)) EXPECT_EQ(c, Complex(0, 0));
}

TEST(ProjectDomain, PropertyIdempotentAndOrthogonal) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd;
    const auto s = power_line(80, 6.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Complex> f(s->size());
        for (Complex& c : f) c = {nd(rng), nd(rng)};
        const std::vector<Complex> g = project_domain(*s, f, 2);
        const std::vector<Complex> gg = project_domain(*s, g, 2);
        double diff = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            diff += std::norm(gg[i] - g[i]);
            norm += std::norm(g[i]);
        }
        EXPECT_LE(std::sqrt(diff / norm), 1e-13);
        for (const auto& b : bvectors(*s, 2).vectors) EXPECT_LE(std::abs(inner(g, b)), 1e-13);
    }
}

TEST(ProjectOut, DependentConstraints) {
    const std::vector<std::vector<Complex>> v{{1.0, 1.0, 0.0}, {2.0, 2.0, 0.0}};
    const std::vector<Complex> f{1.0, 0.0, 0.0};
    EXPECT_EQ(kind_of([&] { (void)project_out(v, f); }), ErrorKind::RankDeficient);
}

TEST(DivideAt, RemovesRootAndRejectsNodes) {
    const auto s = spectrum_of({{1, 0}, {2, 0}, {3, 0}}, {1, 1, 1});
    const Complex lambda{0.5, 1.0};
    std::vector<std::vector<Complex>> c{evaluation_vector(*s, lambda)};
    const std::vector<Complex> f = project_out(c, std::vector<Complex>{1.0, 2.0, -1.0});
    EXPECT_NEAR(std::abs(inner(f, evaluation_vector(*s, lambda))), 0.0, 1e-15);
    const std::vector<Complex> g = divide_at(*s, f, lambda);
    // F / (z - lambda) evaluated off the nodes equals F(z) / (z - lambda).
    const Complex z{4.0, -2.0};
    const Complex Fz = inner(f, evaluation_vector(*s, z));
    EXPECT_NEAR(std::abs(inner(g, evaluation_vector(*s, z)) - Fz / (z - lambda)), 0.0, 1e-14);
    EXPECT_EQ(kind_of([&] { (void)divide_at(*s, f, 2.0); }), ErrorKind::PoleHit);
}
