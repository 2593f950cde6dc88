#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace fdms;

namespace {

PostureSequence from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    Eigen::MatrixXd m(rows.size(), rows.begin()->size());
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row)
            m(r, c++) = v;
        ++r;
    }
    std::vector<std::string> names;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        names.push_back("q" + std::to_string(c));
    return PostureSequence(m, names);
}

SynergyModel diagonal_model(const Eigen::VectorXd& eigenvalues)
{
    const auto f = eigenvalues.size();
    SynergyModel m;
    m.subset = JointSubset::full(static_cast<std::size_t>(f));
    for (Eigen::Index i = 0; i < f; ++i)
        m.joint_names.push_back("q" + std::to_string(i));
    m.mean = Eigen::VectorXd::Zero(f);
    m.eigenvectors = Eigen::MatrixXd::Identity(f, f);
    m.eigenvalues = eigenvalues;
    return m;
}

} // namespace

TEST(Synergy, MatchesJacobiOracle)
{
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const auto seq = test::random_dataset(seed, 40, 6);
        const auto model = fit_pca(seq);
        const auto ref = oracle::jacobi_eigen(oracle::sample_covariance(test::to_rows(seq.data)));
        for (Eigen::Index k = 0; k < 6; ++k) {
            EXPECT_NEAR(model.eigenvalues(k), ref.values[k], 1e-8);
            const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(ref.vectors[k].data(), 6);
            EXPECT_LT(test::sign_free_distance(model.eigenvectors.col(k), v), 1e-8);
        }
    }
}

TEST(Synergy, RankOneLineGivesSingleComponent)
{
    const auto seq = from_rows({{0, 0}, {1, 2}, {2, 4}, {3, 6}});
    const auto model = fit_pca(seq);
    Eigen::Vector2d expected(1.0, 2.0);
    expected /= std::sqrt(5.0);
    EXPECT_LT((model.eigenvectors.col(0) - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(model.eigenvalues(1), 0.0, 1e-12);
    EXPECT_GT(model.eigenvalues(0), 0.0);
    EXPECT_NEAR(reconstruction_mse(synergy_matrix(model, 1), seq), 0.0, 1e-20);
}

TEST(Synergy, SignConventionMakesLargestEntryPositive)
{
    const auto model = fit_pca(test::random_dataset(5, 30, 5));
    for (Eigen::Index k = 0; k < model.eigenvectors.cols(); ++k) {
        Eigen::Index arg;
        model.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(model.eigenvectors(arg, k), 0.0);
    }
}

TEST(Synergy, CumulativeContributionAndThreshold)
{
    Eigen::VectorXd ev(4);
    ev << 4, 3, 2, 1;
    const auto m = diagonal_model(ev);
    EXPECT_NEAR(cumulative_contribution(m, 2), 0.7, 1e-15);
    EXPECT_EQ(min_components_for_ratio(m, 0.8), 3u);
    EXPECT_EQ(min_components_for_ratio(m, 0.7), 2u);
    EXPECT_EQ(min_components_for_ratio(m, 1.0), 4u);
    EXPECT_NEAR(contribution_ratios(m).sum(), 1.0, 1e-15);
}

TEST(Synergy, ZeroVarianceIsDegenerate)
{
    const auto seq = from_rows({{1, 2}, {1, 2}, {1, 2}});
    const auto model = fit_pca(seq);
    try {
        contribution_ratios(model);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateVariance);
    }
}

TEST(Synergy, RejectsTooFewRowsAndNonFinite)
{
    try {
        fit_pca(from_rows({{1, 2}}));
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
    }
    auto seq = from_rows({{1, 2}, {3, 4}, {5, 7}});
    seq.data(1, 1) = std::nan("");
    try {
        fit_pca(seq);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFiniteData);
    }
}

TEST(Synergy, NsOutOfRange)
{
    const auto model = fit_pca(test::random_dataset(1, 20, 4));
    EXPECT_THROW(synergy_matrix(model, 0), Error);
    EXPECT_THROW(synergy_matrix(model, 5), Error);
    EXPECT_NO_THROW(synergy_matrix(model, 4));
}

TEST(Synergy, ProjectionIsIdempotentAndFullRankIsIdentity)
{
    const auto seq = test::random_dataset(9, 30, 5);
    for (auto centering : {Centering::Centered, Centering::Uncentered}) {
        const auto model = fit_pca(seq, centering);
        for (std::size_t ns = 1; ns <= 5; ++ns) {
            const auto s = synergy_matrix(model, ns);
            const Eigen::MatrixXd sts = s.basis.transpose() * s.basis;
            EXPECT_LT((sts - Eigen::MatrixXd::Identity(ns, ns)).cwiseAbs().maxCoeff(), 1e-9);
            const Eigen::MatrixXd p = s.basis * s.basis.transpose();
            EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-9);
            for (std::size_t i = 0; i < seq.rows(); i += 7) {
                const auto once = project_posture(s, seq.row(i));
                EXPECT_LT((project_posture(s, once) - once).cwiseAbs().maxCoeff(), 1e-9);
            }
        }
        const auto full = synergy_matrix(model, 5);
        EXPECT_LT((approximate_sequence(full, seq).data - seq.data).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Synergy, UncenteredModelHasZeroMean)
{
    const auto model = fit_pca(test::random_dataset(2, 25, 3), Centering::Uncentered);
    EXPECT_TRUE(model.mean.isZero(0.0));
    EXPECT_NO_THROW(validate(model));
}

TEST(Synergy, TrainingErrorEqualsDiscardedVariance)
{
    const auto seq = test::random_dataset(11, 60, 7);
    const auto model = fit_pca(seq);
    for (std::size_t ns = 1; ns <= 7; ++ns) {
        const double tail = model.eigenvalues.tail(7 - static_cast<Eigen::Index>(ns)).sum();
        EXPECT_NEAR(reconstruction_mse(synergy_matrix(model, ns), seq), tail, 1e-8);
    }
}

TEST(Synergy, FitIsBitDeterministic)
{
    const auto seq = test::random_dataset(4, 50, 10);
    const auto a = fit_pca(seq), b = fit_pca(seq);
    EXPECT_EQ(a.eigenvectors, b.eigenvectors);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.source_hash, b.source_hash);
}

TEST(Synergy, TiesAreOrderedByDominantAxis)
{
    // Isotropic in the plane: both eigenvalues equal, eigenvectors the axes.
    const auto seq = from_rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
    const auto model = fit_pca(seq);
    EXPECT_EQ(model.eigenvalues(0), model.eigenvalues(1));
    Eigen::Index a0, a1;
    model.eigenvectors.col(0).cwiseAbs().maxCoeff(&a0);
    model.eigenvectors.col(1).cwiseAbs().maxCoeff(&a1);
    EXPECT_LT(a0, a1);
}

TEST(Synergy, ValidateRejectsNonOrthonormal)
{
    auto model = fit_pca(test::random_dataset(6, 20, 3));
    model.eigenvectors(0, 0) += 1e-3;
    try {
        validate(model);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CorruptFile);
    }
}

TEST(Synergy, CoefficientLengthChecked)
{
    const auto s = synergy_matrix(fit_pca(test::random_dataset(6, 20, 3)), 2);
    EXPECT_THROW(decode(s, Eigen::VectorXd::Zero(3)), Error);
    EXPECT_THROW(coefficients(s, Eigen::VectorXd::Zero(2)), Error);
}
