#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fdms/error.hpp"
#include "fdms/joint_subset.hpp"
#include "fdms/posture_sequence.hpp"

namespace fdms {

/// Whether projections act on deviations from the data mean (Centered) or on
/// raw angles (Uncentered, mean fixed at zero).
enum class Centering { Centered, Uncentered };

constexpr std::string_view to_string(Centering c)
{
    return c == Centering::Centered ? "centered" : "uncentered";
}

inline Centering parse_centering(std::string_view s)
{
    if (s == "centered")
        return Centering::Centered;
    if (s == "uncentered")
        return Centering::Uncentered;
    fail(ErrorCode::ParseError, "centering must be 'centered' or 'uncentered', got '" + std::string(s) + "'");
}

/// Negative eigenvalues at or above this are treated as rounding noise.
inline constexpr double kEigenvalueClampTolerance = 1e-12;

/// Principal axes of a posture dataset restricted to a joint subset.
struct SynergyModel {
    JointSubset subset;                   ///< over the source hand's joint space
    std::vector<std::string> joint_names; ///< names of the subset joints, subset order
    Eigen::VectorXd mean;                 ///< f-vector; zero when uncentered
    Eigen::MatrixXd eigenvectors;         ///< f x f, orthonormal columns a_1..a_f
    Eigen::VectorXd eigenvalues;          ///< descending, nonnegative
    Centering centering = Centering::Centered;
    std::string source_hash;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// The first n_s principal axes of a model, ready for projection.
struct SynergyMatrix {
    Eigen::MatrixXd basis; ///< f x n_s
    std::size_t n_s = 0;
    Eigen::VectorXd mean;
    JointSubset subset;
    Centering centering = Centering::Centered;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(basis.rows()); }
};

namespace detail {

// Largest-magnitude entry positive; the first such entry wins ties.
inline void normalize_sign(Eigen::Ref<Eigen::VectorXd> v)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(best)))
            best = i;
    if (v(best) < 0.0)
        v = -v;
}

inline Eigen::Index dominant_axis(const Eigen::VectorXd& v)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(best)))
            best = i;
    return best;
}

} // namespace detail

/// Sample covariance (normalized by n - 1) of the rows of `data` about `mean`.
inline Eigen::MatrixXd covariance(const Eigen::MatrixXd& data, const Eigen::VectorXd& mean)
{
    const Eigen::MatrixXd deviations = data.rowwise() - mean.transpose();
    return (deviations.transpose() * deviations) / static_cast<double>(data.rows() - 1);
}

/// PCA by eigendecomposition of the sample covariance.
///
/// Eigenvalues come back in descending order with rounding negatives clamped
/// to zero. Each eigenvector's largest-magnitude entry is positive; exactly
/// equal eigenvalues are ordered by the index of their dominant axis. The
/// result is a deterministic function of the input bits.
inline SynergyModel fit_pca(const PostureSequence& seq, Centering centering = Centering::Centered)
{
    require(seq.rows() >= 2, ErrorCode::InsufficientData,
            "PCA needs at least 2 postures, got " + std::to_string(seq.rows()));
    require(seq.cols() >= 1, ErrorCode::InsufficientData, "PCA needs at least one joint");
    require(seq.data.allFinite(), ErrorCode::NonFiniteData, "posture data contains non-finite values");

    const auto f = seq.data.cols();
    Eigen::VectorXd mean = centering == Centering::Centered ? Eigen::VectorXd(seq.data.colwise().mean().transpose())
                                                            : Eigen::VectorXd::Zero(f);
    const Eigen::MatrixXd cov = covariance(seq.data, mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::ComputeEigenvectors);
    require(solver.info() == Eigen::Success, ErrorCode::NonConvergence, "symmetric eigensolver did not converge");

    Eigen::VectorXd values = solver.eigenvalues();
    Eigen::MatrixXd vectors = solver.eigenvectors();
    for (Eigen::Index i = 0; i < f; ++i) {
        if (values(i) < 0.0) {
            require(values(i) >= -kEigenvalueClampTolerance, ErrorCode::NegativeEigenvalue,
                    "covariance has a negative eigenvalue " + csv::format_double(values(i)));
            values(i) = 0.0;
        }
        detail::normalize_sign(vectors.col(i));
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(f));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::vector<Eigen::Index> axis(static_cast<std::size_t>(f));
    for (Eigen::Index i = 0; i < f; ++i)
        axis[static_cast<std::size_t>(i)] = detail::dominant_axis(vectors.col(i));
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values(a) != values(b))
            return values(a) > values(b);
        return axis[static_cast<std::size_t>(a)] < axis[static_cast<std::size_t>(b)];
    });

    SynergyModel model;
    model.subset = JointSubset::full(static_cast<std::size_t>(f));
    model.joint_names = seq.joint_names;
    model.mean = std::move(mean);
    model.eigenvalues.resize(f);
    model.eigenvectors.resize(f, f);
    for (Eigen::Index k = 0; k < f; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        model.eigenvalues(k) = values(src);
        model.eigenvectors.col(k) = vectors.col(src);
    }
    model.centering = centering;
    model.source_hash = sequence_hash(seq);
    return model;
}

inline SynergyMatrix synergy_matrix(const SynergyModel& model, std::size_t n_s)
{
    require(n_s >= 1 && n_s <= model.dim(), ErrorCode::OutOfRange,
            "n_s must be in [1, " + std::to_string(model.dim()) + "], got " + std::to_string(n_s));
    SynergyMatrix s;
    s.basis = model.eigenvectors.leftCols(static_cast<Eigen::Index>(n_s));
    s.n_s = n_s;
    s.mean = model.mean;
    s.subset = model.subset;
    s.centering = model.centering;
    return s;
}

/// Synergy-space coordinates of a subvector posture.
inline Eigen::VectorXd coefficients(const SynergyMatrix& s, const Eigen::VectorXd& p)
{
    require(static_cast<std::size_t>(p.size()) == s.dim(), ErrorCode::DimensionMismatch,
            "posture has " + std::to_string(p.size()) + " angles, synergy expects " + std::to_string(s.dim()));
    if (s.centering == Centering::Centered)
        return s.basis.transpose() * (p - s.mean);
    return s.basis.transpose() * p;
}

inline Eigen::VectorXd decode(const SynergyMatrix& s, const Eigen::VectorXd& z)
{
    require(static_cast<std::size_t>(z.size()) == s.n_s, ErrorCode::DimensionMismatch,
            "coefficient vector has " + std::to_string(z.size()) + " entries, synergy has n_s=" +
                std::to_string(s.n_s));
    if (s.centering == Centering::Centered)
        return s.mean + s.basis * z;
    return s.basis * z;
}

/// Orthogonal projection onto the (affine, when centered) synergy span.
inline Eigen::VectorXd project_posture(const SynergyMatrix& s, const Eigen::VectorXd& p)
{
    return decode(s, coefficients(s, p));
}

inline PostureSequence approximate_sequence(const SynergyMatrix& s, const PostureSequence& seq)
{
    require(seq.cols() == s.dim(), ErrorCode::DimensionMismatch,
            "sequence has " + std::to_string(seq.cols()) + " columns, synergy expects " + std::to_string(s.dim()));
    Eigen::MatrixXd out(seq.data.rows(), seq.data.cols());
    for (Eigen::Index i = 0; i < seq.data.rows(); ++i)
        out.row(i) = project_posture(s, seq.data.row(i).transpose()).transpose();
    return PostureSequence(std::move(out), seq.joint_names, seq.provenance);
}

/// Sum of squared reconstruction residuals divided by (n - 1), matching the
/// covariance normalization so that on the training set it equals the sum of
/// the discarded eigenvalues.
inline double reconstruction_mse(const SynergyMatrix& s, const PostureSequence& seq)
{
    require(seq.rows() >= 2, ErrorCode::InsufficientData, "reconstruction error needs at least 2 postures");
    const auto approx = approximate_sequence(s, seq);
    return (seq.data - approx.data).squaredNorm() / static_cast<double>(seq.rows() - 1);
}

/// lambda_i / sum(lambda).
inline Eigen::VectorXd contribution_ratios(const SynergyModel& model)
{
    const double total = model.eigenvalues.sum();
    require(total > 0.0, ErrorCode::DegenerateVariance, "total variance is zero");
    return model.eigenvalues / total;
}

inline double cumulative_contribution(const SynergyModel& model, std::size_t k)
{
    require(k <= model.dim(), ErrorCode::OutOfRange, "k exceeds the number of components");
    const auto ratios = contribution_ratios(model);
    return ratios.head(static_cast<Eigen::Index>(k)).sum();
}

/// Smallest k whose cumulative contribution reaches `threshold`.
inline std::size_t min_components_for_ratio(const SynergyModel& model, double threshold)
{
    require(threshold > 0.0 && threshold <= 1.0, ErrorCode::InvalidArgument, "threshold must be in (0, 1]");
    const auto ratios = contribution_ratios(model);
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < ratios.size(); ++k) {
        cumulative += ratios(k);
        if (cumulative >= threshold)
            return static_cast<std::size_t>(k + 1);
    }
    // Rounding can leave the full sum a hair under 1.
    return model.dim();
}

/// Structural checks applied to every model, including ones read from disk.
inline void validate(const SynergyModel& model, double orthonormality_tolerance = 1e-9)
{
    const auto f = static_cast<Eigen::Index>(model.subset.size());
    require(f >= 1, ErrorCode::InvalidModel, "synergy has no joints");
    require(model.mean.size() == f && model.eigenvalues.size() == f && model.eigenvectors.rows() == f &&
                model.eigenvectors.cols() == f && static_cast<Eigen::Index>(model.joint_names.size()) == f,
            ErrorCode::DimensionMismatch, "synergy dimensions disagree with its joint subset");
    require(model.mean.allFinite() && model.eigenvalues.allFinite() && model.eigenvectors.allFinite(),
            ErrorCode::NonFiniteData, "synergy contains non-finite values");
    for (Eigen::Index i = 0; i < f; ++i) {
        require(model.eigenvalues(i) >= 0.0, ErrorCode::NegativeEigenvalue, "negative eigenvalue in synergy");
        if (i > 0)
            require(model.eigenvalues(i) <= model.eigenvalues(i - 1), ErrorCode::InvalidModel,
                    "eigenvalues must be sorted descending");
    }
    if (model.centering == Centering::Uncentered)
        require(model.mean.isZero(0.0), ErrorCode::InvalidModel, "uncentered synergy must have a zero mean");
    const Eigen::MatrixXd gram = model.eigenvectors.transpose() * model.eigenvectors;
    const double deviation = (gram - Eigen::MatrixXd::Identity(f, f)).cwiseAbs().maxCoeff();
    require(deviation <= orthonormality_tolerance, ErrorCode::CorruptFile,
            "eigenvectors are not orthonormal (max deviation " + csv::format_double(deviation) + ")");
}

} // namespace fdms
