#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fdms/content_hash.hpp"
#include "fdms/error.hpp"
#include "fdms/joint_subset.hpp"

namespace fdms {

/// n postures stacked row-wise (n x d, radians).
struct PostureSequence {
    Eigen::MatrixXd data;
    std::vector<std::string> joint_names;
    std::string provenance;

    PostureSequence() = default;

    PostureSequence(Eigen::MatrixXd rows, std::vector<std::string> names, std::string tag = {})
        : data(std::move(rows)), joint_names(std::move(names)), provenance(std::move(tag))
    {
        require(static_cast<std::size_t>(data.cols()) == joint_names.size(), ErrorCode::DimensionMismatch,
                "sequence has " + std::to_string(data.cols()) + " columns but " +
                    std::to_string(joint_names.size()) + " joint names");
    }

    std::size_t rows() const noexcept { return static_cast<std::size_t>(data.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(data.cols()); }
    Eigen::VectorXd row(std::size_t i) const { return data.row(static_cast<Eigen::Index>(i)).transpose(); }

    /// Rows [first, first + count).
    PostureSequence slice(std::size_t first, std::size_t count) const
    {
        require(first + count <= rows(), ErrorCode::OutOfRange, "slice beyond sequence end");
        return PostureSequence(data.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)),
                               joint_names, provenance);
    }
};

/// Columns of `seq` selected by `subset`, in subset order.
inline PostureSequence extract_subvector(const PostureSequence& seq, const JointSubset& subset)
{
    subset.check_within(seq.cols());
    Eigen::MatrixXd out(seq.data.rows(), static_cast<Eigen::Index>(subset.size()));
    std::vector<std::string> names;
    names.reserve(subset.size());
    for (std::size_t k = 0; k < subset.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = seq.data.col(static_cast<Eigen::Index>(subset[k]));
        names.push_back(seq.joint_names[subset[k]]);
    }
    return PostureSequence(std::move(out), std::move(names), seq.provenance);
}

inline Eigen::VectorXd extract_subvector(const Eigen::VectorXd& p, const JointSubset& subset)
{
    subset.check_within(static_cast<std::size_t>(p.size()));
    Eigen::VectorXd out(static_cast<Eigen::Index>(subset.size()));
    for (std::size_t k = 0; k < subset.size(); ++k)
        out(static_cast<Eigen::Index>(k)) = p(static_cast<Eigen::Index>(subset[k]));
    return out;
}

/// Row-wise concatenation; all parts must share joint names.
inline PostureSequence concatenate(const std::vector<PostureSequence>& parts)
{
    require(!parts.empty(), ErrorCode::InvalidArgument, "nothing to concatenate");
    Eigen::Index total = 0;
    for (const auto& p : parts) {
        require(p.cols() == parts.front().cols(), ErrorCode::DimensionMismatch,
                "sequences differ in width (" + std::to_string(p.cols()) + " vs " +
                    std::to_string(parts.front().cols()) + ")");
        total += p.data.rows();
    }
    Eigen::MatrixXd out(total, parts.front().data.cols());
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.middleRows(at, p.data.rows()) = p.data;
        at += p.data.rows();
    }
    return PostureSequence(std::move(out), parts.front().joint_names, "concat");
}

namespace csv {

/// 17 significant digits, so values parse back bit-exactly.
inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string to_csv(const PostureSequence& seq)
{
    std::string out;
    for (std::size_t j = 0; j < seq.joint_names.size(); ++j) {
        if (j)
            out.push_back(',');
        out += seq.joint_names[j];
    }
    out.push_back('\n');
    for (Eigen::Index i = 0; i < seq.data.rows(); ++i) {
        for (Eigen::Index j = 0; j < seq.data.cols(); ++j) {
            if (j)
                out.push_back(',');
            out += format_double(seq.data(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

inline std::vector<std::string_view> split_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    for (auto& c : cells) {
        while (!c.empty() && (c.front() == ' ' || c.front() == '\t'))
            c.remove_prefix(1);
        while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r'))
            c.remove_suffix(1);
    }
    return cells;
}

/// Parses the posture CSV format: a header of joint names, then one posture
/// per row in radians. Errors name the 1-based data row and column.
inline PostureSequence from_csv(std::string_view text, std::string provenance = {})
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    require(!lines.empty(), ErrorCode::ParseError, "empty posture file");

    std::vector<std::string> names;
    for (auto c : split_row(lines.front())) {
        require(!c.empty(), ErrorCode::ParseError, "empty joint name in header");
        names.emplace_back(c);
    }
    const std::size_t d = names.size();
    const std::size_t n = lines.size() - 1;
    Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        auto cells = split_row(lines[i + 1]);
        require(cells.size() == d, ErrorCode::ParseError,
                "row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(d));
        for (std::size_t j = 0; j < d; ++j) {
            double v = 0.0;
            auto cell = cells[j];
            if (!cell.empty() && cell.front() == '+')
                cell.remove_prefix(1);
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            require(ec == std::errc{} && ptr == cell.data() + cell.size() && !cell.empty() && std::isfinite(v),
                    ErrorCode::ParseError,
                    "non-numeric cell at row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1) + ": '" +
                        std::string(cells[j]) + "'");
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return PostureSequence(std::move(data), std::move(names), std::move(provenance));
}

} // namespace csv

/// Digest of the canonical CSV encoding; identifies the data a model was fit on.
inline std::string sequence_hash(const PostureSequence& seq)
{
    return content_hash(csv::to_csv(seq));
}

} // namespace fdms
