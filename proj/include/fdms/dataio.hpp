#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdms/builders.hpp"
#include "fdms/content_hash.hpp"
#include "fdms/error.hpp"
#include "fdms/hand_model.hpp"
#include "fdms/posture_sequence.hpp"
#include "fdms/synergy.hpp"

namespace fdms {

// All angles in every file are radians. There is no unit field; degree data
// has to be converted before it gets here.

inline constexpr double kLoadOrthonormalityTolerance = 1e-6;

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::IoError, "cannot open '" + path.string() + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    require(static_cast<bool>(out), ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    const auto text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc)
{
    write_text_file(path, doc.dump(2) + "\n");
}

// ---- postures ---------------------------------------------------------------

inline PostureSequence load_posture_csv(const std::filesystem::path& path)
{
    try {
        return csv::from_csv(read_text_file(path), path.filename().string());
    }
    catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError)
            fail(ErrorCode::ParseError, path.string() + ": " + e.what());
        throw;
    }
}

inline void save_posture_csv(const PostureSequence& seq, const std::filesystem::path& path)
{
    write_text_file(path, csv::to_csv(seq));
}

/// Picks the named columns out of a wider recording, e.g. to map glove
/// channels onto a hand model. Order follows `columns`.
inline PostureSequence select_columns(const PostureSequence& seq, const std::vector<std::string>& columns)
{
    Eigen::MatrixXd out(seq.data.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        auto it = std::find(seq.joint_names.begin(), seq.joint_names.end(), columns[k]);
        require(it != seq.joint_names.end(), ErrorCode::NotFound, "posture data has no column '" + columns[k] + "'");
        out.col(static_cast<Eigen::Index>(k)) = seq.data.col(it - seq.joint_names.begin());
    }
    return PostureSequence(std::move(out), columns, seq.provenance);
}

// ---- hand models ------------------------------------------------------------

inline HandModel load_hand_model_file(const std::filesystem::path& path)
{
    return load_hand_model(read_json_file(path));
}

// ---- synergies --------------------------------------------------------------

/// Contents of one synergy file. FDMS files additionally carry a label and
/// the function assignment that produced the subset.
struct SynergyRecord {
    SynergyModel model;
    std::string label;
    std::optional<FunctionAssignment> assignment;

    static SynergyRecord from(const FDMSModel& m) { return {m.base, m.label, m.assignment}; }
    static SynergyRecord from(SynergyModel m, std::string label = {}) { return {std::move(m), std::move(label), {}}; }

    FDMSModel as_fdms() const
    {
        require(assignment.has_value(), ErrorCode::InvalidModel, "synergy has no function assignment");
        return FDMSModel{model, *assignment, label};
    }
};

namespace detail {

inline nlohmann::json vector_json(const Eigen::VectorXd& v)
{
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& a, const char* what)
{
    require(a.is_array(), ErrorCode::ParseError, std::string(what) + " must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a[i].is_number(), ErrorCode::ParseError, std::string(what) + " must hold numbers");
        v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    }
    return v;
}

} // namespace detail

inline nlohmann::json to_json(const SynergyRecord& rec)
{
    const auto& m = rec.model;
    nlohmann::json doc;
    doc["format"] = "fdms-synergy";
    doc["version"] = 1;
    doc["subset"] = m.subset.indices();
    doc["joint_names"] = m.joint_names;
    doc["centering"] = to_string(m.centering);
    doc["mean"] = detail::vector_json(m.mean);
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.eigenvectors.rows(); ++r)
        for (Eigen::Index c = 0; c < m.eigenvectors.cols(); ++c)
            data.push_back(m.eigenvectors(r, c));
    doc["eigenvectors"] = {{"rows", m.eigenvectors.rows()}, {"cols", m.eigenvectors.cols()}, {"data", data}};
    doc["eigenvalues"] = detail::vector_json(m.eigenvalues);
    doc["hash_algorithm"] = kHashAlgorithm;
    doc["source_hash"] = m.source_hash;
    if (!rec.label.empty())
        doc["label"] = rec.label;
    if (rec.assignment)
        doc["assignment"] = to_json(*rec.assignment);
    return doc;
}

/// Parses and re-validates a synergy document. The hand model resolves the
/// assignment of FDMS files and bounds the subset.
inline SynergyRecord synergy_from_json(const nlohmann::json& doc, const HandModel& hand)
{
    try {
        require(doc.is_object() && doc.value("format", std::string{}) == "fdms-synergy", ErrorCode::ParseError,
                "not a synergy document");
        SynergyRecord rec;
        auto& m = rec.model;
        m.subset = JointSubset(doc.at("subset").get<std::vector<std::size_t>>());
        m.subset.check_within(hand.dof());
        m.joint_names = doc.at("joint_names").get<std::vector<std::string>>();
        m.centering = parse_centering(doc.at("centering").get<std::string>());
        m.mean = detail::vector_from_json(doc.at("mean"), "mean");
        m.eigenvalues = detail::vector_from_json(doc.at("eigenvalues"), "eigenvalues");
        const auto& ev = doc.at("eigenvectors");
        const auto rows = ev.at("rows").get<Eigen::Index>();
        const auto cols = ev.at("cols").get<Eigen::Index>();
        const auto flat = detail::vector_from_json(ev.at("data"), "eigenvectors.data");
        require(rows >= 0 && cols >= 0 && flat.size() == rows * cols, ErrorCode::DimensionMismatch,
                "eigenvector data does not match its declared dimensions");
        m.eigenvectors.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                m.eigenvectors(r, c) = flat(r * cols + c);
        const auto algo = doc.value("hash_algorithm", std::string(kHashAlgorithm));
        require(algo == kHashAlgorithm, ErrorCode::ParseError, "unsupported hash algorithm '" + algo + "'");
        m.source_hash = doc.at("source_hash").get<std::string>();
        validate(m, kLoadOrthonormalityTolerance);
        for (std::size_t k = 0; k < m.subset.size(); ++k)
            require(m.joint_names[k] == hand.joint(m.subset[k]).name, ErrorCode::InvalidModel,
                    "synergy joint '" + m.joint_names[k] + "' does not match hand joint '" +
                        hand.joint(m.subset[k]).name + "'");
        rec.label = doc.value("label", std::string{});
        if (doc.contains("assignment")) {
            rec.assignment = assignment_from_json(doc.at("assignment"), hand);
            require(rec.assignment->resolved_subset() == m.subset, ErrorCode::InvalidModel,
                    "assignment subset differs from the synergy subset");
        }
        return rec;
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("synergy: ") + e.what());
    }
}

inline void save_synergy(const SynergyRecord& rec, const std::filesystem::path& path)
{
    write_json_file(path, to_json(rec));
}

inline SynergyRecord load_synergy(const std::filesystem::path& path, const HandModel& hand)
{
    const auto doc = read_json_file(path);
    try {
        return synergy_from_json(doc, hand);
    }
    catch (const Error& e) {
        fail(e.code(), path.string() + ": " + e.what());
    }
}

} // namespace fdms
