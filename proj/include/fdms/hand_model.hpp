#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fdms/error.hpp"
#include "fdms/joint_subset.hpp"

namespace fdms {

/// Joint angles in radians, indexed like HandModel::joints().
using Posture = Eigen::VectorXd;

enum class Finger { Thumb = 0, Index, Middle, Ring, Pinky };
enum class JointKind { Rotation, MCP, PIP };

inline constexpr std::array<Finger, 5> kAllFingers = {Finger::Thumb, Finger::Index, Finger::Middle,
                                                      Finger::Ring, Finger::Pinky};

constexpr std::string_view to_string(Finger f)
{
    switch (f) {
    case Finger::Thumb: return "Thumb";
    case Finger::Index: return "Index";
    case Finger::Middle: return "Middle";
    case Finger::Ring: return "Ring";
    case Finger::Pinky: return "Pinky";
    }
    return "?";
}

constexpr std::string_view to_string(JointKind k)
{
    switch (k) {
    case JointKind::Rotation: return "Rotation";
    case JointKind::MCP: return "MCP";
    case JointKind::PIP: return "PIP";
    }
    return "?";
}

inline Finger parse_finger(std::string_view s)
{
    for (auto f : kAllFingers)
        if (to_string(f) == s)
            return f;
    fail(ErrorCode::ParseError, "unknown finger '" + std::string(s) + "'");
}

inline JointKind parse_joint_kind(std::string_view s)
{
    for (auto k : {JointKind::Rotation, JointKind::MCP, JointKind::PIP})
        if (to_string(k) == s)
            return k;
    fail(ErrorCode::ParseError, "unknown joint kind '" + std::string(s) + "'");
}

struct JointSpec {
    std::string name;
    Finger finger = Finger::Thumb;
    JointKind kind = JointKind::MCP;
    double limit_lo = 0.0;
    double limit_hi = 0.0;
    double link_length = 0.0; ///< meters, segment distal to this joint
};

/// Planar base pose of one finger chain.
struct PalmFrame {
    Eigen::Vector2d origin = Eigen::Vector2d::Zero();
    double direction = 0.0; ///< radians, heading of the chain at zero angles
};

struct FingerChain {
    std::vector<Eigen::Vector2d> joints; ///< position of each joint, base first
    Eigen::Vector2d tip = Eigen::Vector2d::Zero();
};

using FingerPositions = std::map<Finger, FingerChain>;

/// Kinematic description of a hand. Immutable once constructed; construction
/// validates every invariant.
class HandModel {
public:
    HandModel(std::vector<JointSpec> joints, std::map<Finger, PalmFrame> palm_frames, std::string name = {})
        : name_(std::move(name)), joints_(std::move(joints)), palm_frames_(std::move(palm_frames))
    {
        require(!joints_.empty(), ErrorCode::InvalidModel, "hand model declares no joints");
        std::set<std::string> names;
        for (std::size_t i = 0; i < joints_.size(); ++i) {
            const auto& j = joints_[i];
            require(names.insert(j.name).second, ErrorCode::DuplicateJoint, "duplicate joint name '" + j.name + "'");
            require(std::isfinite(j.limit_lo) && std::isfinite(j.limit_hi) && j.limit_lo < j.limit_hi,
                    ErrorCode::InvalidLimits, "joint '" + j.name + "' needs limit_lo < limit_hi");
            require(std::isfinite(j.link_length) && j.link_length > 0.0, ErrorCode::InvalidModel,
                    "joint '" + j.name + "' needs link_length > 0");
            finger_joints_[static_cast<std::size_t>(j.finger)].push_back(i);
        }
        for (const auto& [finger, frame] : palm_frames_) {
            require(!joints_of(finger).empty(), ErrorCode::EmptyFinger,
                    "finger " + std::string(to_string(finger)) + " has a palm frame but zero joints");
            require(frame.origin.allFinite() && std::isfinite(frame.direction), ErrorCode::InvalidModel,
                    "non-finite palm frame");
        }
        for (auto f : kAllFingers)
            if (!joints_of(f).empty() && !palm_frames_.contains(f))
                palm_frames_[f] = PalmFrame{};
        check_partition();
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t dof() const noexcept { return joints_.size(); }
    const std::vector<JointSpec>& joints() const noexcept { return joints_; }
    const JointSpec& joint(std::size_t i) const { return joints_.at(i); }
    const std::vector<std::size_t>& joints_of(Finger f) const { return finger_joints_[static_cast<std::size_t>(f)]; }
    const std::map<Finger, PalmFrame>& palm_frames() const noexcept { return palm_frames_; }

    std::vector<Finger> fingers() const
    {
        std::vector<Finger> out;
        for (auto f : kAllFingers)
            if (!joints_of(f).empty())
                out.push_back(f);
        return out;
    }

    std::vector<std::string> joint_names() const
    {
        std::vector<std::string> out;
        out.reserve(joints_.size());
        for (const auto& j : joints_)
            out.push_back(j.name);
        return out;
    }

    std::optional<std::size_t> find_joint(std::string_view name) const
    {
        for (std::size_t i = 0; i < joints_.size(); ++i)
            if (joints_[i].name == name)
                return i;
        return std::nullopt;
    }

    std::size_t joint_index(std::string_view name) const
    {
        auto i = find_joint(name);
        require(i.has_value(), ErrorCode::NotFound, "no joint named '" + std::string(name) + "'");
        return *i;
    }

    /// Angles at zero where allowed, otherwise the nearest limit.
    Posture flat_posture() const
    {
        Posture p = Posture::Zero(static_cast<Eigen::Index>(dof()));
        return clamp(p);
    }

    Posture clamp(const Posture& p) const
    {
        check_length(p);
        Posture out = p;
        for (std::size_t i = 0; i < joints_.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            out(idx) = std::clamp(p(idx), joints_[i].limit_lo, joints_[i].limit_hi);
        }
        return out;
    }

    bool within_limits(const Posture& p) const
    {
        check_length(p);
        for (std::size_t i = 0; i < joints_.size(); ++i) {
            const double a = p(static_cast<Eigen::Index>(i));
            if (!(a >= joints_[i].limit_lo && a <= joints_[i].limit_hi))
                return false;
        }
        return true;
    }

    /// Each finger is a planar serial chain rooted at its palm frame; angles
    /// accumulate along the chain.
    FingerPositions forward_kinematics(const Posture& p) const
    {
        check_length(p);
        FingerPositions out;
        for (auto f : fingers()) {
            const auto& frame = palm_frames_.at(f);
            FingerChain chain;
            Eigen::Vector2d point = frame.origin;
            double heading = frame.direction;
            for (auto j : joints_of(f)) {
                chain.joints.push_back(point);
                heading += p(static_cast<Eigen::Index>(j));
                point += joints_[j].link_length * Eigen::Vector2d(std::cos(heading), std::sin(heading));
            }
            chain.tip = point;
            out.emplace(f, std::move(chain));
        }
        return out;
    }

    /// Ascending concatenation of the joints of the given fingers.
    JointSubset joints_for_fingers(const std::set<Finger>& fingers) const
    {
        require(!fingers.empty(), ErrorCode::EmptyAssignment, "finger set must be nonempty");
        std::vector<std::size_t> out;
        for (auto f : fingers)
            out.insert(out.end(), joints_of(f).begin(), joints_of(f).end());
        require(!out.empty(), ErrorCode::EmptyAssignment, "selected fingers have no joints in this model");
        std::sort(out.begin(), out.end());
        return JointSubset(std::move(out));
    }

    void check_length(const Posture& p) const
    {
        require(static_cast<std::size_t>(p.size()) == dof(), ErrorCode::DimensionMismatch,
                "posture has " + std::to_string(p.size()) + " angles, model has " + std::to_string(dof()));
    }

private:
    void check_partition() const
    {
        std::vector<int> seen(joints_.size(), 0);
        for (const auto& list : finger_joints_)
            for (auto j : list)
                ++seen[j];
        for (auto count : seen)
            require(count == 1, ErrorCode::InvalidModel, "finger joint lists must partition the joint set");
    }

    std::string name_;
    std::vector<JointSpec> joints_;
    std::map<Finger, PalmFrame> palm_frames_;
    std::array<std::vector<std::size_t>, 5> finger_joints_;
};

/// Builds a HandModel from its JSON description:
/// `{name?, joints: [{name, finger, kind, limit_lo, limit_hi, link_length}], palm_frames: {Finger: {origin: [x, y], direction}}}`.
inline HandModel load_hand_model(const nlohmann::json& doc)
{
    try {
        require(doc.is_object() && doc.contains("joints") && doc.at("joints").is_array(), ErrorCode::ParseError,
                "hand model needs a 'joints' array");
        std::vector<JointSpec> joints;
        for (const auto& j : doc.at("joints")) {
            JointSpec spec;
            spec.name = j.at("name").get<std::string>();
            spec.finger = parse_finger(j.at("finger").get<std::string>());
            spec.kind = parse_joint_kind(j.at("kind").get<std::string>());
            spec.limit_lo = j.at("limit_lo").get<double>();
            spec.limit_hi = j.at("limit_hi").get<double>();
            spec.link_length = j.at("link_length").get<double>();
            joints.push_back(std::move(spec));
        }
        std::map<Finger, PalmFrame> frames;
        if (doc.contains("palm_frames")) {
            for (const auto& [key, value] : doc.at("palm_frames").items()) {
                const auto& o = value.at("origin");
                require(o.is_array() && o.size() == 2, ErrorCode::ParseError, "palm frame origin must be [x, y]");
                frames[parse_finger(key)] =
                    PalmFrame{Eigen::Vector2d(o[0].get<double>(), o[1].get<double>()), value.at("direction").get<double>()};
            }
        }
        return HandModel(std::move(joints), std::move(frames), doc.value("name", std::string{}));
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("hand model: ") + e.what());
    }
}

inline nlohmann::json to_json(const HandModel& model)
{
    nlohmann::json doc;
    if (!model.name().empty())
        doc["name"] = model.name();
    auto& joints = doc["joints"] = nlohmann::json::array();
    for (const auto& j : model.joints())
        joints.push_back({{"name", j.name},
                          {"finger", to_string(j.finger)},
                          {"kind", to_string(j.kind)},
                          {"limit_lo", j.limit_lo},
                          {"limit_hi", j.limit_hi},
                          {"link_length", j.link_length}});
    auto& frames = doc["palm_frames"] = nlohmann::json::object();
    for (const auto& [finger, frame] : model.palm_frames())
        frames[std::string(to_string(finger))] = {{"origin", {frame.origin.x(), frame.origin.y()}},
                                                  {"direction", frame.direction}};
    return doc;
}

} // namespace fdms
