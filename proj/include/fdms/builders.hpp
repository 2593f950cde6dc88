#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdms/error.hpp"
#include "fdms/hand_model.hpp"
#include "fdms/notation.hpp"
#include "fdms/posture_sequence.hpp"
#include "fdms/synergy.hpp"

namespace fdms {

/// Per-finger M/F functions, optionally refined joint by joint, resolved
/// against a hand model into the set of manipulated joints.
class FunctionAssignment {
public:
    /// `joint_overrides` maps joint names to a function that replaces the
    /// one inherited from the joint's finger.
    static FunctionAssignment resolve(const FunctionUnit& unit, const HandModel& model,
                                      std::map<std::string, Function> joint_overrides = {})
    {
        for (const auto& [name, fn] : joint_overrides)
            require(model.find_joint(name).has_value(), ErrorCode::NotFound,
                    "assignment override names unknown joint '" + name + "'");
        std::vector<std::size_t> subset;
        for (std::size_t j = 0; j < model.dof(); ++j) {
            const auto& spec = model.joint(j);
            Function fn = unit.of(spec.finger);
            if (auto it = joint_overrides.find(spec.name); it != joint_overrides.end())
                fn = it->second;
            if (fn == Function::M)
                subset.push_back(j);
        }
        require(!subset.empty(), ErrorCode::EmptyAssignment,
                "assignment '" + unit.str() + "' selects no joints on this hand model");
        FunctionAssignment a(unit);
        a.overrides_ = std::move(joint_overrides);
        a.subset_ = JointSubset(std::move(subset));
        return a;
    }

    const FunctionUnit& unit() const noexcept { return unit_; }
    const std::map<std::string, Function>& joint_overrides() const noexcept { return overrides_; }
    const JointSubset& resolved_subset() const noexcept { return subset_; }

    friend bool operator==(const FunctionAssignment&, const FunctionAssignment&) = default;

private:
    explicit FunctionAssignment(FunctionUnit u) : unit_(u) {}

    FunctionUnit unit_;
    std::map<std::string, Function> overrides_;
    JointSubset subset_;
};

/// JSON form: either a bare unit string ("MMMFF") or
/// `{unit, joints: {name: "M"|"F"}}` for per-joint tables.
inline nlohmann::json to_json(const FunctionAssignment& a)
{
    if (a.joint_overrides().empty())
        return a.unit().str();
    nlohmann::json joints = nlohmann::json::object();
    for (const auto& [name, fn] : a.joint_overrides())
        joints[name] = std::string(1, static_cast<char>(fn));
    return {{"unit", a.unit().str()}, {"joints", joints}};
}

inline FunctionAssignment assignment_from_json(const nlohmann::json& doc, const HandModel& model)
{
    try {
        if (doc.is_string())
            return FunctionAssignment::resolve(FunctionUnit::parse(doc.get<std::string>()), model);
        require(doc.is_object(), ErrorCode::ParseError, "assignment must be a unit string or an object");
        std::map<std::string, Function> overrides;
        if (doc.contains("joints")) {
            for (const auto& [name, value] : doc.at("joints").items()) {
                const auto s = value.get<std::string>();
                require(s == "M" || s == "F", ErrorCode::InvalidSymbol, "joint function must be M or F, got '" + s + "'");
                overrides[name] = static_cast<Function>(s[0]);
            }
        }
        return FunctionAssignment::resolve(FunctionUnit::parse(doc.at("unit").get<std::string>()), model,
                                           std::move(overrides));
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("assignment: ") + e.what());
    }
}

/// A synergy fit on grasp postures restricted to the manipulated joints.
struct FDMSModel {
    SynergyModel base;
    FunctionAssignment assignment;
    std::string label;
};

inline SynergyModel build_grasp_synergy(const PostureSequence& grasp_seq, Centering centering = Centering::Centered)
{
    return fit_pca(grasp_seq, centering);
}

/// Task recordings are stacked row-wise before fitting; PCA is order-invariant.
inline SynergyModel build_task_specific(const std::vector<PostureSequence>& task_seqs,
                                        Centering centering = Centering::Centered)
{
    require(!task_seqs.empty(), ErrorCode::InvalidArgument, "task-specific synergy needs at least one sequence");
    if (task_seqs.size() == 1)
        return fit_pca(task_seqs.front(), centering);
    return fit_pca(concatenate(task_seqs), centering);
}

inline FDMSModel build_fdms(const PostureSequence& grasp_seq, const FunctionAssignment& assignment,
                            Centering centering = Centering::Centered)
{
    const auto& subset = assignment.resolved_subset();
    auto base = fit_pca(extract_subvector(grasp_seq, subset), centering);
    base.subset = subset;
    return FDMSModel{std::move(base), assignment, assignment.unit().str()};
}

} // namespace fdms
