#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fdms/builders.hpp"
#include "fdms/error.hpp"
#include "fdms/hand_model.hpp"
#include "fdms/notation.hpp"
#include "fdms/posture_sequence.hpp"
#include "fdms/switching.hpp"
#include "fdms/synergy.hpp"

namespace fdms {

// Desk-scale stand-in for the glove experiments: seeded synthetic posture
// data, kinematic success predicates for a scissors task and a switch task,
// and the success-rate-versus-components sweep.

enum class TaskKind { Scissors, Switch };

constexpr std::string_view to_string(TaskKind k) { return k == TaskKind::Scissors ? "scissors" : "switch"; }

inline TaskKind parse_task_kind(std::string_view s)
{
    if (s == "scissors")
        return TaskKind::Scissors;
    if (s == "switch")
        return TaskKind::Switch;
    fail(ErrorCode::ParseError, "task must be 'scissors' or 'switch', got '" + std::string(s) + "'");
}

/// Success-predicate parameters of one task. The numbers live in task files.
struct TaskSpec {
    TaskKind kind = TaskKind::Scissors;
    std::size_t grasp_steps = 0;       ///< rows of the grasp phase at the start of every sequence
    std::string manipulation_unit;     ///< functions during manipulation, e.g. "MMMFF"
    std::string grasp_synergy;         ///< database name of the grasp synergy
    std::string fdms_synergy;          ///< database name of the FDMS under test
    double hold_tolerance = 0.0;       ///< epsilon for fixed joints, radians
    // scissors
    std::string opposition_plus;       ///< opposition signal = angle(plus) - angle(minus)
    std::string opposition_minus;
    double open_threshold = 0.0;       ///< signal rise over entry that counts as open
    double close_threshold = 0.0;      ///< signal rise over entry at or below which counts as closed
    std::size_t cycles = 0;
    // switch
    std::string press_joint;
    double press_threshold = 0.0;      ///< required rise of press_joint over entry

    void validate() const
    {
        require(grasp_steps >= 1, ErrorCode::InvalidArgument, "grasp_steps must be positive");
        require(hold_tolerance > 0.0, ErrorCode::InvalidArgument, "hold_tolerance must be > 0");
        FunctionUnit::parse(manipulation_unit);
        require(!grasp_synergy.empty() && !fdms_synergy.empty(), ErrorCode::InvalidArgument,
                "task spec must name its grasp and FDMS synergies");
        if (kind == TaskKind::Scissors) {
            require(open_threshold > 0.0 && close_threshold > 0.0 && close_threshold < open_threshold,
                    ErrorCode::InvalidArgument, "scissors thresholds need 0 < close < open");
            require(cycles >= 1, ErrorCode::InvalidArgument, "cycles must be positive");
            require(!opposition_plus.empty() && !opposition_minus.empty(), ErrorCode::InvalidArgument,
                    "scissors spec needs opposition joints");
        }
        else {
            require(press_threshold > 0.0, ErrorCode::InvalidArgument, "press_threshold must be > 0");
            require(!press_joint.empty(), ErrorCode::InvalidArgument, "switch spec needs a press joint");
        }
    }
};

inline TaskSpec task_spec_from_json(const nlohmann::json& doc)
{
    try {
        TaskSpec s;
        s.kind = parse_task_kind(doc.at("task").get<std::string>());
        s.grasp_steps = doc.at("grasp_steps").get<std::size_t>();
        s.manipulation_unit = doc.at("manipulation_unit").get<std::string>();
        s.grasp_synergy = doc.at("grasp_synergy").get<std::string>();
        s.fdms_synergy = doc.at("fdms_synergy").get<std::string>();
        s.hold_tolerance = doc.at("hold_tolerance").get<double>();
        if (s.kind == TaskKind::Scissors) {
            s.opposition_plus = doc.at("opposition").at("plus").get<std::string>();
            s.opposition_minus = doc.at("opposition").at("minus").get<std::string>();
            s.open_threshold = doc.at("open_threshold").get<double>();
            s.close_threshold = doc.at("close_threshold").get<double>();
            s.cycles = doc.at("cycles").get<std::size_t>();
        }
        else {
            s.press_joint = doc.at("press_joint").get<std::string>();
            s.press_threshold = doc.at("press_threshold").get<double>();
        }
        s.validate();
        return s;
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("task spec: ") + e.what());
    }
}

inline nlohmann::json to_json(const TaskSpec& s)
{
    nlohmann::json doc;
    doc["task"] = to_string(s.kind);
    doc["grasp_steps"] = s.grasp_steps;
    doc["manipulation_unit"] = s.manipulation_unit;
    doc["grasp_synergy"] = s.grasp_synergy;
    doc["fdms_synergy"] = s.fdms_synergy;
    doc["hold_tolerance"] = s.hold_tolerance;
    if (s.kind == TaskKind::Scissors) {
        doc["opposition"] = {{"plus", s.opposition_plus}, {"minus", s.opposition_minus}};
        doc["open_threshold"] = s.open_threshold;
        doc["close_threshold"] = s.close_threshold;
        doc["cycles"] = s.cycles;
    }
    else {
        doc["press_joint"] = s.press_joint;
        doc["press_threshold"] = s.press_threshold;
    }
    return doc;
}

// ---- seeded randomness ------------------------------------------------------

/// mt19937_64 with a hand-rolled Box-Muller transform, so generated data is
/// identical across standard library implementations.
class SeededRng {
public:
    SeededRng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal()
    {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

// ---- synthetic data ---------------------------------------------------------

namespace synth {

inline constexpr std::size_t kGraspTargets = 33;
inline constexpr std::size_t kRampSteps = 10;
inline constexpr double kJitterSigma = 0.02;
/// Bound on the tremor of fingers holding still during manipulation.
inline constexpr double kHoldJitter = 0.01;

/// Hand shape in per-finger terms; mapped onto any model by joint kind.
struct Shape {
    double thumb_rotation = 0.0;
    double thumb_mcp = 0.0;
    std::array<double, 5> mcp{}; ///< indexed by Finger; thumb entry unused
    std::array<double, 5> pip{};
};

inline Posture shape_to_posture(const Shape& s, const HandModel& hand)
{
    Posture p(static_cast<Eigen::Index>(hand.dof()));
    for (std::size_t j = 0; j < hand.dof(); ++j) {
        const auto& spec = hand.joint(j);
        const auto f = static_cast<std::size_t>(spec.finger);
        double v = 0.0;
        if (spec.kind == JointKind::Rotation)
            v = s.thumb_rotation;
        else if (spec.finger == Finger::Thumb)
            v = s.thumb_mcp;
        else if (spec.kind == JointKind::MCP)
            v = s.mcp[f];
        else
            v = s.pip[f];
        p(static_cast<Eigen::Index>(j)) = v;
    }
    return hand.clamp(p);
}

/// The 33 grasp targets: power, precision and lateral families. Their
/// parameters are fixed (independent of the seed); only jitter is seeded.
inline std::vector<Shape> grasp_targets()
{
    std::vector<Shape> out;
    SeededRng rng(0x6772617370ULL, 0); // fixed taxonomy stream
    auto fingers = [&](Shape& s, double mcp_lo, double mcp_hi, double pip_lo, double pip_hi) {
        for (std::size_t f = 1; f < 5; ++f) {
            s.mcp[f] = rng.uniform(mcp_lo, mcp_hi);
            s.pip[f] = rng.uniform(pip_lo, pip_hi);
        }
    };
    for (std::size_t k = 0; k < 13; ++k) { // power
        Shape s;
        s.thumb_rotation = rng.uniform(0.9, 1.3);
        s.thumb_mcp = rng.uniform(0.5, 0.9);
        fingers(s, 0.9, 1.3, 1.0, 1.4);
        out.push_back(s);
    }
    for (std::size_t k = 0; k < 14; ++k) { // precision
        Shape s;
        s.thumb_rotation = rng.uniform(0.7, 1.1);
        s.thumb_mcp = rng.uniform(0.2, 0.5);
        fingers(s, 0.4, 0.8, 0.3, 0.7);
        for (std::size_t f = 3; f < 5; ++f) { // ring and pinky either tucked or extended
            s.mcp[f] = rng.uniform(0.2, 1.2);
            s.pip[f] = rng.uniform(0.2, 1.2);
        }
        out.push_back(s);
    }
    for (std::size_t k = 0; k < 6; ++k) { // lateral
        Shape s;
        s.thumb_rotation = rng.uniform(-0.3, 0.2);
        s.thumb_mcp = rng.uniform(0.6, 1.0);
        fingers(s, 1.0, 1.4, 1.1, 1.4);
        out.push_back(s);
    }
    return out;
}

inline Posture jittered(const Posture& p, SeededRng& rng, double sigma)
{
    Posture out = p;
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out(i) += sigma * rng.normal();
    return out;
}

/// Linear ramp from `from` to `to` over `steps` rows, jitter on every row.
inline std::vector<Posture> ramp(const Posture& from, const Posture& to, std::size_t steps, SeededRng& rng,
                                 const HandModel& hand)
{
    std::vector<Posture> rows;
    for (std::size_t t = 0; t < steps; ++t) {
        const double alpha = steps == 1 ? 1.0 : static_cast<double>(t) / static_cast<double>(steps - 1);
        rows.push_back(hand.clamp(jittered((1.0 - alpha) * from + alpha * to, rng, kJitterSigma)));
    }
    return rows;
}

inline PostureSequence to_sequence(const std::vector<Posture>& rows, const HandModel& hand, std::string tag)
{
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(hand.dof()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        data.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return PostureSequence(std::move(data), hand.joint_names(), std::move(tag));
}

/// Offsets applied to joints of one finger set, by joint role.
struct Motion {
    double thumb_rotation = 0.0;
    double thumb_mcp = 0.0;
    std::array<double, 5> mcp{};
    std::array<double, 5> pip{};
};

inline Posture motion_to_offset(const Motion& m, const HandModel& hand)
{
    Posture p(static_cast<Eigen::Index>(hand.dof()));
    for (std::size_t j = 0; j < hand.dof(); ++j) {
        const auto& spec = hand.joint(j);
        const auto f = static_cast<std::size_t>(spec.finger);
        double v = 0.0;
        if (spec.kind == JointKind::Rotation)
            v = m.thumb_rotation;
        else if (spec.finger == Finger::Thumb)
            v = m.thumb_mcp;
        else if (spec.kind == JointKind::MCP)
            v = m.mcp[f];
        else
            v = m.pip[f];
        p(static_cast<Eigen::Index>(j)) = v;
    }
    return p;
}

} // namespace synth

/// 33 grasp targets, each approached from the flat hand in 10 jittered
/// steps: 330 x d postures. Deterministic for a seed.
inline PostureSequence synthesize_grasp_dataset(const HandModel& hand, std::uint64_t seed)
{
    SeededRng rng(seed, 1);
    const Posture flat = hand.flat_posture();
    std::vector<Posture> rows;
    for (const auto& target : synth::grasp_targets()) {
        auto r = synth::ramp(flat, synth::shape_to_posture(target, hand), synth::kRampSteps, rng, hand);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return synth::to_sequence(rows, hand, "synthetic-grasp seed=" + std::to_string(seed));
}

namespace synth {

inline Shape scissors_grasp()
{
    Shape s;
    s.thumb_rotation = 0.8;
    s.thumb_mcp = 0.55;
    s.mcp = {0.0, 0.45, 0.55, 1.2, 1.2};
    s.pip = {0.0, 0.5, 0.6, 1.3, 1.3};
    return s;
}

inline Shape switch_grasp()
{
    Shape s;
    s.thumb_rotation = 0.5;
    s.thumb_mcp = 0.3;
    s.mcp = {0.0, 0.9, 0.95, 1.0, 1.0};
    s.pip = {0.0, 1.0, 1.05, 1.1, 1.1};
    return s;
}

/// Fully open scissors, relative to the grasp: thumb extends while index
/// and middle flex, separating the handles.
inline Motion scissors_open()
{
    Motion m;
    m.thumb_rotation = -0.15;
    m.thumb_mcp = -0.3;
    m.mcp = {0.0, 0.3, 0.25, 0.0, 0.0};
    m.pip = {0.0, 0.15, 0.1, 0.0, 0.0};
    return m;
}

/// Fully pressed switch, relative to the grasp.
inline Motion switch_press()
{
    Motion m;
    m.thumb_rotation = -0.35;
    m.thumb_mcp = 0.85;
    return m;
}

inline constexpr std::size_t kScissorsCycles = 3;
inline constexpr std::size_t kScissorsCycleSteps = 12;
inline constexpr std::size_t kSwitchPressSteps = 24;
inline constexpr std::size_t kRestSteps = 2;
inline constexpr double kTargetVariation = 0.05;

} // namespace synth

/// Seeded demonstrations of a task: a grasp ramp of `spec.grasp_steps` rows
/// followed by the manipulation segment. Scissors: three open/close cycles of
/// thumb, index and middle. Switch: one thumb press. Fingers whose function
/// is F during manipulation hold their grasp value up to a small bounded
/// tremor; moving joints carry Gaussian jitter.
inline std::vector<PostureSequence> synthesize_task_sequences(const TaskSpec& spec, const HandModel& hand,
                                                              std::uint64_t seed, std::size_t count)
{
    require(count >= 2, ErrorCode::InvalidArgument, "need at least 2 task sequences");
    spec.validate();
    const auto unit = FunctionUnit::parse(spec.manipulation_unit);
    const bool scissors = spec.kind == TaskKind::Scissors;
    const Posture grasp = synth::shape_to_posture(scissors ? synth::scissors_grasp() : synth::switch_grasp(), hand);
    const Posture motion = synth::motion_to_offset(scissors ? synth::scissors_open() : synth::switch_press(), hand);
    const Posture flat = hand.flat_posture();

    std::vector<bool> held(hand.dof());
    for (std::size_t j = 0; j < hand.dof(); ++j)
        held[j] = unit.of(hand.joint(j).finger) == Function::F;

    std::vector<PostureSequence> out;
    for (std::size_t k = 0; k < count; ++k) {
        SeededRng rng(seed, (scissors ? 0x5C00ULL : 0x5E00ULL) + k);
        const Posture target = hand.clamp(synth::jittered(grasp, rng, synth::kTargetVariation));
        auto rows = synth::ramp(flat, target, spec.grasp_steps, rng, hand);
        const Posture hold = rows.back();

        std::vector<double> profile;
        if (scissors) {
            const auto steps = synth::kScissorsCycles * synth::kScissorsCycleSteps;
            for (std::size_t t = 0; t <= steps; ++t) {
                const double s = std::sin(std::numbers::pi * static_cast<double>(t) /
                                          static_cast<double>(synth::kScissorsCycleSteps));
                profile.push_back(s * s);
            }
        }
        else {
            for (std::size_t t = 0; t <= synth::kSwitchPressSteps; ++t)
                profile.push_back(std::sin(std::numbers::pi * static_cast<double>(t) /
                                           static_cast<double>(synth::kSwitchPressSteps)));
        }
        profile.insert(profile.end(), synth::kRestSteps, 0.0);

        for (double u : profile) {
            Posture p = target + u * motion;
            for (std::size_t j = 0; j < hand.dof(); ++j) {
                const auto i = static_cast<Eigen::Index>(j);
                if (held[j])
                    p(i) = hold(i) + rng.uniform(-synth::kHoldJitter, synth::kHoldJitter);
                else
                    p(i) += synth::kJitterSigma * rng.normal();
            }
            rows.push_back(hand.clamp(p));
        }
        out.push_back(synth::to_sequence(rows, hand,
                                         std::string(to_string(spec.kind)) + " seed=" + std::to_string(seed) +
                                             " k=" + std::to_string(k)));
    }
    return out;
}

/// Even-indexed sequences fit the task-specific synergy, odd ones evaluate.
struct TaskSplit {
    std::vector<PostureSequence> fit;
    std::vector<PostureSequence> eval;
};

inline TaskSplit split_by_parity(const std::vector<PostureSequence>& seqs)
{
    TaskSplit s;
    for (std::size_t i = 0; i < seqs.size(); ++i)
        (i % 2 == 0 ? s.fit : s.eval).push_back(seqs[i]);
    return s;
}

// ---- success predicates -----------------------------------------------------

namespace detail {

inline void check_trajectory(const PostureSequence& traj, std::size_t manipulation_start, const HandModel& hand)
{
    require(traj.rows() > 0, ErrorCode::InvalidArgument, "empty trajectory");
    require(traj.cols() == hand.dof(), ErrorCode::DimensionMismatch, "trajectory width differs from the hand model");
    require(manipulation_start < traj.rows(), ErrorCode::OutOfRange, "manipulation segment is empty");
}

/// Every F joint of the manipulation unit stays within tolerance of its value
/// at the first manipulation row.
inline bool holds_fixed_joints(const PostureSequence& traj, std::size_t start, const TaskSpec& spec,
                               const HandModel& hand)
{
    const auto unit = FunctionUnit::parse(spec.manipulation_unit);
    const auto entry = traj.row(start);
    for (std::size_t j = 0; j < hand.dof(); ++j) {
        if (unit.of(hand.joint(j).finger) != Function::F)
            continue;
        const auto i = static_cast<Eigen::Index>(j);
        for (std::size_t t = start; t < traj.rows(); ++t)
            if (std::abs(traj.data(static_cast<Eigen::Index>(t), i) - entry(i)) > spec.hold_tolerance)
                return false;
    }
    return true;
}

} // namespace detail

/// Counts open/close cycles of the thumb-index opposition signal, measured
/// from its value at manipulation entry, and checks the fixed fingers.
inline bool scissors_success(const PostureSequence& traj, std::size_t manipulation_start, const TaskSpec& spec,
                             const HandModel& hand)
{
    detail::check_trajectory(traj, manipulation_start, hand);
    require(spec.kind == TaskKind::Scissors, ErrorCode::InvalidArgument, "not a scissors task spec");
    const auto plus = static_cast<Eigen::Index>(hand.joint_index(spec.opposition_plus));
    const auto minus = static_cast<Eigen::Index>(hand.joint_index(spec.opposition_minus));
    const auto signal = [&](std::size_t t) {
        const auto r = static_cast<Eigen::Index>(t);
        return traj.data(r, plus) - traj.data(r, minus);
    };
    const double entry = signal(manipulation_start);
    std::size_t cycles = 0;
    bool open = false;
    for (std::size_t t = manipulation_start; t < traj.rows(); ++t) {
        const double rise = signal(t) - entry;
        if (!open && rise >= spec.open_threshold)
            open = true;
        else if (open && rise <= spec.close_threshold) {
            open = false;
            ++cycles;
        }
    }
    return cycles >= spec.cycles && detail::holds_fixed_joints(traj, manipulation_start, spec, hand);
}

/// The press joint rises at least press_threshold above its entry value while
/// the fixed fingers hold.
inline bool switch_success(const PostureSequence& traj, std::size_t manipulation_start, const TaskSpec& spec,
                           const HandModel& hand)
{
    detail::check_trajectory(traj, manipulation_start, hand);
    require(spec.kind == TaskKind::Switch, ErrorCode::InvalidArgument, "not a switch task spec");
    const auto press = static_cast<Eigen::Index>(hand.joint_index(spec.press_joint));
    const double entry = traj.data(static_cast<Eigen::Index>(manipulation_start), press);
    bool pressed = false;
    for (std::size_t t = manipulation_start; t < traj.rows() && !pressed; ++t)
        pressed = traj.data(static_cast<Eigen::Index>(t), press) - entry >= spec.press_threshold;
    return pressed && detail::holds_fixed_joints(traj, manipulation_start, spec, hand);
}

inline bool task_success(const PostureSequence& traj, std::size_t manipulation_start, const TaskSpec& spec,
                         const HandModel& hand)
{
    return spec.kind == TaskKind::Scissors ? scissors_success(traj, manipulation_start, spec, hand)
                                           : switch_success(traj, manipulation_start, spec, hand);
}

// ---- evaluation -------------------------------------------------------------

struct ReportRow {
    SynergyKind kind = SynergyKind::Grasp;
    std::string synergy_name;
    std::size_t n_s = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;

    double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials); }
};

struct EvaluationReport {
    std::string task;
    std::uint64_t seed = 0;
    std::string grasp_source_hash; ///< data the grasp synergy was fit on
    std::string eval_data_hash;    ///< evaluation sequences, concatenated
    std::vector<ReportRow> rows;
};

/// The two-phase script used to replay one demonstration: grasp through the
/// grasp synergy, then manipulation through the synergy under test. Both
/// phases use the same number of components (capped by each synergy's size).
inline TaskScript evaluation_script(const TaskSpec& spec, const std::string& synergy, std::size_t n_s,
                                    const SynergyDatabase& db, const HandModel& hand)
{
    const auto& grasp_model = db.lookup(spec.grasp_synergy).record->model;
    const auto& entry = db.lookup(synergy);
    const auto full = FunctionAssignment::resolve(FunctionUnit::parse("MMMMM"), hand);
    const auto manipulation = entry.record->assignment ? *entry.record->assignment : full;
    TaskScript script;
    script.name = std::string(to_string(spec.kind)) + "/" + synergy;
    script.phases.push_back(Phase{"grasp", full, spec.grasp_synergy, std::min(n_s, grasp_model.dim()),
                                  Termination::fixed_steps(spec.grasp_steps)});
    script.phases.push_back(Phase{"manipulation", manipulation, synergy, n_s, Termination::external()});
    return script;
}

/// Replays each evaluation sequence through the switching runtime and counts
/// the trials whose output satisfies the task predicate.
inline ReportRow evaluate_success_rate(const TaskSpec& spec, SynergyKind kind, const std::string& synergy,
                                       const SynergyDatabase& db, const HandModel& hand,
                                       const std::vector<PostureSequence>& eval, std::size_t n_s)
{
    const auto script = evaluation_script(spec, synergy, n_s, db, hand);
    validate_script(script, db);
    ReportRow row{kind, synergy, n_s, 0, 0};
    for (const auto& seq : eval) {
        require(seq.rows() > spec.grasp_steps, ErrorCode::InvalidArgument,
                "evaluation sequence shorter than its grasp phase");
        const std::vector<PostureSequence> inputs = {seq.slice(0, spec.grasp_steps),
                                                     seq.slice(spec.grasp_steps, seq.rows() - spec.grasp_steps)};
        const auto run = run_script(script, db, hand, inputs);
        ++row.trials;
        if (task_success(run.trajectory, run.phase_starts.at(1), spec, hand))
            ++row.successes;
    }
    return row;
}

inline std::string task_specific_name(const TaskSpec& spec) { return "task-" + std::string(to_string(spec.kind)); }

/// Full grid over synergy kinds and component counts. The task-specific
/// synergy is fit here on the even-indexed sequences; the odd ones are
/// replayed.
inline EvaluationReport sweep_components(const TaskSpec& spec, const SynergyDatabase& db, const HandModel& hand,
                                         const std::vector<PostureSequence>& task_sequences, std::uint64_t seed)
{
    spec.validate();
    const auto split = split_by_parity(task_sequences);
    require(!split.eval.empty(), ErrorCode::InsufficientData, "no evaluation sequences");

    SynergyDatabase working = db;
    const auto ts_name = task_specific_name(spec);
    if (!working.contains(ts_name))
        working.register_synergy(ts_name, SynergyKind::TaskSpecific,
                                 SynergyRecord::from(build_task_specific(split.fit)));

    EvaluationReport report;
    report.task = std::string(to_string(spec.kind));
    report.seed = seed;
    report.grasp_source_hash = working.lookup(spec.grasp_synergy).record->model.source_hash;
    report.eval_data_hash = sequence_hash(concatenate(split.eval));

    const std::vector<std::pair<SynergyKind, std::string>> grid = {
        {SynergyKind::Grasp, spec.grasp_synergy},
        {SynergyKind::TaskSpecific, ts_name},
        {SynergyKind::FDMS, spec.fdms_synergy},
    };
    for (const auto& [kind, name] : grid) {
        const auto f = working.lookup(name).record->model.dim();
        for (std::size_t n_s = 1; n_s <= f; ++n_s)
            report.rows.push_back(evaluate_success_rate(spec, kind, name, working, hand, split.eval, n_s));
    }
    return report;
}

inline constexpr std::size_t kDefaultTaskSequences = 20;

/// The database shipped with the tools: one grasp synergy named "grasp" and
/// one FDMS per catalog unit, named by its unit string. All are fit on the
/// same grasp dataset.
inline SynergyDatabase standard_database(const PostureSequence& grasp_seq, const HandModel& hand,
                                         Centering centering = Centering::Centered)
{
    SynergyDatabase db;
    db.register_synergy("grasp", SynergyKind::Grasp,
                        SynergyRecord::from(build_grasp_synergy(grasp_seq, centering), "grasp"));
    for (const auto& unit : fdms_unit_catalog())
        db.register_synergy(unit.str(), SynergyKind::FDMS,
                            SynergyRecord::from(build_fdms(grasp_seq, FunctionAssignment::resolve(unit, hand), centering)));
    return db;
}

} // namespace fdms
