#pragma once

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fdms/builders.hpp"
#include "fdms/dataio.hpp"
#include "fdms/error.hpp"
#include "fdms/hand_model.hpp"
#include "fdms/synergy.hpp"

namespace fdms {

enum class SynergyKind { Grasp, TaskSpecific, FDMS };

constexpr std::string_view to_string(SynergyKind k)
{
    switch (k) {
    case SynergyKind::Grasp: return "grasp";
    case SynergyKind::TaskSpecific: return "task-specific";
    case SynergyKind::FDMS: return "fdms";
    }
    return "?";
}

inline SynergyKind parse_synergy_kind(std::string_view s)
{
    for (auto k : {SynergyKind::Grasp, SynergyKind::TaskSpecific, SynergyKind::FDMS})
        if (to_string(k) == s)
            return k;
    fail(ErrorCode::ParseError, "unknown synergy kind '" + std::string(s) + "'");
}

// ---- synergy database -------------------------------------------------------

struct DatabaseEntry {
    SynergyKind kind = SynergyKind::FDMS;
    std::shared_ptr<const SynergyRecord> record;
};

/// Named synergies prepared ahead of a task. Persisted as a directory holding
/// `index.json` plus one synergy file per entry under `synergies/`.
class SynergyDatabase {
public:
    void register_synergy(const std::string& name, SynergyKind kind, SynergyRecord record)
    {
        check_name(name);
        require(!entries_.contains(name), ErrorCode::DuplicateName, "synergy '" + name + "' already registered");
        validate(record.model);
        entries_.emplace(name, DatabaseEntry{kind, std::make_shared<const SynergyRecord>(std::move(record))});
    }

    const DatabaseEntry& lookup(const std::string& name) const
    {
        auto it = entries_.find(name);
        require(it != entries_.end(), ErrorCode::NotFound, "no synergy named '" + name + "'");
        return it->second;
    }

    bool contains(const std::string& name) const { return entries_.contains(name); }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, DatabaseEntry>& entries() const noexcept { return entries_; }

    std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        for (const auto& [name, entry] : entries_)
            out.push_back(name);
        return out;
    }

    static std::string relative_file(const std::string& name) { return "synergies/" + name + ".json"; }

    void save(const std::filesystem::path& dir) const
    {
        std::filesystem::create_directories(dir / "synergies");
        nlohmann::json index;
        index["format"] = "fdms-database";
        index["version"] = 1;
        auto& list = index["entries"] = nlohmann::json::array();
        for (const auto& [name, entry] : entries_) {
            const auto file = relative_file(name);
            save_synergy(*entry.record, dir / file);
            list.push_back({{"name", name}, {"file", file}, {"kind", to_string(entry.kind)}});
        }
        write_json_file(dir / "index.json", index);
    }

    static SynergyDatabase load(const std::filesystem::path& dir, const HandModel& hand)
    {
        const auto index = read_json_file(dir / "index.json");
        SynergyDatabase db;
        try {
            require(index.is_object() && index.value("format", std::string{}) == "fdms-database" &&
                        index.contains("entries") && index.at("entries").is_array(),
                    ErrorCode::CorruptFile, (dir / "index.json").string() + ": not a synergy database index");
            for (const auto& e : index.at("entries")) {
                const auto name = e.at("name").get<std::string>();
                const auto file = e.at("file").get<std::string>();
                require(!file.empty() && std::filesystem::path(file).is_relative(), ErrorCode::CorruptFile,
                        "index entry '" + name + "' must reference a relative path");
                require(std::filesystem::exists(dir / file), ErrorCode::CorruptFile,
                        "index entry '" + name + "' references missing file '" + file + "'");
                db.register_synergy(name, parse_synergy_kind(e.at("kind").get<std::string>()),
                                    load_synergy(dir / file, hand));
            }
        }
        catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::CorruptFile, (dir / "index.json").string() + ": " + e.what());
        }
        return db;
    }

private:
    static void check_name(const std::string& name)
    {
        require(!name.empty(), ErrorCode::InvalidArgument, "synergy name must be nonempty");
        for (char c : name)
            require(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.',
                    ErrorCode::InvalidArgument, "synergy name '" + name + "' may only use [A-Za-z0-9_.-]");
        require(name != "." && name != "..", ErrorCode::InvalidArgument, "invalid synergy name");
    }

    std::map<std::string, DatabaseEntry> entries_;
};

// ---- task scripts -----------------------------------------------------------

struct Termination {
    enum class Kind { FixedSteps, ExternalSignal };
    Kind kind = Kind::ExternalSignal;
    std::size_t steps = 0;

    static Termination fixed_steps(std::size_t k) { return {Kind::FixedSteps, k}; }
    static Termination external() { return {Kind::ExternalSignal, 0}; }
};

struct Phase {
    std::string name;
    FunctionAssignment assignment;
    std::string synergy;
    std::size_t n_s = 1;
    Termination termination;
};

struct TaskScript {
    std::string name;
    std::vector<Phase> phases;
};

/// Checks a phase against the database: the synergy exists, its subset is the
/// assignment's, and n_s fits.
inline void validate_phase(const Phase& phase, const SynergyDatabase& db)
{
    const auto& entry = db.lookup(phase.synergy);
    const auto& model = entry.record->model;
    require(model.subset == phase.assignment.resolved_subset(), ErrorCode::InvalidArgument,
            "phase '" + phase.name + "': assignment '" + phase.assignment.unit().str() +
                "' does not match the joint subset of synergy '" + phase.synergy + "'");
    require(phase.n_s >= 1 && phase.n_s <= model.dim(), ErrorCode::OutOfRange,
            "phase '" + phase.name + "': n_s=" + std::to_string(phase.n_s) + " outside [1, " +
                std::to_string(model.dim()) + "]");
}

inline void validate_script(const TaskScript& script, const SynergyDatabase& db)
{
    require(!script.phases.empty(), ErrorCode::InvalidArgument, "task script '" + script.name + "' has no phases");
    for (const auto& p : script.phases)
        validate_phase(p, db);
}

inline nlohmann::json to_json(const TaskScript& script)
{
    nlohmann::json doc;
    doc["name"] = script.name;
    auto& phases = doc["phases"] = nlohmann::json::array();
    for (const auto& p : script.phases) {
        nlohmann::json ph;
        if (!p.name.empty())
            ph["name"] = p.name;
        ph["assignment"] = to_json(p.assignment);
        ph["synergy"] = p.synergy;
        ph["n_s"] = p.n_s;
        if (p.termination.kind == Termination::Kind::FixedSteps)
            ph["termination"] = {{"fixed_steps", p.termination.steps}};
        else
            ph["termination"] = "external";
        phases.push_back(std::move(ph));
    }
    return doc;
}

inline Phase phase_from_json(const nlohmann::json& ph, const HandModel& hand)
{
    try {
        auto assignment = assignment_from_json(ph.at("assignment"), hand);
        Termination termination = Termination::external();
        const auto& t = ph.contains("termination") ? ph.at("termination") : nlohmann::json("external");
        if (t.is_string()) {
            require(t.get<std::string>() == "external", ErrorCode::ParseError,
                    "termination must be \"external\" or {fixed_steps: k}");
        }
        else {
            const auto k = t.at("fixed_steps").get<std::size_t>();
            require(k >= 1, ErrorCode::InvalidArgument, "fixed_steps must be at least 1");
            termination = Termination::fixed_steps(k);
        }
        return Phase{ph.value("name", std::string{}), std::move(assignment), ph.at("synergy").get<std::string>(),
                     ph.at("n_s").get<std::size_t>(), termination};
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("phase: ") + e.what());
    }
}

inline TaskScript script_from_json(const nlohmann::json& doc, const HandModel& hand)
{
    try {
        TaskScript s;
        s.name = doc.at("name").get<std::string>();
        for (const auto& ph : doc.at("phases"))
            s.phases.push_back(phase_from_json(ph, hand));
        require(!s.phases.empty(), ErrorCode::InvalidArgument, "task script '" + s.name + "' has no phases");
        return s;
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("task script: ") + e.what());
    }
}

// ---- runtime ----------------------------------------------------------------

/// Live state of a hand under synergy control. M joints follow the active
/// synergy; every other joint stays at the value it had on phase entry.
struct RuntimeState {
    Posture current;
    std::optional<std::size_t> active_phase;
    std::string active_synergy;
    std::optional<SynergyMatrix> active;
    std::map<std::size_t, double> frozen_values;
    Eigen::VectorXd coefficients;

    bool has_phase() const noexcept { return active.has_value(); }

    std::vector<std::size_t> frozen_joints() const
    {
        std::vector<std::size_t> out;
        for (const auto& [j, v] : frozen_values)
            out.push_back(j);
        return out;
    }
};

inline RuntimeState initial_state(const HandModel& hand)
{
    RuntimeState s;
    s.current = hand.flat_posture();
    return s;
}

inline RuntimeState initial_state(const HandModel& hand, const Posture& start)
{
    RuntimeState s;
    s.current = hand.clamp(start);
    return s;
}

/// Switches to `phase`: snapshots the joints outside the phase's subset and
/// loads its synergy truncated to n_s components.
inline RuntimeState begin_phase(RuntimeState state, const Phase& phase, const SynergyDatabase& db,
                                const HandModel& hand, std::optional<std::size_t> phase_index = std::nullopt)
{
    validate_phase(phase, db);
    hand.check_length(state.current);
    const auto& model = db.lookup(phase.synergy).record->model;
    const auto& subset = phase.assignment.resolved_subset();
    subset.check_within(hand.dof());

    state.frozen_values.clear();
    for (auto j : subset.complement(hand.dof()))
        state.frozen_values[j] = state.current(static_cast<Eigen::Index>(j));
    state.active = synergy_matrix(model, phase.n_s);
    state.active_synergy = phase.synergy;
    state.active_phase = phase_index;
    state.coefficients = coefficients(*state.active, extract_subvector(state.current, subset));
    return state;
}

namespace detail {

inline Posture write_back(const RuntimeState& state, const HandModel& hand, const Eigen::VectorXd& sub)
{
    Posture out = state.current;
    const auto& subset = state.active->subset;
    for (std::size_t k = 0; k < subset.size(); ++k)
        out(static_cast<Eigen::Index>(subset[k])) = sub(static_cast<Eigen::Index>(k));
    for (const auto& [j, v] : state.frozen_values)
        out(static_cast<Eigen::Index>(j)) = v;
    // Clamping happens after projection so in-span commands pass through exactly.
    return hand.clamp(out);
}

} // namespace detail

/// Projects the M joints of a commanded full posture through the active
/// synergy; frozen joints ignore the command.
inline Posture drive_with_posture(RuntimeState& state, const HandModel& hand, const Posture& commanded)
{
    require(state.has_phase(), ErrorCode::InvalidArgument, "no active phase");
    hand.check_length(commanded);
    const auto& s = *state.active;
    auto z = coefficients(s, extract_subvector(commanded, s.subset));
    auto out = detail::write_back(state, hand, decode(s, z));
    state.coefficients = std::move(z);
    state.current = out;
    return out;
}

/// Sets the M joints from synergy coordinates directly.
inline Posture drive_with_coefficients(RuntimeState& state, const HandModel& hand, const Eigen::VectorXd& z)
{
    require(state.has_phase(), ErrorCode::InvalidArgument, "no active phase");
    const auto& s = *state.active;
    auto out = detail::write_back(state, hand, decode(s, z));
    state.coefficients = z;
    state.current = out;
    return out;
}

struct ScriptRun {
    PostureSequence trajectory;
    std::vector<std::size_t> phase_starts; ///< row where each phase begins
    RuntimeState final_state;
};

/// Runs every phase in order, one input stream per phase. FixedSteps(k)
/// phases consume exactly k postures; ExternalSignal phases consume their
/// whole stream, the end of the stream acting as the signal.
inline ScriptRun run_script(const TaskScript& script, const SynergyDatabase& db, const HandModel& hand,
                            const std::vector<PostureSequence>& inputs, std::optional<Posture> start = std::nullopt)
{
    validate_script(script, db);
    require(inputs.size() == script.phases.size(), ErrorCode::DimensionMismatch,
            "script '" + script.name + "' has " + std::to_string(script.phases.size()) + " phases but " +
                std::to_string(inputs.size()) + " input streams were given");

    auto state = start ? initial_state(hand, *start) : initial_state(hand);
    std::vector<Posture> rows;
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < script.phases.size(); ++i) {
        const auto& phase = script.phases[i];
        const auto& stream = inputs[i];
        require(stream.cols() == hand.dof(), ErrorCode::DimensionMismatch,
                "input stream " + std::to_string(i) + " has " + std::to_string(stream.cols()) + " columns");
        std::size_t steps = stream.rows();
        if (phase.termination.kind == Termination::Kind::FixedSteps) {
            require(stream.rows() >= phase.termination.steps, ErrorCode::StreamExhausted,
                    "phase '" + phase.name + "' needs " + std::to_string(phase.termination.steps) +
                        " postures, stream has " + std::to_string(stream.rows()));
            steps = phase.termination.steps;
        }
        state = begin_phase(std::move(state), phase, db, hand, i);
        starts.push_back(rows.size());
        for (std::size_t t = 0; t < steps; ++t)
            rows.push_back(drive_with_posture(state, hand, stream.row(t)));
    }

    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(hand.dof()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        data.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    return ScriptRun{PostureSequence(std::move(data), hand.joint_names(), script.name), std::move(starts),
                     std::move(state)};
}

} // namespace fdms
