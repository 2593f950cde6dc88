#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdms/builders.hpp"
#include "fdms/error.hpp"
#include "fdms/hand_model.hpp"
#include "fdms/switching.hpp"
#include "fdms/synergy.hpp"

namespace fdms {

// Live steering sessions behind a small JSON API. This class knows nothing
// about sockets: the HTTP/WebSocket server in server.hpp feeds it requests
// and frames, and tests can drive it directly.
//
//   GET  /synergies                 database listing
//   POST /sessions                  {task_script?, hand_model?} -> {id, ...}
//   POST /sessions/{id}/phase       {assignment, synergy, n_s} | {phase_index}
//   GET  /sessions/{id}             current state snapshot
//   WS   /sessions/{id}/stream      {z: [...]} | {posture: [...]} frames

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

inline nlohmann::json fingertips_json(const FingerPositions& fk)
{
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [finger, chain] : fk) {
        auto joints = nlohmann::json::array();
        for (const auto& p : chain.joints)
            joints.push_back({p.x(), p.y()});
        out[std::string(to_string(finger))] = {{"joints", joints}, {"tip", {chain.tip.x(), chain.tip.y()}}};
    }
    return out;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v)
{
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

inline Eigen::VectorXd vector_from_wire(const nlohmann::json& a, const char* what)
{
    require(a.is_array(), ErrorCode::ParseError, std::string(what) + " must be an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a[i].is_number(), ErrorCode::ParseError, std::string(what) + " must be an array of numbers");
        v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
        require(std::isfinite(v(static_cast<Eigen::Index>(i))), ErrorCode::NonFiniteData,
                std::string(what) + " contains a non-finite value");
    }
    return v;
}

inline nlohmann::json error_json(ErrorCode code, std::string_view message)
{
    return {{"error", std::string(message)}, {"code", std::string(to_string(code))}};
}

class SteeringService {
public:
    SteeringService(std::shared_ptr<const SynergyDatabase> db, std::shared_ptr<const HandModel> hand)
        : db_(std::move(db)), hand_(std::move(hand))
    {
        require(db_ && hand_, ErrorCode::InvalidArgument, "service needs a database and a hand model");
    }

    HttpResponse handle(std::string_view method, std::string_view target, std::string_view body)
    {
        try {
            const auto path = strip_query(target);
            const auto parts = split_path(path);
            if (method == "GET" && parts.size() == 1 && parts[0] == "synergies")
                return ok(list_synergies());
            if (method == "POST" && parts.size() == 1 && parts[0] == "sessions")
                return {201, create_session(parse_body(body)).dump(), "application/json"};
            if (parts.size() >= 2 && parts[0] == "sessions") {
                auto session = find_session(parts[1]);
                if (!session)
                    return {404, error_json(ErrorCode::NotFound, "unknown session '" + parts[1] + "'").dump()};
                if (method == "GET" && parts.size() == 2)
                    return ok(snapshot(*session));
                if (method == "POST" && parts.size() == 3 && parts[2] == "phase")
                    return ok(begin(*session, parse_body(body)));
            }
            return {404, error_json(ErrorCode::NotFound, "no route for " + std::string(method) + " " + path).dump()};
        }
        catch (const Error& e) {
            return {e.code() == ErrorCode::NotFound ? 404 : 400, error_json(e.code(), e.what()).dump()};
        }
    }

    bool has_session(const std::string& id) const { return find_session(id) != nullptr; }

    /// Applies one stream frame and returns the reply frame. Failed frames
    /// leave the session untouched and produce an error frame.
    std::string handle_frame(const std::string& session_id, std::string_view frame)
    {
        auto session = find_session(session_id);
        if (!session)
            return error_json(ErrorCode::NotFound, "unknown session '" + session_id + "'").dump();
        std::lock_guard lock(session->mutex);
        try {
            nlohmann::json msg;
            try {
                msg = nlohmann::json::parse(frame);
            }
            catch (const nlohmann::json::parse_error& e) {
                fail(ErrorCode::ParseError, std::string("malformed frame: ") + e.what());
            }
            require(msg.is_object(), ErrorCode::ParseError, "frame must be a JSON object");
            require(session->state.has_phase(), ErrorCode::InvalidArgument, "session has no active phase");
            if (msg.contains("z"))
                drive_with_coefficients(session->state, *session->hand, vector_from_wire(msg.at("z"), "z"));
            else if (msg.contains("posture"))
                drive_with_posture(session->state, *session->hand, vector_from_wire(msg.at("posture"), "posture"));
            else
                fail(ErrorCode::ParseError, "frame needs a 'z' or 'posture' field");
            return state_json(*session).dump();
        }
        catch (const Error& e) {
            return error_json(e.code(), e.what()).dump();
        }
    }

    const SynergyDatabase& database() const { return *db_; }

private:
    struct Session {
        std::string id;
        std::shared_ptr<const HandModel> hand;
        std::optional<TaskScript> script;
        std::optional<Phase> phase;
        RuntimeState state;
        std::mutex mutex;
    };

    static HttpResponse ok(const nlohmann::json& doc) { return {200, doc.dump(), "application/json"}; }

    static std::string strip_query(std::string_view target)
    {
        return std::string(target.substr(0, target.find('?')));
    }

    static std::vector<std::string> split_path(std::string_view path)
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= path.size()) {
            auto slash = path.find('/', start);
            auto piece = path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
            if (!piece.empty())
                out.emplace_back(piece);
            if (slash == std::string_view::npos)
                break;
            start = slash + 1;
        }
        return out;
    }

    static nlohmann::json parse_body(std::string_view body)
    {
        if (body.find_first_not_of(" \t\r\n") == std::string_view::npos)
            return nlohmann::json::object();
        try {
            auto doc = nlohmann::json::parse(body);
            require(doc.is_object(), ErrorCode::ParseError, "request body must be a JSON object");
            return doc;
        }
        catch (const nlohmann::json::parse_error& e) {
            fail(ErrorCode::ParseError, std::string("malformed JSON body: ") + e.what());
        }
    }

    std::shared_ptr<Session> find_session(const std::string& id) const
    {
        std::lock_guard lock(sessions_mutex_);
        auto it = sessions_.find(id);
        return it == sessions_.end() ? nullptr : it->second;
    }

    nlohmann::json list_synergies() const
    {
        auto out = nlohmann::json::array();
        for (const auto& [name, entry] : db_->entries()) {
            const auto& m = entry.record->model;
            nlohmann::json item = {{"name", name},
                                   {"kind", to_string(entry.kind)},
                                   {"label", entry.record->label},
                                   {"f", m.dim()},
                                   {"subset", m.subset.indices()}};
            try {
                item["contribution_ratios"] = vector_to_json(contribution_ratios(m));
            }
            catch (const Error&) {
                item["contribution_ratios"] = nullptr;
            }
            out.push_back(std::move(item));
        }
        return out;
    }

    nlohmann::json create_session(const nlohmann::json& req)
    {
        auto session = std::make_shared<Session>();
        session->hand = req.contains("hand_model") ? std::make_shared<const HandModel>(load_hand_model(req.at("hand_model")))
                                                   : hand_;
        if (req.contains("task_script")) {
            auto script = script_from_json(req.at("task_script"), *session->hand);
            validate_script(script, *db_);
            session->script = std::move(script);
        }
        session->state = initial_state(*session->hand);
        {
            std::lock_guard lock(sessions_mutex_);
            session->id = "s" + std::to_string(next_id_++);
            sessions_.emplace(session->id, session);
        }
        std::lock_guard lock(session->mutex);
        return snapshot_locked(*session);
    }

    nlohmann::json begin(Session& session, const nlohmann::json& req)
    {
        std::lock_guard lock(session.mutex);
        Phase phase = [&] {
            if (req.contains("phase_index")) {
                require(session.script.has_value(), ErrorCode::InvalidArgument, "session has no task script");
                const auto k = req.at("phase_index").get<std::size_t>();
                require(k < session.script->phases.size(), ErrorCode::OutOfRange, "phase_index out of range");
                return session.script->phases[k];
            }
            return phase_from_json(req, *session.hand);
        }();
        session.state = begin_phase(session.state, phase, *db_, *session.hand);
        session.phase = phase;
        auto out = phase_json(session);
        out["posture"] = vector_to_json(session.state.current);
        return out;
    }

    nlohmann::json phase_json(const Session& session) const
    {
        if (!session.phase)
            return nullptr;
        return {{"assignment", to_json(session.phase->assignment)},
                {"synergy", session.phase->synergy},
                {"n_s", session.phase->n_s},
                {"subset", session.phase->assignment.resolved_subset().indices()},
                {"frozen", session.state.frozen_joints()},
                {"coefficients", vector_to_json(session.state.coefficients)}};
    }

    nlohmann::json state_json(const Session& session) const
    {
        return {{"posture", vector_to_json(session.state.current)},
                {"fingertips", fingertips_json(session.hand->forward_kinematics(session.state.current))},
                {"frozen", session.state.frozen_joints()},
                {"z", vector_to_json(session.state.coefficients)}};
    }

    nlohmann::json snapshot_locked(const Session& session) const
    {
        auto out = state_json(session);
        out["id"] = session.id;
        out["phase"] = phase_json(session);
        return out;
    }

    nlohmann::json snapshot(Session& session) const
    {
        std::lock_guard lock(session.mutex);
        return snapshot_locked(session);
    }

    std::shared_ptr<const SynergyDatabase> db_;
    std::shared_ptr<const HandModel> hand_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

} // namespace fdms
