#include <thread>

#include <boost/asio/connect.hpp>
#include <gtest/gtest.h>

#include "fdms/server.hpp"
#include "test_support.hpp"

using namespace fdms;
using nlohmann::json;

namespace {

class Service : public ::testing::Test {
protected:
    std::shared_ptr<const HandModel> hand = std::make_shared<const HandModel>(test::default_hand());
    std::shared_ptr<const SynergyDatabase> db =
        std::make_shared<const SynergyDatabase>(test::bundled_database(*hand));
    SteeringService service{db, hand};

    json call(std::string_view method, std::string_view target, const json& body, int expected_status)
    {
        const auto res = service.handle(method, target, body.is_null() ? "" : body.dump());
        EXPECT_EQ(res.status, expected_status) << res.body;
        return json::parse(res.body);
    }

    std::string new_session(const json& body = json::object())
    {
        return call("POST", "/sessions", body, 201).at("id").get<std::string>();
    }
};

} // namespace

TEST_F(Service, ListsSynergies)
{
    const auto list = call("GET", "/synergies", nullptr, 200);
    ASSERT_EQ(list.size(), db->size());
    bool found = false;
    for (const auto& item : list)
        if (item.at("name") == "MMMFF") {
            found = true;
            EXPECT_EQ(item.at("kind"), "fdms");
            EXPECT_EQ(item.at("f"), 6);
        }
    EXPECT_TRUE(found);
}

TEST_F(Service, SessionStartsFlat)
{
    const auto created = call("POST", "/sessions", json::object(), 201);
    EXPECT_EQ(created.at("posture"), json(std::vector<double>(10, 0.0)));
    EXPECT_TRUE(created.at("phase").is_null());
    EXPECT_EQ(created.at("fingertips").size(), 5u);
}

TEST_F(Service, PhaseReportsFrozenSet)
{
    const auto id = new_session();
    const auto res = call("POST", "/sessions/" + id + "/phase", {{"assignment", "MMMFF"}, {"synergy", "MMMFF"}, {"n_s", 2}}, 200);
    EXPECT_EQ(res.at("frozen"), json({6, 7, 8, 9}));
    EXPECT_EQ(res.at("subset"), json({0, 1, 2, 3, 4, 5}));
}

TEST_F(Service, ThumbOnlyFramesMoveOnlyThumb)
{
    const auto id = new_session();
    call("POST", "/sessions/" + id + "/phase", {{"assignment", "MMMMM"}, {"synergy", "grasp"}, {"n_s", 3}}, 200);
    json last = json::parse(service.handle_frame(id, json({{"z", {0.8, 0.1, 0.0}}}).dump()));
    ASSERT_FALSE(last.contains("error")) << last;
    call("POST", "/sessions/" + id + "/phase", {{"assignment", "MFFFF"}, {"synergy", "MFFFF"}, {"n_s", 2}}, 200);
    const auto before = last.at("posture").get<std::vector<double>>();
    for (double a : {-0.3, 0.2, 0.5}) {
        last = json::parse(service.handle_frame(id, json({{"z", {a, -a}}}).dump()));
        ASSERT_FALSE(last.contains("error")) << last;
        const auto now = last.at("posture").get<std::vector<double>>();
        for (std::size_t j = 2; j < now.size(); ++j)
            EXPECT_EQ(now[j], before[j]);
    }
    const auto snap = call("GET", "/sessions/" + id, nullptr, 200);
    EXPECT_EQ(snap.at("posture"), last.at("posture"));
    EXPECT_EQ(snap.at("fingertips"), last.at("fingertips"));
    EXPECT_EQ(snap.at("frozen"), last.at("frozen"));
}

TEST_F(Service, BadFramesLeaveStateUnchanged)
{
    const auto id = new_session();
    auto reply = json::parse(service.handle_frame(id, R"({"z":[1]})"));
    EXPECT_TRUE(reply.contains("error"));
    call("POST", "/sessions/" + id + "/phase", {{"assignment", "MFFFF"}, {"synergy", "MFFFF"}, {"n_s", 1}}, 200);
    const auto before = call("GET", "/sessions/" + id, nullptr, 200);
    for (const char* frame : {R"({"z":[1,2]})", R"({"posture":[0,1]})", "not json", R"({"z":["a"]})", "{}"}) {
        reply = json::parse(service.handle_frame(id, frame));
        EXPECT_TRUE(reply.contains("error")) << frame;
        EXPECT_TRUE(reply.contains("code")) << frame;
    }
    EXPECT_EQ(call("GET", "/sessions/" + id, nullptr, 200), before);
}

TEST_F(Service, ErrorsAndUnknownSessions)
{
    call("GET", "/sessions/s999", nullptr, 404);
    call("POST", "/sessions/s999/phase", {{"assignment", "MFFFF"}, {"synergy", "MFFFF"}, {"n_s", 1}}, 404);
    call("GET", "/nowhere", nullptr, 404);
    const auto id = new_session();
    const auto err = call("POST", "/sessions/" + id + "/phase", {{"assignment", "MFFFF"}, {"synergy", "MMMFF"}, {"n_s", 1}}, 400);
    EXPECT_EQ(err.at("code"), "InvalidArgument");
    call("POST", "/sessions/" + id + "/phase", {{"assignment", "MFFFF"}, {"synergy", "nope"}, {"n_s", 1}}, 404);
    EXPECT_EQ(service.handle("POST", "/sessions", "{bad").status, 400);
}

TEST_F(Service, ScriptedSessionPhases)
{
    const auto script = read_json_file(test::kDataDir / "scripts" / "pen.json");
    const auto id = new_session({{"task_script", script}});
    const auto res = call("POST", "/sessions/" + id + "/phase", {{"phase_index", 1}}, 200);
    EXPECT_EQ(res.at("frozen"), json({0, 1}));
    call("POST", "/sessions/" + id + "/phase", {{"phase_index", 9}}, 400);
}

TEST_F(Service, WebSocketRoundTrip)
{
    namespace beast = boost::beast;
    namespace net = boost::asio;
    SteeringServer server(service, "127.0.0.1", 0);
    std::thread loop([&] { server.run(); });
    const auto port = std::to_string(server.port());

    net::io_context ioc;
    net::ip::tcp::resolver resolver(ioc);
    const auto endpoints = resolver.resolve("127.0.0.1", port);

    const auto http_call = [&](beast::http::verb verb, const std::string& target, const std::string& body) {
        net::ip::tcp::socket sock(ioc);
        net::connect(sock, endpoints);
        beast::http::request<beast::http::string_body> req{verb, target, 11};
        req.set(beast::http::field::host, "127.0.0.1");
        req.set(beast::http::field::content_type, "application/json");
        req.keep_alive(false);
        req.body() = body;
        req.prepare_payload();
        beast::http::write(sock, req);
        beast::flat_buffer buf;
        beast::http::response<beast::http::string_body> res;
        beast::http::read(sock, buf, res);
        return std::make_pair(static_cast<int>(res.result_int()), json::parse(res.body()));
    };

    auto [status, created] = http_call(beast::http::verb::post, "/sessions", "{}");
    ASSERT_EQ(status, 201);
    const auto id = created.at("id").get<std::string>();
    auto [st2, phase] = http_call(beast::http::verb::post, "/sessions/" + id + "/phase",
                                  json({{"assignment", "MMMFF"}, {"synergy", "MMMFF"}, {"n_s", 2}}).dump());
    ASSERT_EQ(st2, 200) << phase;
    EXPECT_EQ(phase.at("frozen"), json({6, 7, 8, 9}));

    beast::websocket::stream<net::ip::tcp::socket> ws(ioc);
    net::connect(ws.next_layer(), endpoints);
    ws.handshake("127.0.0.1", "/sessions/" + id + "/stream");
    json last;
    for (double a : {0.1, 0.4, -0.2}) {
        ws.write(net::buffer(json({{"z", {a, a / 2}}}).dump()));
        beast::flat_buffer buf;
        ws.read(buf);
        last = json::parse(beast::buffers_to_string(buf.data()));
        ASSERT_FALSE(last.contains("error")) << last;
    }
    ws.write(net::buffer(std::string(R"({"z":[1,2,3]})")));
    beast::flat_buffer errbuf;
    ws.read(errbuf);
    EXPECT_TRUE(json::parse(beast::buffers_to_string(errbuf.data())).contains("error"));
    ws.close(beast::websocket::close_code::normal);

    auto [st3, snap] = http_call(beast::http::verb::get, "/sessions/" + id, "");
    ASSERT_EQ(st3, 200);
    EXPECT_EQ(snap.at("posture"), last.at("posture"));
    EXPECT_EQ(snap.at("frozen"), json({6, 7, 8, 9}));

    server.stop();
    loop.join();
}
