#include <httplib.h>

#include "memrep/session/session.hpp"

namespace memrep::session {

namespace {

void send(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const SessionError& e) {
      send(res, e.status(), {{"error", e.what()}});
    } catch (const nlohmann::json::exception& e) {
      send(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      send(res, 500, {{"error", e.what()}});
    }
  };
}

nlohmann::json body(const httplib::Request& req) {
  auto j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw SessionError(400, "body is not JSON");
  return j;
}

}  // namespace

void install_routes(httplib::Server& server, SessionStore& store) {
  server.Post("/sessions", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const std::string id = store.create(req.body.empty() ? nlohmann::json::object() : body(req));
                auto s = store.get(id);
                std::lock_guard lock(s->mutex());
                send(res, 201, {{"id", id}, {"query", s->payload()}});
              }));
  server.Get(R"(/sessions/([^/]+)/query)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               std::lock_guard lock(s->mutex());
               send(res, s->finished() ? 409 : 200, s->payload());
             }));
  server.Post(R"(/sessions/([^/]+)/answer)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                auto s = store.get(req.matches[1]);
                const auto j = body(req);
                if (!j.is_object() || !j.contains("nonce") || !j["nonce"].is_number_unsigned() || !j.contains("answer"))
                  throw SessionError(400, "expected {nonce, answer}");
                std::lock_guard lock(s->mutex());
                auto out = s->answer(j["nonce"].get<std::uint64_t>(), j["answer"]);
                store.persist(*s);
                send(res, 200, out);
              }));
  server.Post(R"(/sessions/([^/]+)/retract)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                auto s = store.get(req.matches[1]);
                const auto j = body(req);
                if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
                  throw SessionError(400, "expected {entries}");
                std::vector<std::size_t> entries;
                for (const auto& e : j["entries"]) {
                  if (!e.is_number_unsigned()) throw SessionError(400, "entries are non-negative integers");
                  entries.push_back(e.get<std::size_t>());
                }
                std::lock_guard lock(s->mutex());
                auto out = s->retract(entries);
                store.persist(*s);
                send(res, 200, out);
              }));
  server.Get(R"(/sessions/([^/]+)/transcript)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               std::lock_guard lock(s->mutex());
               send(res, 200, s->transcript());
             }));
  server.Get(R"(/sessions/([^/]+)/result)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               auto s = store.get(req.matches[1]);
               std::lock_guard lock(s->mutex());
               send(res, 200, s->result());
             }));
}

}  // namespace memrep::session
