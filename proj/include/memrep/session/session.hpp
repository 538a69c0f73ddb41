#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memrep/learner/learner.hpp"

namespace memrep::session {

/// Error carrying the HTTP status the API maps it to.
class SessionError : public Error {
 public:
  SessionError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// Keys: family ("dfa" | "monotone"), alphabet ("binary" | "tiles" | list of
/// symbol names), max_states, prior ("ry" | null), d, costs {a, b},
/// strategy, max_rounds, recovery, recovery_slack, seed.
struct SessionConfig {
  std::string family = "dfa";
  Alphabet alphabet = Alphabet::binary();
  std::size_t max_states = 10;
  bool ry_prior = false;
  std::size_t d = 2;
  learner::LearnerConfig learner;

  std::unique_ptr<learner::ConceptClass> make_class() const;
};

/// Throws SessionError(400) on anything malformed.
SessionConfig config_from_json(const nlohmann::json& j);

/// Symbol → {color, meaning} for the grid-world tiles; empty for other
/// alphabets.
nlohmann::json tile_legend(const Alphabet& alphabet);

/// One learner driven by a human. Every answer is checked against the
/// pending query's nonce; the answer log replays to the same state.
class TeachingSession {
 public:
  TeachingSession(std::string id, nlohmann::json config);

  const std::string& id() const { return id_; }
  std::uint64_t nonce() const { return nonce_; }

  /// Pending query, violation prompt, or final result.
  nlohmann::json payload() const;
  bool finished() const;

  /// Throws SessionError 409 on a stale nonce or a finished session, 400 on
  /// a token the pending query does not allow.
  nlohmann::json answer(std::uint64_t nonce, const nlohmann::json& answer);
  nlohmann::json retract(const std::vector<std::size_t>& entries);

  nlohmann::json transcript() const;
  nlohmann::json result() const;
  /// {id, config, log}; restore() replays the log.
  nlohmann::json snapshot() const;
  static std::unique_ptr<TeachingSession> restore(const nlohmann::json& snapshot);

  const learner::Learner& learner() const { return *learner_; }
  std::mutex& mutex() { return mutex_; }

 private:
  void apply(const nlohmann::json& action);
  nlohmann::json render(const Atom& atom) const;
  nlohmann::json entry_json(std::size_t index) const;
  nlohmann::json counts_json() const;

  std::string id_;
  nlohmann::json config_json_;
  SessionConfig config_;
  std::unique_ptr<learner::Learner> learner_;
  nlohmann::json legend_;
  std::uint64_t nonce_ = 1;
  nlohmann::json log_ = nlohmann::json::array();
  std::mutex mutex_;
};

/// Sessions by id. With a directory, each session is written there as a JSON
/// snapshot after every change and reloaded on construction.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt);

  /// Returns the new session id.
  std::string create(const nlohmann::json& config);
  /// Throws SessionError(404).
  std::shared_ptr<TeachingSession> get(const std::string& id) const;
  void persist(const TeachingSession& session) const;
  std::size_t size() const;

 private:
  std::string fresh_id();

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<TeachingSession>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace memrep::session

namespace httplib {
class Server;
}

namespace memrep::session {

/// Registers the /sessions routes on server.
void install_routes(httplib::Server& server, SessionStore& store);

}  // namespace memrep::session
