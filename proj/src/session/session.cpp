#include "memrep/session/session.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "memrep/core/error.hpp"
#include "memrep/dfa/targets.hpp"

namespace memrep::session {

namespace {

double cost_value(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return strategy::kInfinity;
    throw SessionError(400, "bad cost '" + s + "'");
  }
  return j.get<double>();
}

nlohmann::json cost_json(double c) {
  if (std::isinf(c)) return "inf";
  return c;
}

const std::vector<std::string> kMemAnswers{"in", "out"};
const std::vector<std::string> kPrefAnswers{"<", ">", "=", "||"};
const std::vector<std::string> kEquivAnswers{"accept", "counterexample"};

}  // namespace

std::unique_ptr<learner::ConceptClass> SessionConfig::make_class() const {
  if (family == "monotone") return std::make_unique<learner::GridClass>(d);
  std::optional<dfa::Dfa> prior;
  if (ry_prior) prior = dfa::ry_prior();
  return std::make_unique<learner::DfaClass>(alphabet, max_states, prior, learner.seed);
}

SessionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SessionError(400, "config must be a JSON object");
  try {
    SessionConfig c;
    c.family = j.value("family", c.family);
    if (c.family != "dfa" && c.family != "monotone") throw SessionError(400, "family must be dfa or monotone");
    if (j.contains("alphabet")) {
      const auto& a = j["alphabet"];
      if (a == "binary") c.alphabet = Alphabet::binary();
      else if (a == "tiles") c.alphabet = dfa::tile_alphabet();
      else if (a.is_array()) c.alphabet = Alphabet(a.get<std::vector<std::string>>());
      else throw SessionError(400, "alphabet must be binary, tiles or a list of symbols");
    }
    c.max_states = j.value("max_states", c.max_states);
    if (j.contains("prior") && !j["prior"].is_null()) {
      if (j["prior"] != "ry") throw SessionError(400, "the only prior is ry");
      if (!j.contains("alphabet")) c.alphabet = dfa::tile_alphabet();
      if (!(c.alphabet == dfa::tile_alphabet())) throw SessionError(400, "the ry prior needs the tile alphabet");
      c.ry_prior = true;
    }
    c.d = j.value("d", c.d);
    if (c.family == "monotone" && (c.d < 1 || c.d > 8)) throw SessionError(400, "d must lie in 1..8");
    if (c.family == "dfa" && (c.max_states < 1 || c.alphabet.size() == 0))
      throw SessionError(400, "need a positive state cap and a non-empty alphabet");
    auto& l = c.learner;
    if (j.contains("costs")) {
      l.costs.a = cost_value(j["costs"].value("a", nlohmann::json(1.0)));
      l.costs.b = cost_value(j["costs"].value("b", nlohmann::json(1.0)));
    }
    l.costs.validate();
    if (j.contains("strategy")) {
      const auto& s = j["strategy"];
      l.strategy.alpha = s.value("alpha", l.strategy.alpha);
      l.strategy.beta = s.value("beta", l.strategy.beta);
      l.strategy.eta = s.value("eta", l.strategy.eta);
      l.strategy.softmax_temp = s.value("softmax_temp", l.strategy.softmax_temp);
      l.strategy.mc_samples = s.value("mc_samples", l.strategy.mc_samples);
    }
    l.max_rounds = j.value("max_rounds", l.max_rounds);
    l.recovery = learner::parse_recovery(j.value("recovery", std::string("interactive")));
    l.recovery_slack = j.value("recovery_slack", l.recovery_slack);
    l.seed = j.value("seed", l.seed);
    return c;
  } catch (const SessionError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SessionError(400, std::string("bad config: ") + e.what());
  } catch (const Error& e) {
    throw SessionError(400, e.what());
  }
}

nlohmann::json tile_legend(const Alphabet& alphabet) {
  if (!(alphabet == dfa::tile_alphabet())) return nlohmann::json::object();
  return {{"Bl", {{"color", "blue"}, {"meaning", "water"}}},
          {"Br", {{"color", "brown"}, {"meaning", "dryer"}}},
          {"R", {{"color", "red"}, {"meaning", "lava"}}},
          {"Y", {{"color", "yellow"}, {"meaning", "recharge"}}}};
}

TeachingSession::TeachingSession(std::string id, nlohmann::json config)
    : id_(std::move(id)), config_json_(std::move(config)), config_(config_from_json(config_json_)) {
  try {
    learner_ = std::make_unique<learner::Learner>(config_.make_class(), config_.learner);
  } catch (const Error& e) {
    throw SessionError(400, e.what());
  }
  if (config_.family == "dfa") legend_ = tile_legend(config_.alphabet);
}

bool TeachingSession::finished() const {
  const auto s = learner_->status();
  return s == learner::Status::Done || s == learner::Status::Failed;
}

nlohmann::json TeachingSession::render(const Atom& atom) const {
  nlohmann::json j{{"value", atom_to_json(atom, learner_->concept_class().alphabet())}};
  if (const auto* w = std::get_if<Word>(&atom); w && !legend_.empty()) {
    nlohmann::json tiles = nlohmann::json::array();
    for (Symbol s : w->symbols) {
      const auto& name = config_.alphabet.name(s);
      tiles.push_back({{"symbol", name}, {"color", legend_[name]["color"]}});
    }
    j["tiles"] = tiles;
  }
  return j;
}

nlohmann::json TeachingSession::entry_json(std::size_t index) const {
  const Entry& e = learner_->kb().entry(index);
  nlohmann::json j{{"index", index}, {"trusted", trusted(e.source)}, {"active", e.active}};
  if (e.is_mem()) {
    j["kind"] = "membership";
    j["atoms"] = {render(e.mem().atom)};
    j["answer"] = to_token(e.mem().label);
  } else {
    j["kind"] = "preference";
    j["atoms"] = {render(e.pref().lhs), render(e.pref().rhs)};
    j["answer"] = to_token(e.pref().label);
  }
  return j;
}

nlohmann::json TeachingSession::counts_json() const {
  const auto& c = learner_->counts();
  return {{"n_mem", c.n_mem}, {"n_pref", c.n_pref}, {"n_equiv", c.n_equiv}, {"dropped", c.dropped}};
}

nlohmann::json TeachingSession::payload() const {
  const auto& l = *learner_;
  nlohmann::json j{{"session", id_},
                   {"status", to_string(l.status())},
                   {"counts", counts_json()},
                   {"cost_total", l.cost_total()},
                   {"costs", {{"a", cost_json(config_.learner.costs.a)}, {"b", cost_json(config_.learner.costs.b)}}}};
  if (!legend_.empty()) j["legend"] = legend_;
  switch (l.status()) {
    case learner::Status::Querying: {
      const auto& q = l.pending();
      j["nonce"] = nonce_;
      j["kind"] = to_string(q.kind);
      nlohmann::json atoms = nlohmann::json::array();
      for (const auto& a : q.atoms) atoms.push_back(render(a));
      j["atoms"] = atoms;
      switch (q.kind) {
        case learner::QueryKind::Membership: j["allowed"] = kMemAnswers; break;
        case learner::QueryKind::Preference: j["allowed"] = kPrefAnswers; break;
        case learner::QueryKind::Equivalence:
          j["allowed"] = kEquivAnswers;
          j["hypothesis"] = q.hypothesis->to_json();
          break;
      }
      break;
    }
    case learner::Status::Violation: {
      j["nonce"] = nonce_;
      nlohmann::json vs = nlohmann::json::array();
      for (const auto& v : l.violations().violations) {
        nlohmann::json entries = nlohmann::json::array();
        for (auto i : v.entries) entries.push_back(entry_json(i));
        vs.push_back({{"kind", to_string(v.kind)}, {"entries", entries}});
      }
      j["violations"] = vs;
      nlohmann::json candidates = nlohmann::json::array();
      for (auto i : l.violations().entry_set())
        if (!trusted(l.kb().entry(i).source)) candidates.push_back(i);
      j["candidates"] = candidates;
      break;
    }
    case learner::Status::Done:
    case learner::Status::Failed:
      j["result"] = l.result() ? l.result()->to_json() : nlohmann::json();
      j["failure"] = l.failure() ? nlohmann::json(to_string(*l.failure())) : nlohmann::json();
      j["transcript"] = "/sessions/" + id_ + "/transcript";
      break;
  }
  return j;
}

void TeachingSession::apply(const nlohmann::json& action) {
  auto& l = *learner_;
  if (action.contains("retract")) {
    const bool changes = !action["retract"].empty() || l.status() == learner::Status::Violation;
    l.retract(action["retract"].get<std::vector<std::size_t>>());
    if (changes) ++nonce_;
    return;
  }
  const auto& a = action.at("answer");
  switch (l.pending().kind) {
    case learner::QueryKind::Membership: l.answer_membership(parse_mem_label(a.get<std::string>())); break;
    case learner::QueryKind::Preference: l.answer_preference(parse_pref_label(a.get<std::string>())); break;
    case learner::QueryKind::Equivalence:
      if (a == "accept") {
        l.answer_equivalence(std::nullopt);
      } else {
        const Alphabet& alphabet = l.concept_class().alphabet();
        l.answer_equivalence(
            oracles::Counterexample{atom_from_json(a.at("atom"), alphabet), parse_mem_label(a.at("label").get<std::string>())});
      }
      break;
  }
  ++nonce_;
}

nlohmann::json TeachingSession::answer(std::uint64_t nonce, const nlohmann::json& answer) {
  if (finished()) throw SessionError(409, "session is finished");
  if (learner_->status() == learner::Status::Violation) throw SessionError(409, "resolve the violation first");
  if (nonce != nonce_) throw SessionError(409, "stale nonce");
  const auto kind = learner_->pending().kind;
  auto allowed = [&](const std::vector<std::string>& tokens) {
    return answer.is_string() && std::find(tokens.begin(), tokens.end(), answer.get<std::string>()) != tokens.end();
  };
  bool ok = false;
  if (kind == learner::QueryKind::Membership) ok = allowed(kMemAnswers);
  else if (kind == learner::QueryKind::Preference) ok = allowed(kPrefAnswers);
  else ok = answer == "accept" || (answer.is_object() && answer.contains("atom") && answer.contains("label"));
  if (!ok) throw SessionError(400, "answer not allowed for a " + std::string(to_string(kind)) + " query");

  nlohmann::json action{{"nonce", nonce}, {"answer", answer}};
  try {
    apply(action);
  } catch (const SessionError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SessionError(400, e.what());
  } catch (const Error& e) {
    throw SessionError(400, e.what());
  }
  log_.push_back(std::move(action));
  return payload();
}

nlohmann::json TeachingSession::retract(const std::vector<std::size_t>& entries) {
  if (finished()) throw SessionError(409, "session is finished");
  for (auto i : entries)
    if (i >= learner_->kb().size()) throw SessionError(400, "unknown entry " + std::to_string(i));
  nlohmann::json action{{"retract", entries}};
  apply(action);
  log_.push_back(std::move(action));
  return payload();
}

nlohmann::json TeachingSession::transcript() const {
  return {{"session", id_}, {"config", config_json_}, {"records", learner_->records()}, {"log", log_}};
}

nlohmann::json TeachingSession::result() const {
  if (!finished()) throw SessionError(409, "session is still running");
  nlohmann::json j = payload();
  j["kb"] = to_json(learner_->kb(), learner_->concept_class().alphabet());
  j["summary"] = learner_->summary();
  return j;
}

nlohmann::json TeachingSession::snapshot() const { return {{"id", id_}, {"config", config_json_}, {"log", log_}}; }

std::unique_ptr<TeachingSession> TeachingSession::restore(const nlohmann::json& snapshot) {
  auto s = std::make_unique<TeachingSession>(snapshot.at("id").get<std::string>(), snapshot.at("config"));
  for (const auto& action : snapshot.at("log")) {
    s->apply(action);
    s->log_.push_back(action);
  }
  return s;
}

SessionStore::SessionStore(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (!dir_) return;
  std::filesystem::create_directories(*dir_);
  for (const auto& f : std::filesystem::directory_iterator(*dir_)) {
    if (f.path().extension() != ".json") continue;
    std::ifstream in(f.path());
    auto s = TeachingSession::restore(nlohmann::json::parse(in));
    std::string id = s->id();
    sessions_.emplace(std::move(id), std::move(s));
  }
}

std::string SessionStore::fresh_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04llx%012llx", static_cast<unsigned long long>(++counter_ & 0xffff),
                static_cast<unsigned long long>(rng() & 0xffffffffffffULL));
  return buf;
}

std::string SessionStore::create(const nlohmann::json& config) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = fresh_id();
  }
  auto s = std::make_shared<TeachingSession>(id, config);
  persist(*s);
  std::lock_guard lock(mutex_);
  sessions_.emplace(id, std::move(s));
  return id;
}

std::shared_ptr<TeachingSession> SessionStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError(404, "no session " + id);
  return it->second;
}

void SessionStore::persist(const TeachingSession& session) const {
  if (!dir_) return;
  const auto path = *dir_ / (session.id() + ".json");
  const auto tmp = *dir_ / (session.id() + ".json.tmp");
  {
    std::ofstream out(tmp);
    out << session.snapshot().dump();
  }
  std::filesystem::rename(tmp, path);
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace memrep::session
