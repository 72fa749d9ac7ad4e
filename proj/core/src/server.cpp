#include "fipriv/server.hpp"

#include <arpa/inet.h>
#include <csignal>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <sstream>

#include "fipriv/errors.hpp"
#include "fipriv/json_io.hpp"

namespace fipriv {

using Json = nlohmann::ordered_json;

Database load_database(const std::string& path, Interval domain) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_database: cannot open " + path);
  Database db;
  db.domain = domain;
  db.source = path;

  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    // trim whitespace and a possible trailing comma column
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    const bool parsed = end != line.c_str() && *end == '\0';
    if (!parsed) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw ParseError("load_database: row " + std::to_string(row) + " is not numeric: '" +
                       line + "'");
    }
    first = false;
    db.records.push_back(v);
  }
  if (db.records.empty()) throw ParseError("load_database: no records in " + path);
  for (std::size_t i = 0; i < db.records.size(); ++i)
    if (!domain.contains(db.records[i]))
      throw DomainViolationError("load_database: entry " + std::to_string(i) +
                                 " outside declared domain");
  return db;
}

// ------------------------------------------------------------------ ledger

namespace {

Json ledger_entry_to_json(const LedgerEntry& e) {
  Json j;
  j["counter"] = e.counter;
  j["request_id"] = e.request_id;
  j["mechanism_id"] = e.mechanism_id;
  j["query"] = Json::parse(e.query_json);
  j["value"] = e.value;
  return j;
}

LedgerEntry ledger_entry_from_json(const Json& j) {
  LedgerEntry e;
  e.counter = j.at("counter").get<std::uint64_t>();
  e.request_id = j.at("request_id").get<std::string>();
  e.mechanism_id = j.at("mechanism_id").get<std::string>();
  e.query_json = j.at("query").dump();
  e.value = j.at("value").get<Vec>();
  return e;
}

}  // namespace

Ledger::Ledger(std::string path) : path_(std::move(path)) {
  // resume the counter after the last persisted entry
  std::ifstream in(path_);
  if (in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        counter_ = std::max(counter_, Json::parse(line).at("counter").get<std::uint64_t>());
      } catch (const nlohmann::json::exception&) {
        throw ParseError("Ledger: corrupt entry in " + path_);
      }
    }
  }
  out_.open(path_, std::ios::app);
  if (!out_) throw ParseError("Ledger: cannot open " + path_ + " for append");
}

std::uint64_t Ledger::append(LedgerEntry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  entry.counter = ++counter_;
  out_ << ledger_entry_to_json(entry).dump() << '\n';
  out_.flush();
  return entry.counter;
}

std::vector<LedgerEntry> Ledger::read_all(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("Ledger::read_all: cannot open " + path);
  std::vector<LedgerEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      entries.push_back(ledger_entry_from_json(Json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("Ledger::read_all: ") + e.what());
    }
  }
  return entries;
}

// ------------------------------------------------------------------ config

ServerConfig server_config_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("server config: ") + e.what());
  }
  ServerConfig cfg;
  try {
    const std::string listen = j.at("listen").get<std::string>();
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw ConfigError("server config: listen must be host:port");
    cfg.host = listen.substr(0, colon);
    cfg.port = std::stoi(listen.substr(colon + 1));
    const Json& db = j.at("database");
    cfg.database_path = db.at("path").get<std::string>();
    const Json& dom = db.at("domain");
    cfg.domain = make_interval(dom.at(0).get<double>(), dom.at(1).get<double>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.ledger_path = j.at("ledger").get<std::string>();
    for (const auto& [name, mech_json] : j.at("mechanisms").items()) {
      Mechanism m = mechanism_from_json(mech_json.dump());
      m.id = name;
      cfg.mechanisms.emplace_back(name, std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("server config: ") + e.what());
  }
  if (cfg.mechanisms.empty()) throw ConfigError("server config: no mechanisms");
  return cfg;
}

// ----------------------------------------------------------------- handler

namespace {

std::string error_response(const std::string& id, const std::string& code,
                           const std::string& message) {
  Json j;
  j["id"] = id;
  Json err;
  err["code"] = code;
  err["message"] = message;
  j["error"] = std::move(err);
  return j.dump();
}

Query query_from_request(const Json& q, std::size_t db_size) {
  const std::string type = q.at("type").get<std::string>();
  if (type == "identity") return Query::identity(db_size);
  if (type == "average") return Query::weighted_average(q.at("weights").get<Vec>());
  if (type == "variance") return Query::variance(db_size);
  if (type == "linear") {
    Json compact;
    compact["type"] = "linear";
    compact["matrix"] = q.at("matrix");
    return query_from_json(compact.dump());
  }
  throw ParseError("unknown query type '" + type + "'");
}

}  // namespace

std::string handle_request(const Database& db, const MechanismRegistry& registry,
                           const std::string& request_line, Rng& rng, Ledger& ledger) {
  Json req;
  std::string id;
  try {
    req = Json::parse(request_line);
    id = req.value("id", "");
  } catch (const nlohmann::json::exception& e) {
    return error_response("", "bad_request", e.what());
  }

  try {
    if (!req.contains("query") || !req.contains("mechanism"))
      return error_response(id, "bad_request", "request needs 'query' and 'mechanism'");
    const std::string mech_name = req.at("mechanism").get<std::string>();
    const auto it = registry.find(mech_name);
    if (it == registry.end())
      return error_response(id, "unknown_mechanism", "no mechanism named '" + mech_name + "'");
    const Mechanism& mech = it->second;

    Query query;
    try {
      query = query_from_request(req.at("query"), db.records.size());
    } catch (const Error& e) {
      return error_response(id, "bad_request", e.what());
    }
    if (query.input_dim() != db.records.size())
      return error_response(id, "incompatible_query", "query input dimension != database size");
    if (query.kind() != mech.query.kind())
      return error_response(id, "incompatible_query",
                            "mechanism is configured for a different query kind");
    const NoiseDensity noise =
        mech.has_family() ? mech.noise_at(db.records[0]) : mech.fixed_noise();
    if (dim(noise) != query.output_dim())
      return error_response(id, "incompatible_query", "noise dimension != query output");

    Mechanism bound = mech;
    bound.query = query;
    const Response response = respond(bound, db.records, rng);

    LedgerEntry entry;
    entry.request_id = id;
    entry.mechanism_id = mech_name;
    entry.query_json = query_to_json(query);
    entry.value = response.value;
    ledger.append(std::move(entry));

    Json out;
    out["id"] = id;
    out["value"] = response.value;
    out["mechanism"] = mech_name;
    return out.dump();
  } catch (const Error& e) {
    return error_response(id, "internal", e.what());
  }
}

// ------------------------------------------------------------------ server

namespace {

void write_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return;  // peer gone
    sent += static_cast<std::size_t>(n);
  }
}

volatile std::sig_atomic_t g_signal_seen = 0;

void signal_handler(int) { g_signal_seen = 1; }

}  // namespace

QueryServer::QueryServer(ServerConfig config) : config_(std::move(config)) {
  db_ = load_database(config_.database_path, config_.domain);
  for (auto& [name, mech] : config_.mechanisms) registry_.emplace(name, mech);
  ledger_ = std::make_unique<Ledger>(config_.ledger_path);
}

QueryServer::~QueryServer() { stop(); }

void QueryServer::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw BindError("QueryServer: socket() failed");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(config_.port));
  if (::inet_pton(AF_INET, config_.host.c_str(), &addr.sin_addr) != 1)
    throw BindError("QueryServer: bad listen host " + config_.host);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw BindError("QueryServer: bind failed on " + config_.host + ":" +
                    std::to_string(config_.port));
  }
  if (::listen(listen_fd_, 64) != 0) throw BindError("QueryServer: listen failed");

  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);

  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void QueryServer::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    const std::uint64_t conn_id = ++connection_counter_;
    std::lock_guard<std::mutex> lock(conn_mu_);
    open_fds_.push_back(fd);
    connections_.emplace_back([this, fd, conn_id] { connection_loop(fd, conn_id); });
  }
}

void QueryServer::connection_loop(int fd, std::uint64_t connection_id) {
  // Per-connection generator derived from (server seed, connection counter):
  // a fixed request sequence on one connection replays exactly.
  Rng rng(mix_seed(config_.seed, connection_id));
  std::string buffer;
  char chunk[4096];
  while (running_) {
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos = 0;
    for (;;) {
      const std::size_t nl = buffer.find('\n', pos);
      if (nl == std::string::npos) break;
      std::string line = buffer.substr(pos, nl - pos);
      pos = nl + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::string response = handle_request(db_, registry_, line, rng, *ledger_);
      write_all(fd, response + "\n");
    }
    buffer.erase(0, pos);
  }
  ::close(fd);
}

void QueryServer::stop() {
  if (!running_.exchange(false)) {
    if (listen_fd_ >= 0) {
      ::close(listen_fd_);
      listen_fd_ = -1;
    }
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : connections_)
    if (t.joinable()) t.join();
  connections_.clear();
  open_fds_.clear();
}

void QueryServer::run_until_signal() {
  std::signal(SIGINT, signal_handler);
  std::signal(SIGTERM, signal_handler);
  while (!g_signal_seen && running_) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  stop();
}

// ------------------------------------------------------------------- audit

bool audit_ledger(const std::string& ledger_path, const Database& db,
                  const MechanismRegistry& registry, std::string* failure) {
  const auto entries = Ledger::read_all(ledger_path);
  const auto fail = [&](const std::string& why) {
    if (failure != nullptr) *failure = why;
    return false;
  };
  std::uint64_t expected = 0;
  for (const LedgerEntry& e : entries) {
    ++expected;
    if (e.counter != expected)
      return fail("counter gap at " + std::to_string(expected) + " (saw " +
                  std::to_string(e.counter) + ")");
    const auto it = registry.find(e.mechanism_id);
    if (it == registry.end()) return fail("unknown mechanism " + e.mechanism_id);
    const Mechanism& mech = it->second;
    const auto* bounded = std::get_if<BoundedBudget>(&mech.budget);
    if (bounded == nullptr) continue;  // only bounded mechanisms promise containment

    const Query query = query_from_json(e.query_json);
    const Vec fx = query.evaluate(db.records);
    if (fx.size() != e.value.size()) return fail("value size mismatch in " + e.request_id);
    for (std::size_t i = 0; i < fx.size(); ++i) {
      if (e.value[i] < fx[i] + bounded->support.lo || e.value[i] > fx[i] + bounded->support.hi)
        return fail("response " + e.request_id + " escaped {f(x)} + W at entry " +
                    std::to_string(i));
    }
  }
  return true;
}

}  // namespace fipriv
