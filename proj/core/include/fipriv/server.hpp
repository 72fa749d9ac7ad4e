#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fipriv/densities.hpp"
#include "fipriv/mechanisms.hpp"
#include "fipriv/rng.hpp"

namespace fipriv {

/// The private database: one real value per record, every entry inside the
/// declared domain.
struct Database {
  Vec records;
  Interval domain;
  std::string source;
};

/// CSV loader, one numeric value per row; a non-numeric first row is treated
/// as a header.
Database load_database(const std::string& path, Interval domain);

struct LedgerEntry {
  std::uint64_t counter = 0;
  std::string request_id;
  std::string mechanism_id;
  std::string query_json;  // the query that ran, for replay audits
  Vec value;
};

/// Append-only newline-delimited JSON log of every released response.
/// Counters are strictly increasing and resume across restarts.
class Ledger {
 public:
  explicit Ledger(std::string path);

  /// Assigns the next counter, writes, flushes; thread safe.
  std::uint64_t append(LedgerEntry entry);
  const std::string& path() const { return path_; }
  std::uint64_t last_counter() const { return counter_; }

  static std::vector<LedgerEntry> read_all(const std::string& path);

 private:
  std::mutex mu_;
  std::ofstream out_;
  std::uint64_t counter_ = 0;
  std::string path_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks an ephemeral port
  std::string database_path;
  Interval domain;
  std::uint64_t seed = 0;
  std::string ledger_path;
  std::vector<std::pair<std::string, Mechanism>> mechanisms;
};

/// Parses {"listen": "host:port", "database": {"path", "domain"}, "seed",
/// "ledger", "mechanisms": {name: mechanism-config}}.
ServerConfig server_config_from_json(const std::string& text);

using MechanismRegistry = std::map<std::string, Mechanism>;

/// Handles one request line and returns the response line (no trailing
/// newline). Successful responses are appended to the ledger. Failures come
/// back as structured error objects, never as dropped connections.
std::string handle_request(const Database& db, const MechanismRegistry& registry,
                           const std::string& request_line, Rng& rng, Ledger& ledger);

/// Newline-delimited-JSON-over-TCP query service. One handler thread per
/// connection; the database is shared read-only; ledger appends are
/// serialized through the single writer above.
class QueryServer {
 public:
  explicit QueryServer(ServerConfig config);
  ~QueryServer();

  QueryServer(const QueryServer&) = delete;
  QueryServer& operator=(const QueryServer&) = delete;

  void start();
  int port() const { return port_; }
  void stop();
  /// Blocks until SIGINT/SIGTERM, then shuts down and flushes the ledger.
  void run_until_signal();

 private:
  void accept_loop();
  void connection_loop(int fd, std::uint64_t connection_id);

  ServerConfig config_;
  Database db_;
  MechanismRegistry registry_;
  std::unique_ptr<Ledger> ledger_;

  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<std::uint64_t> connection_counter_{0};
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::vector<std::thread> connections_;
  std::vector<int> open_fds_;
};

/// Replays a ledger against the database and mechanism registry, verifying
/// every bounded response lies in {f(x)} + W and counters have no gaps.
bool audit_ledger(const std::string& ledger_path, const Database& db,
                  const MechanismRegistry& registry, std::string* failure = nullptr);

}  // namespace fipriv
