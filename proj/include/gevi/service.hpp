#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "gevi/artifact.hpp"
#include "json.hpp"

namespace gevi {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Read-only view over one artifact answering the viewer's API. Thread-safe
/// for concurrent handle() calls.
class ApiRouter {
 public:
  /// Computes layouts when the artifact has none.
  explicit ApiRouter(EvolutionArtifact artifact);

  /// `path` without query string; `query` holds decoded parameters.
  ApiResponse handle(std::string_view method, std::string_view path,
                     const std::multimap<std::string, std::string>& query = {}) const;

  /// `stable_only` drops hierarchies without a stable group.
  ApiResponse hierarchies(bool stable_only = false) const;
  ApiResponse hierarchy_graph(std::string_view id) const;
  ApiResponse group(std::string_view label) const;
  ApiResponse overlaps(std::string_view label) const;
  ApiResponse slot_stats(std::string_view index) const;
  ApiResponse search(std::string_view query) const;

  const EvolutionArtifact& artifact() const { return artifact_; }

 private:
  nlohmann::json group_record(std::size_t group_index) const;
  nlohmann::json transition_record(std::size_t transition_index) const;
  std::optional<std::size_t> find_group(std::string_view text) const;

  EvolutionArtifact artifact_;
  std::vector<int> hierarchy_of_;
  // per group: (hierarchy, node index) in artifact_.layouts
  std::vector<std::pair<int, std::size_t>> position_of_;
};

/// HTTP front end for an ApiRouter. The router must outlive the server.
class ApiServer {
 public:
  explicit ApiServer(const ApiRouter& router, const std::string& static_dir = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds host:port (port 0 picks a free port) and returns the bound port.
  /// Throws std::runtime_error when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called from another thread.
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks serving `router` on host:port; `static_dir`, when non-empty, is
/// mounted at `/` for the viewer's assets. Throws std::runtime_error when
/// the address cannot be bound.
void serve(const ApiRouter& router, const std::string& host, int port, const std::string& static_dir = {});

/// Splits `host:port`; throws std::invalid_argument.
std::pair<std::string, int> parse_listen_address(std::string_view address);

}  // namespace gevi
