#pragma once

#include <atomic>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppdm/brep.hpp"

namespace ppdm {

inline constexpr size_t kUndoDepth = 32;

/// One editing session. Every request gets exactly one JSON response; errors
/// come back as {"op": "error", "code", "message"} and leave the state intact.
/// Safe to call from several threads; previews run on a copy of the model.
class Session {
 public:
  /// Dispatches {"op": load|list_faces|select|preview|commit|undo|export_mesh, ...}.
  nlohmann::json handle(const nlohmann::json& request);
  nlohmann::json handle(const std::string& op, const nlohmann::json& request);

  nlohmann::json load(const nlohmann::json& req);
  nlohmann::json list_faces(const nlohmann::json& req);
  nlohmann::json select(const nlohmann::json& req);
  nlohmann::json preview(const nlohmann::json& req);
  nlohmann::json commit(const nlohmann::json& req);
  nlohmann::json undo(const nlohmann::json& req);
  nlohmann::json export_mesh(const nlohmann::json& req);

  Body model() const;
  size_t undo_size() const;

 private:
  struct State {
    Body body;
    std::string units = "mm";
    std::vector<std::string> selection;
  };
  nlohmann::json meta(const State& s) const;
  std::vector<std::string> tagsFor(const nlohmann::json& req, const State& s) const;

  mutable std::mutex mutex_;
  State state_;
  bool loaded_ = false;
  std::deque<State> undo_;
  std::atomic<unsigned long long> preview_seq_{0};
};

/// Error response body for an exception.
nlohmann::json error_response(const std::exception& e);

}  // namespace ppdm
