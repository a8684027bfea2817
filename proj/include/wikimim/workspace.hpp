#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "wikimim/detect.hpp"
#include "wikimim/wikisim.hpp"

namespace wikimim {

// Settings shared by the command-line tools. Loaded from
// <root>/wikimim.json when present; command-line flags override it.
//
//   {
//     "format_version": 1,
//     "corpus_dirs": {"label": "path", ...},
//     "store_path": "store",
//     "chain_order": 2,
//     "seed": 0,
//     "behavior": {"pause": "lognormal:2,0.5", "browse_depth": 3},
//     "thresholds": {"interval_cv": 0.05, "path_entropy_bits": 1.0},
//     "name_lists": {"first": "names/first.txt", "last": "names/last.txt"}
//   }
//
// Relative paths are resolved against the workspace root.
struct WorkspaceConfig {
  std::filesystem::path root;
  std::map<std::string, std::filesystem::path> corpus_dirs;
  std::filesystem::path store_path;
  int chain_order = 2;
  std::uint64_t seed = 0;
  BehaviorConfig behavior;
  TraceThresholds thresholds;
  std::optional<std::filesystem::path> first_names;
  std::optional<std::filesystem::path> last_names;

  // Directory holding corpus `label`: the configured path, else
  // <root>/corpora/<label>.
  std::filesystem::path corpus_dir(const std::string& label) const;

  std::filesystem::path revisions_path() const { return store_path / "revisions.jsonl"; }
  std::filesystem::path accounts_path() const { return store_path / "accounts.json"; }
  std::filesystem::path traces_path() const { return store_path / "traces.jsonl"; }
};

inline constexpr const char* kWorkspaceEnv = "WIKIMIM_WORKSPACE";
inline constexpr const char* kWorkspaceFile = "wikimim.json";

// Throws Error for a malformed file, a chain order below 1, or a configured
// path that does not exist.
WorkspaceConfig load_workspace(const std::filesystem::path& root);

}  // namespace wikimim
