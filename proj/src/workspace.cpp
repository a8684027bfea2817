#include "wikimim/workspace.hpp"

#include <json.hpp>

#include <fstream>

#include "wikimim/error.hpp"

namespace wikimim {

std::filesystem::path WorkspaceConfig::corpus_dir(const std::string& label) const {
  if (const auto it = corpus_dirs.find(label); it != corpus_dirs.end()) return it->second;
  return root / "corpora" / label;
}

WorkspaceConfig load_workspace(const std::filesystem::path& root) {
  WorkspaceConfig config;
  config.root = root;
  config.store_path = root / "store";

  const auto file = root / kWorkspaceFile;
  std::ifstream in(file);
  if (!in) return config;

  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error("workspace config '" + file.string() + "' is not a JSON object");
  auto resolve = [&root](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : root / path;
  };
  auto require_exists = [&file](const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) {
      throw Error("workspace config '" + file.string() + "': path '" + p.string() + "' does not exist");
    }
  };
  try {
    if (doc.value("format_version", 1) != 1) throw Error("workspace config: unsupported format_version");
    if (const auto it = doc.find("corpus_dirs"); it != doc.end()) {
      for (const auto& [label, path] : it->items()) {
        config.corpus_dirs[label] = resolve(path.get<std::string>());
        require_exists(config.corpus_dirs[label]);
      }
    }
    if (const auto it = doc.find("store_path"); it != doc.end()) {
      config.store_path = resolve(it->get<std::string>());
    }
    config.chain_order = doc.value("chain_order", config.chain_order);
    if (config.chain_order < 1) throw Error("workspace config: chain_order must be at least 1");
    config.seed = doc.value("seed", config.seed);
    if (const auto it = doc.find("behavior"); it != doc.end()) {
      if (it->contains("pause")) config.behavior.pause = parse_pause(it->at("pause").get<std::string>());
      config.behavior.browse_depth = it->value("browse_depth", config.behavior.browse_depth);
      if (config.behavior.browse_depth < 0) throw Error("workspace config: browse_depth must be nonnegative");
    }
    if (const auto it = doc.find("thresholds"); it != doc.end()) {
      config.thresholds.interval_cv = it->value("interval_cv", config.thresholds.interval_cv);
      config.thresholds.path_entropy_bits = it->value("path_entropy_bits", config.thresholds.path_entropy_bits);
    }
    if (const auto it = doc.find("name_lists"); it != doc.end()) {
      if (it->contains("first")) config.first_names = resolve(it->at("first").get<std::string>());
      if (it->contains("last")) config.last_names = resolve(it->at("last").get<std::string>());
      if (config.first_names) require_exists(*config.first_names);
      if (config.last_names) require_exists(*config.last_names);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("workspace config '" + file.string() + "': " + e.what());
  }
  return config;
}

}  // namespace wikimim
