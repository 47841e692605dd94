#pragma once

// JSON scene files: a construction (normal form or glue tree) plus
// verification settings. Scenes store constructors and parameters only.

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "geodeq/glue.hpp"
#include "geodeq/normalforms.hpp"
#include "geodeq/verify.hpp"

namespace geodeq {

struct ConstructionSpec {
  std::optional<NormalFormSpec> normal_form;  // leaf
  std::vector<ConstructionSpec> blocks;       // glue node
  std::vector<SpectralBox> region;            // declared spectral region, optional
};

struct SceneSpec {
  ConstructionSpec construction;
  VerifyOptions verification;
};

ParamFn param_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json param_to_json(const ParamFn& f);

NormalFormSpec normal_form_from_json(const nlohmann::json& j, const std::string& where = "construction");
nlohmann::json normal_form_to_json(const NormalFormSpec& s);

ConstructionSpec construction_from_json(const nlohmann::json& j, const std::string& where = "construction");
nlohmann::json construction_to_json(const ConstructionSpec& c);

// Accepts a full scene or a bare construction.
SceneSpec scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SceneSpec& s);

SceneSpec load_scene(const std::string& path);

Block build_block(const ConstructionSpec& c);
MetricPair build_pair(const ConstructionSpec& c);

// Number of top-level glue blocks (1 for a normal form).
std::size_t top_level_blocks(const ConstructionSpec& c);

}  // namespace geodeq
