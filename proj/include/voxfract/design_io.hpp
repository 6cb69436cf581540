#pragma once

#include "voxfract/physics/material.hpp"
#include "voxfract/polycube.hpp"

#include <filesystem>
#include <string>

namespace voxfract
{

struct DesignSnapshot
{
    Polycube design;
    ActuationMode mode = ActuationMode::AntiPhase;
};

/// Canonical JSON text of a design: fixed key order and one voxel per line,
/// voxels sorted by (x, y, z), so equal designs serialize to equal bytes.
std::string design_to_text(const DesignSnapshot& snapshot);

/// Throws std::runtime_error describing the first problem found.
DesignSnapshot design_from_text(const std::string& text);

void save_design(const std::filesystem::path& path, const DesignSnapshot& snapshot);
DesignSnapshot load_design(const std::filesystem::path& path);

} // namespace voxfract
