#pragma once

#include <filesystem>

#include "etl/config.hpp"

namespace etl::testing {

std::filesystem::path fixtures_dir();
std::filesystem::path running_example_dir();

// Copies the running-example store (preloaded SOR + metadata) into dest and
// returns the loaded config, whose feed paths resolve inside the fixture
// tree.
MappingConfig setup_running_example(const std::filesystem::path& dest_store);

}  // namespace etl::testing
