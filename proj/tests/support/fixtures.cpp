#include "support/fixtures.hpp"

namespace etl::testing {

std::filesystem::path fixtures_dir() { return ETL_FIXTURES_DIR; }

std::filesystem::path running_example_dir() { return fixtures_dir() / "running_example"; }

MappingConfig setup_running_example(const std::filesystem::path& dest_store) {
  std::filesystem::create_directories(dest_store);
  std::filesystem::copy(running_example_dir() / "store", dest_store,
                        std::filesystem::copy_options::recursive |
                            std::filesystem::copy_options::overwrite_existing);
  return load_config(running_example_dir() / "config.json");
}

}  // namespace etl::testing
