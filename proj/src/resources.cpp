#include "fgdm/resources.hpp"

#include "fgdm/error.hpp"
#include "fgdm/text.hpp"

namespace fgdm::resources {

std::string Resources::get(const std::string& name) const {
  if (override_dir_) {
    const std::filesystem::path p = *override_dir_ / name;
    if (std::filesystem::is_regular_file(p)) return text::read_file(p);
  }
  const auto& table = embedded();
  if (auto it = table.find(name); it != table.end()) return it->second;
  throw Error("unknown resource '" + name + "'");
}

}  // namespace fgdm::resources
