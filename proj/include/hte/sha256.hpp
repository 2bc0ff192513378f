#pragma once

#include <string>
#include <string_view>

namespace hte {

// SHA-256 digest as lowercase hex. Used for the reproducibility manifest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

}  // namespace hte
