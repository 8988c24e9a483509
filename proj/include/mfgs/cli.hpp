#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfgs::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitUsage = 64;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a of a file's bytes, as 16 hex digits. Used for manifest output digests.
std::string file_digest(const std::string& path);

}  // namespace mfgs::cli
