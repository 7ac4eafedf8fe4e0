#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace trajmatch {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitInput = 2 };

/// Entry point of the `trajmatch` tool: generate | compare | cluster | report.
/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace manifest {

std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
    std::string path;
    std::string sha256;
};

/// Writes `<primary output>.manifest.json` describing one invocation.
std::filesystem::path write(const std::filesystem::path& primary_output, const std::string& command,
                            const nlohmann::json& config, const std::vector<std::filesystem::path>& inputs,
                            const std::vector<std::filesystem::path>& outputs);

} // namespace manifest

} // namespace trajmatch
