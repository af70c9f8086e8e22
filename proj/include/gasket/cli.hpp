#pragma once

// Batch front end behind gasket-szego. Kept in a library so tests can drive
// whole runs in-process.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace gasket::cli {

inline const std::vector<std::string> kCommands = {"spectrum", "basis", "szego-trace", "szego-det", "clusters",
                                                   "validate"};

enum Exit : int { kOk = 0, kModuleError = 1, kSchemaError = 2 };

/// Runs `command` with the raw config text. The text is parsed, checked
/// against the schema and echoed verbatim into `out/config.json`.
int run(const std::string& command, const std::string& config_text, const std::filesystem::path& out, bool plot,
        std::ostream& log, std::ostream& err);

/// argv entry point: `<command> --config run.json --out dir/ [--plot]`.
int main(int argc, char** argv);

}  // namespace gasket::cli
