#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lockbom/ecosystem.hpp"

namespace lockbom::lockgen {

struct RunResult {
    int exit_code = -1;
    std::string output; // merged stdout + stderr
    bool timed_out = false;
};

// Seam for the external package managers: everything above this interface
// is testable hermetically with recorded outputs.
class CommandRunner {
public:
    virtual ~CommandRunner() = default;
    virtual RunResult run(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          std::chrono::seconds timeout) = 0;
};

// Spawns the real executable. Throws ToolNotInstalled when argv[0] is not
// on PATH; kills and reports on timeout.
class SystemCommandRunner : public CommandRunner {
public:
    RunResult run(const std::vector<std::string>& argv,
                  const std::filesystem::path& cwd,
                  std::chrono::seconds timeout) override;
};

enum class LockGenStatus { generated, already_present, failed };

std::string_view to_string(LockGenStatus s);

struct LockGenOutcome {
    Ecosystem ecosystem = Ecosystem::rust_cargo;
    LockGenStatus status = LockGenStatus::failed;
    std::optional<std::filesystem::path> lock_path;
    std::string diagnostic; // captured tool output on failure
};

struct LockGenOptions {
    bool refresh = false; // regenerate even when a lock already exists
    std::chrono::seconds timeout{300};
};

// Runs the ecosystem's lock command in a staging copy of the project, so
// a failed generation leaves the project directory untouched; on success
// only the lock file is copied back. Tool failure is an outcome, not an
// exception. The generated lock is parsed before being reported as such.
LockGenOutcome generate_lockfile(const std::filesystem::path& project_dir,
                                 Ecosystem ecosystem, CommandRunner& runner,
                                 const LockGenOptions& options = {});

// One requirements.txt dependency line.
struct RequirementEntry {
    std::string name;
    std::string constraint; // verbatim, empty = any version
    std::string markers;    // environment markers, verbatim

    friend bool operator==(const RequirementEntry&, const RequirementEntry&) = default;
};

struct TranslatedManifest {
    std::vector<RequirementEntry> entries;
    std::string manifest_text; // poetry-dialect pyproject.toml
};

// Maps requirements-format text to a strong-PM manifest, constraint
// strings preserved verbatim. Unsupported forms (options, URLs, editable
// installs, extras) are all listed in one UnsupportedRequirementLine error.
TranslatedManifest translate_requirements(std::string_view content);

// Reads back [tool.poetry.dependencies] from a manifest emitted by
// translate_requirements (the interpreter constraint is not an entry).
std::vector<RequirementEntry> poetry_manifest_entries(std::string_view manifest_text);

} // namespace lockbom::lockgen
