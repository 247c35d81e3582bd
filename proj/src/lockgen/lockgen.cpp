#include "lockbom/lockgen/lockgen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "lockbom/error.hpp"
#include "lockbom/lockfile/parsers.hpp"
#include "lockbom/lockfile/toml_lite.hpp"

namespace lockbom::lockgen {

namespace fs = std::filesystem;

std::string_view to_string(LockGenStatus s) {
    switch (s) {
    case LockGenStatus::generated: return "generated";
    case LockGenStatus::already_present: return "already_present";
    case LockGenStatus::failed: return "failed";
    }
    return "failed";
}

namespace {

bool on_path(const std::string& exe) {
    if (exe.find('/') != std::string::npos) {
        return ::access(exe.c_str(), X_OK) == 0;
    }
    const char* path = std::getenv("PATH");
    if (path == nullptr) {
        return false;
    }
    std::istringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
        if (dir.empty()) {
            continue;
        }
        if (::access((dir + "/" + exe).c_str(), X_OK) == 0) {
            return true;
        }
    }
    return false;
}

} // namespace

RunResult SystemCommandRunner::run(const std::vector<std::string>& argv,
                                   const fs::path& cwd, std::chrono::seconds timeout) {
    if (argv.empty()) {
        throw Error(ErrorCode::invalid_argument, "empty command");
    }
    if (!on_path(argv[0])) {
        throw Error(ErrorCode::tool_not_installed,
                    "executable not found on PATH: " + argv[0]);
    }

    int pipe_fds[2];
    if (::pipe(pipe_fds) != 0) {
        throw Error(ErrorCode::io_error, "pipe failed");
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(pipe_fds[0]);
        ::close(pipe_fds[1]);
        throw Error(ErrorCode::io_error, "fork failed");
    }
    if (pid == 0) {
        ::close(pipe_fds[0]);
        ::dup2(pipe_fds[1], STDOUT_FILENO);
        ::dup2(pipe_fds[1], STDERR_FILENO);
        ::close(pipe_fds[1]);
        if (::chdir(cwd.c_str()) != 0) {
            _exit(127);
        }
        std::vector<char*> c_argv;
        c_argv.reserve(argv.size() + 1);
        for (const std::string& arg : argv) {
            c_argv.push_back(const_cast<char*>(arg.c_str()));
        }
        c_argv.push_back(nullptr);
        ::execvp(c_argv[0], c_argv.data());
        _exit(127);
    }

    ::close(pipe_fds[1]);
    RunResult result;
    const auto deadline = std::chrono::steady_clock::now() + timeout;

    int flags = ::fcntl(pipe_fds[0], F_GETFL, 0);
    ::fcntl(pipe_fds[0], F_SETFL, flags | O_NONBLOCK);

    bool child_done = false;
    int status = 0;
    char buffer[4096];
    while (true) {
        const ssize_t n = ::read(pipe_fds[0], buffer, sizeof(buffer));
        if (n > 0) {
            result.output.append(buffer, static_cast<std::size_t>(n));
            continue;
        }
        if (n == 0) {
            break; // writer closed
        }
        if (!child_done) {
            const pid_t waited = ::waitpid(pid, &status, WNOHANG);
            if (waited == pid) {
                child_done = true;
            }
        }
        if (std::chrono::steady_clock::now() > deadline) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            child_done = true;
            result.timed_out = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    ::close(pipe_fds[0]);
    if (!child_done) {
        ::waitpid(pid, &status, 0);
    }
    if (result.timed_out) {
        throw Error(ErrorCode::timeout,
                    argv[0] + " exceeded the " + std::to_string(timeout.count()) +
                        "s timeout");
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

namespace {

std::vector<std::string> lock_command(Ecosystem eco) {
    switch (eco) {
    case Ecosystem::python_poetry:
        return {"poetry", "lock"};
    case Ecosystem::rust_cargo:
        return {"cargo", "generate-lockfile"};
    case Ecosystem::ruby_bundler:
        return {"bundle", "lock"};
    case Ecosystem::php_composer:
        // no dry-run: composer resolves fully before it writes a lock
        return {"composer", "update", "--no-install", "--no-interaction"};
    }
    return {};
}

// staging copy skips bulky generated trees that cannot influence locking
bool skip_in_staging(const std::string& basename) {
    return basename == ".git" || basename == "target" || basename == "node_modules" ||
           basename == "vendor" || basename == "venv" || basename == ".venv" ||
           basename == "__pycache__";
}

void copy_tree(const fs::path& from, const fs::path& to) {
    fs::create_directories(to);
    for (const fs::directory_entry& entry : fs::directory_iterator(from)) {
        const std::string basename = entry.path().filename().string();
        if (entry.is_directory()) {
            if (!skip_in_staging(basename)) {
                copy_tree(entry.path(), to / basename);
            }
        } else if (entry.is_regular_file()) {
            fs::copy_file(entry.path(), to / basename,
                          fs::copy_options::overwrite_existing);
        }
    }
}

class TempDir {
public:
    TempDir() {
        std::string tmpl =
            (fs::temp_directory_path() / "lockbom-stage-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) {
            throw Error(ErrorCode::io_error, "mkdtemp failed");
        }
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

} // namespace

LockGenOutcome generate_lockfile(const fs::path& project_dir, Ecosystem ecosystem,
                                 CommandRunner& runner, const LockGenOptions& options) {
    const fs::path project_file = project_dir / project_file_basename(ecosystem);
    if (!fs::exists(project_file)) {
        throw Error(ErrorCode::path_not_found,
                    "no " + std::string(project_file_basename(ecosystem)) + " in " +
                        project_dir.string());
    }

    LockGenOutcome outcome;
    outcome.ecosystem = ecosystem;
    const fs::path lock_path = project_dir / lockfile_basename(ecosystem);
    if (fs::exists(lock_path) && !options.refresh) {
        outcome.status = LockGenStatus::already_present;
        outcome.lock_path = lock_path;
        return outcome;
    }

    TempDir staging;
    copy_tree(project_dir, staging.path());

    const RunResult run =
        runner.run(lock_command(ecosystem), staging.path(), options.timeout);
    const fs::path staged_lock = staging.path() / lockfile_basename(ecosystem);

    if (run.exit_code != 0) {
        outcome.status = LockGenStatus::failed;
        outcome.diagnostic = run.output.empty()
                                 ? "tool exited with code " + std::to_string(run.exit_code)
                                 : run.output;
        return outcome;
    }
    if (!fs::exists(staged_lock)) {
        outcome.status = LockGenStatus::failed;
        outcome.diagnostic = "tool exited 0 but produced no lock file";
        return outcome;
    }
    try {
        (void)lockfile::parse_lockfile_at(staged_lock, ecosystem);
    } catch (const Error& e) {
        outcome.status = LockGenStatus::failed;
        outcome.diagnostic = std::string("generated lock does not parse: ") + e.what();
        return outcome;
    }

    fs::copy_file(staged_lock, lock_path, fs::copy_options::overwrite_existing);
    outcome.status = LockGenStatus::generated;
    outcome.lock_path = lock_path;
    return outcome;
}

namespace {

[[noreturn]] void unsupported_lines(
    const std::vector<std::pair<std::size_t, std::string>>& bad) {
    std::string message = "unsupported requirement lines:";
    for (const auto& [line_no, text] : bad) {
        message += "\n  line " + std::to_string(line_no) + ": " + text;
    }
    throw Error(ErrorCode::unsupported_requirement_line, message);
}

bool valid_req_name(std::string_view name) {
    if (name.empty() || !std::isalnum(static_cast<unsigned char>(name.front()))) {
        return false;
    }
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' &&
            c != '_') {
            return false;
        }
    }
    return true;
}

bool valid_constraint_list(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string_view item = text.substr(
            start, comma == std::string_view::npos ? text.size() - start : comma - start);
        // trim
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
            item.remove_prefix(1);
        }
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
            item.remove_suffix(1);
        }
        static constexpr std::string_view ops[] = {"===", "==", ">=", "<=",
                                                   "!=",  "~=", ">",  "<"};
        bool ok = false;
        for (std::string_view op : ops) {
            if (item.starts_with(op) && item.size() > op.size()) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            return false;
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return true;
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return std::string(s);
}

std::string toml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

} // namespace

TranslatedManifest translate_requirements(std::string_view content) {
    TranslatedManifest out;
    std::vector<std::pair<std::size_t, std::string>> bad;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const std::size_t eol = content.find('\n', pos);
        std::string_view raw = content.substr(
            pos, eol == std::string_view::npos ? content.size() - pos : eol - pos);
        if (eol == std::string_view::npos && raw.empty() && pos >= content.size()) {
            break;
        }
        pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') {
            raw.remove_suffix(1);
        }

        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        // inline comments start at whitespace + '#'
        if (std::size_t hash = line.find(" #"); hash != std::string::npos) {
            line = trim(line.substr(0, hash));
        }

        if (line[0] == '-' || line.find("://") != std::string::npos ||
            line.find(" @ ") != std::string::npos || line.back() == '\\' ||
            line.find('[') != std::string::npos) {
            bad.emplace_back(line_no, line);
            continue;
        }

        RequirementEntry entry;
        std::string rest = line;
        if (std::size_t semi = rest.find(';'); semi != std::string::npos) {
            entry.markers = trim(rest.substr(semi + 1));
            rest = trim(rest.substr(0, semi));
        }

        std::size_t name_end = 0;
        while (name_end < rest.size() &&
               (std::isalnum(static_cast<unsigned char>(rest[name_end])) ||
                rest[name_end] == '.' || rest[name_end] == '-' || rest[name_end] == '_')) {
            ++name_end;
        }
        entry.name = rest.substr(0, name_end);
        entry.constraint = trim(rest.substr(name_end));

        if (!valid_req_name(entry.name) ||
            (!entry.constraint.empty() && !valid_constraint_list(entry.constraint))) {
            bad.emplace_back(line_no, line);
            continue;
        }
        out.entries.push_back(std::move(entry));
    }

    if (!bad.empty()) {
        unsupported_lines(bad);
    }

    // grouped by name: TOML keys are unique, poetry takes an array of
    // constraint tables for multi-constraint dependencies
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RequirementEntry*>> grouped;
    for (const RequirementEntry& e : out.entries) {
        if (grouped[e.name].empty()) {
            order.push_back(e.name);
        }
        grouped[e.name].push_back(&e);
    }

    std::ostringstream manifest;
    manifest << "[tool.poetry]\n";
    manifest << "name = \"translated-project\"\n";
    manifest << "version = \"0.0.0\"\n";
    manifest << "description = \"Dependencies imported from requirements.txt\"\n";
    manifest << "\n[tool.poetry.dependencies]\n";
    manifest << "python = \"*\"\n";
    auto one = [&](const RequirementEntry& e) -> std::string {
        const std::string version = e.constraint.empty() ? "*" : e.constraint;
        if (e.markers.empty()) {
            return "\"" + toml_escape(version) + "\"";
        }
        return "{version = \"" + toml_escape(version) + "\", markers = \"" +
               toml_escape(e.markers) + "\"}";
    };
    for (const std::string& name : order) {
        const auto& group = grouped[name];
        manifest << name << " = ";
        if (group.size() == 1) {
            manifest << one(*group[0]) << "\n";
        } else {
            manifest << "[\n";
            for (const RequirementEntry* e : group) {
                manifest << "    " << one(*e) << ",\n";
            }
            manifest << "]\n";
        }
    }
    out.manifest_text = manifest.str();
    return out;
}

std::vector<RequirementEntry> poetry_manifest_entries(std::string_view manifest_text) {
    const lockfile::TomlValue doc = lockfile::parse_toml(manifest_text);
    const lockfile::TomlValue* tool = doc.get("tool");
    const lockfile::TomlValue* poetry = tool != nullptr ? tool->get("poetry") : nullptr;
    const lockfile::TomlValue* deps =
        poetry != nullptr ? poetry->get("dependencies") : nullptr;
    if (deps == nullptr || !deps->is_table()) {
        throw Error(ErrorCode::malformed_lockfile,
                    "manifest lacks [tool.poetry.dependencies]");
    }

    std::vector<RequirementEntry> out;
    auto push = [&out](const std::string& name, const lockfile::TomlValue& v) {
        RequirementEntry entry;
        entry.name = name;
        if (v.is_string()) {
            entry.constraint = v.str == "*" ? "" : v.str;
        } else if (v.is_table()) {
            entry.constraint = v.get_string_or("version", "*");
            if (entry.constraint == "*") {
                entry.constraint.clear();
            }
            entry.markers = v.get_string_or("markers", "");
        } else {
            throw Error(ErrorCode::malformed_lockfile,
                        "unexpected dependency value for " + name);
        }
        out.push_back(std::move(entry));
    };
    for (const auto& [name, value] : deps->table) {
        if (name == "python") {
            continue;
        }
        if (value.is_array()) {
            for (const lockfile::TomlValue& item : value.array) {
                push(name, item);
            }
        } else {
            push(name, value);
        }
    }
    return out;
}

} // namespace lockbom::lockgen
