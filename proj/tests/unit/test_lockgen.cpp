#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lockbom/error.hpp"
#include "lockbom/lockfile/parsers.hpp"
#include "lockbom/lockgen/lockgen.hpp"
#include "lockbom/sbom/cyclonedx.hpp"
#include "lockbom/sbom/normalize.hpp"

using namespace lockbom;
using namespace lockbom::lockgen;
namespace fs = std::filesystem;

namespace {

fs::path fixture(const std::string& rel) {
    return fs::path(LOCKBOM_FIXTURE_DIR) / rel;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Recorded resolver output: drops a canned lock file into the staging
// directory the way the real tool would.
class RecordedRunner : public CommandRunner {
public:
    RecordedRunner(fs::path recorded_lock, std::string lock_name, int exit_code = 0)
        : recorded_lock_(std::move(recorded_lock)), lock_name_(std::move(lock_name)),
          exit_code_(exit_code) {}

    RunResult run(const std::vector<std::string>& argv, const fs::path& cwd,
                  std::chrono::seconds) override {
        last_argv = argv;
        calls += 1;
        RunResult result;
        result.exit_code = exit_code_;
        if (exit_code_ == 0) {
            fs::copy_file(recorded_lock_, cwd / lock_name_,
                          fs::copy_options::overwrite_existing);
        } else {
            result.output = "resolution failed: recorded diagnostic";
        }
        return result;
    }

    std::vector<std::string> last_argv;
    int calls = 0;

private:
    fs::path recorded_lock_;
    std::string lock_name_;
    int exit_code_;
};

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// digest of every file under a tree, to check "no partial writes"
std::string tree_snapshot(const fs::path& root) {
    std::ostringstream os;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& p : files) {
        os << p.string() << "\n" << slurp(p) << "\n";
    }
    return os.str();
}

} // namespace

TEST_CASE("existing lock means already_present unless refresh") {
    const fs::path dir = fresh_dir("lockbom_gen_present");
    std::ofstream(dir / "Cargo.toml") << "[package]\nname = \"demo\"\n";
    std::ofstream(dir / "Cargo.lock") << "version = 3\n";

    RecordedRunner runner(fixture("locks/cargo_a/Cargo.lock"), "Cargo.lock");
    const LockGenOutcome outcome =
        generate_lockfile(dir, Ecosystem::rust_cargo, runner);
    CHECK(outcome.status == LockGenStatus::already_present);
    CHECK(runner.calls == 0);

    const LockGenOutcome refreshed =
        generate_lockfile(dir, Ecosystem::rust_cargo, runner, {.refresh = true});
    CHECK(refreshed.status == LockGenStatus::generated);
    CHECK(runner.calls == 1);
    CHECK(runner.last_argv == std::vector<std::string>{"cargo", "generate-lockfile"});
    fs::remove_all(dir);
}

TEST_CASE("generated lock is copied back and parses") {
    const fs::path dir = fresh_dir("lockbom_gen_ok");
    std::ofstream(dir / "Cargo.toml") << "[package]\nname = \"demo\"\n";

    RecordedRunner runner(fixture("locks/cargo_a/Cargo.lock"), "Cargo.lock");
    const LockGenOutcome outcome =
        generate_lockfile(dir, Ecosystem::rust_cargo, runner);
    REQUIRE(outcome.status == LockGenStatus::generated);
    REQUIRE(outcome.lock_path.has_value());
    CHECK(fs::exists(*outcome.lock_path));
    CHECK(slurp(*outcome.lock_path) == slurp(fixture("locks/cargo_a/Cargo.lock")));
    fs::remove_all(dir);
}

TEST_CASE("tool failure is an outcome and leaves the project untouched") {
    const fs::path dir = fresh_dir("lockbom_gen_fail");
    std::ofstream(dir / "Cargo.toml") << "[package]\nname = \"demo\"\n";
    std::ofstream(dir / "src.rs") << "fn main() {}\n";
    const std::string before = tree_snapshot(dir);

    RecordedRunner runner(fixture("locks/cargo_a/Cargo.lock"), "Cargo.lock", 101);
    const LockGenOutcome outcome =
        generate_lockfile(dir, Ecosystem::rust_cargo, runner);
    CHECK(outcome.status == LockGenStatus::failed);
    CHECK_FALSE(outcome.diagnostic.empty());
    CHECK(tree_snapshot(dir) == before);
    fs::remove_all(dir);
}

TEST_CASE("missing project file is a precondition error") {
    const fs::path dir = fresh_dir("lockbom_gen_nofile");
    RecordedRunner runner(fixture("locks/cargo_a/Cargo.lock"), "Cargo.lock");
    CHECK_THROWS_AS((void)generate_lockfile(dir, Ecosystem::rust_cargo, runner), Error);
    fs::remove_all(dir);
}

TEST_CASE("missing executable raises ToolNotInstalled") {
    const fs::path dir = fresh_dir("lockbom_gen_notool");
    std::ofstream(dir / "Cargo.toml") << "[package]\n";
    SystemCommandRunner real;
    try {
        (void)real.run({"lockbom-no-such-tool-on-path"}, dir, std::chrono::seconds(5));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::tool_not_installed);
    }
    fs::remove_all(dir);
}

TEST_CASE("system runner captures output and exit codes") {
    SystemCommandRunner real;
    const RunResult echoed = real.run({"sh", "-c", "echo out; echo err 1>&2; exit 3"},
                                      fs::temp_directory_path(), std::chrono::seconds(10));
    CHECK(echoed.exit_code == 3);
    CHECK(echoed.output.find("out") != std::string::npos);
    CHECK(echoed.output.find("err") != std::string::npos);

    try {
        (void)real.run({"sh", "-c", "sleep 30"}, fs::temp_directory_path(),
                       std::chrono::seconds(1));
        FAIL("expected timeout");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::timeout);
    }
}

TEST_CASE("translate_requirements maps constraints verbatim") {
    const TranslatedManifest t = translate_requirements("gym==0.26.0\n");
    REQUIRE(t.entries.size() == 1);
    CHECK(t.entries[0].name == "gym");
    CHECK(t.entries[0].constraint == "==0.26.0");
    CHECK(t.manifest_text.find("gym = \"==0.26.0\"") != std::string::npos);

    const TranslatedManifest empty = translate_requirements("# nothing\n\n");
    CHECK(empty.entries.empty());
    CHECK(empty.manifest_text.find("[tool.poetry.dependencies]") != std::string::npos);
}

TEST_CASE("translate is lossless over the supported syntax") {
    const std::string content = slurp(fixture("case_study/requirements.txt"));
    const TranslatedManifest t = translate_requirements(content);
    REQUIRE(t.entries.size() == 15);

    std::size_t pinned = 0;
    for (const RequirementEntry& e : t.entries) {
        if (e.constraint.starts_with("==")) {
            ++pinned;
        }
    }
    CHECK(pinned == 5);

    // markers survive verbatim
    bool found_marker = false;
    for (const RequirementEntry& e : t.entries) {
        if (e.name == "typing_extensions") {
            found_marker = true;
            CHECK(e.markers == "python_version < \"3.11\"");
        }
    }
    CHECK(found_marker);

    // re-parsing the emitted manifest recovers the (name, constraint) multiset
    auto key = [](const RequirementEntry& e) {
        return e.name + "|" + e.constraint + "|" + e.markers;
    };
    std::multiset<std::string> source;
    for (const RequirementEntry& e : t.entries) {
        source.insert(key(e));
    }
    std::multiset<std::string> recovered;
    for (const RequirementEntry& e : poetry_manifest_entries(t.manifest_text)) {
        recovered.insert(key(e));
    }
    CHECK(source == recovered);
}

TEST_CASE("duplicate names with different markers become a constraint array") {
    const TranslatedManifest t = translate_requirements(
        "tomli==1.0 ; python_version < \"3.8\"\n"
        "tomli==2.0 ; python_version >= \"3.8\"\n");
    REQUIRE(t.entries.size() == 2);
    CHECK(t.manifest_text.find("tomli = [") != std::string::npos);
    CHECK(poetry_manifest_entries(t.manifest_text).size() == 2);
}

TEST_CASE("unsupported requirement forms are rejected with all offender lines") {
    try {
        (void)translate_requirements(
            "numpy>=1.0\n"
            "-r other.txt\n"
            "-e .\n"
            "https://example.com/pkg.tar.gz\n"
            "package[extra]==1.0\n");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unsupported_requirement_line);
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("line 4") != std::string::npos);
        CHECK(msg.find("line 5") != std::string::npos);
        CHECK(msg.find("numpy") == std::string::npos);
    }
}

TEST_CASE("case-study pipeline: translate, lock against recorded output, build sbom") {
    const fs::path dir = fresh_dir("lockbom_case_study");
    const TranslatedManifest t =
        translate_requirements(slurp(fixture("case_study/requirements.txt")));
    std::ofstream(dir / "pyproject.toml") << t.manifest_text;

    RecordedRunner runner(fixture("case_study/recorded_poetry.lock"), "poetry.lock");
    const LockGenOutcome outcome =
        generate_lockfile(dir, Ecosystem::python_poetry, runner);
    REQUIRE(outcome.status == LockGenStatus::generated);
    CHECK(runner.last_argv == std::vector<std::string>{"poetry", "lock"});

    const auto deps =
        lockfile::parse_lockfile_at(*outcome.lock_path, Ecosystem::python_poetry);
    const auto doc = sbom::build_sbom(deps);
    CHECK(doc.components.size() == 32);
    CHECK(doc.components.size() > t.entries.size());

    // every declared name is present post-normalization
    const auto pairs = sbom::pair_set_of(doc);
    for (const RequirementEntry& e : t.entries) {
        const std::string canonical =
            sbom::normalize_name(e.name, Ecosystem::python_poetry);
        const bool present =
            std::any_of(pairs.begin(), pairs.end(),
                        [&](const auto& p) { return p.first == canonical; });
        CAPTURE(e.name);
        CHECK(present);
    }
    fs::remove_all(dir);
}
