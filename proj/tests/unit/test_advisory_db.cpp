#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "lockbom/advisory/advisory.hpp"
#include "lockbom/error.hpp"
#include "lockbom/version/compare.hpp"
#include "version_gen.hpp"

using namespace lockbom;
using namespace lockbom::advisory;
namespace fs = std::filesystem;

namespace {

fs::path make_db_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

const char* smallvec_advisory = R"({
  "id": "CVE-2021-25900",
  "summary": "buffer overflow in SmallVec::insert_many",
  "severity": "critical",
  "affected": [
    {
      "package": {"ecosystem": "crates.io", "name": "smallvec"},
      "ranges": [
        {"type": "ECOSYSTEM", "events": [{"introduced": "0.6.3"}, {"fixed": "0.6.14"}]},
        {"type": "ECOSYSTEM", "events": [{"introduced": "1.0.0"}, {"fixed": "1.6.1"}]}
      ],
      "ecosystem_specific": {
        "vulnerable_symbols": ["smallvec::SmallVec::insert_many"]
      }
    }
  ]
})";

// Membership decided by pairwise comparisons, written without looking at
// range_contains: enumerates the order relation explicitly.
bool oracle_affected(const std::string& v, const std::vector<VersionRange>& ranges,
                     Ecosystem eco) {
    using version::Order;
    auto leq = [&](const std::string& a, const std::string& b) {
        return version::compare_versions(a, b, eco) != Order::greater;
    };
    auto lt = [&](const std::string& a, const std::string& b) {
        return version::compare_versions(a, b, eco) == Order::less;
    };
    for (const VersionRange& r : ranges) {
        bool ok = true;
        for (const VersionEvent& e : r.events) {
            if (e.kind == VersionEvent::Kind::introduced) {
                ok = ok && (e.version == "0" || leq(e.version, v));
            } else if (e.kind == VersionEvent::Kind::fixed) {
                ok = ok && lt(v, e.version);
            } else {
                ok = ok && leq(v, e.version);
            }
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("load and lookup") {
    const fs::path dir = make_db_dir("lockbom_advisory_test");
    write_file(dir / "CVE-2021-25900.json", smallvec_advisory);

    const LoadResult loaded = load_advisories(dir);
    CHECK(loaded.warnings.empty());
    CHECK(loaded.db.size() == 1);

    const auto& hits = loaded.db.lookup(Ecosystem::rust_cargo, "smallvec");
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == "CVE-2021-25900");
    CHECK(hits[0].severity == Severity::critical);
    REQUIRE(hits[0].ranges.size() == 2);
    REQUIRE(hits[0].vulnerable_symbols.size() == 1);
    CHECK(hits[0].vulnerable_symbols[0].module_path == "smallvec::SmallVec");
    CHECK(hits[0].vulnerable_symbols[0].symbol == "insert_many");

    CHECK(loaded.db.lookup(Ecosystem::rust_cargo, "serde").empty());
    CHECK(loaded.db.lookup(Ecosystem::ruby_bundler, "smallvec").empty());
    fs::remove_all(dir);
}

TEST_CASE("empty directory loads an empty db") {
    const fs::path dir = make_db_dir("lockbom_advisory_empty");
    CHECK(load_advisories(dir).db.size() == 0);
    fs::remove_all(dir);
}

TEST_CASE("python package names are normalized on load") {
    const fs::path dir = make_db_dir("lockbom_advisory_norm");
    write_file(dir / "GHSA-aaaa-bbbb-cccc.json", R"({
      "id": "GHSA-aaaa-bbbb-cccc",
      "severity": "low",
      "affected": [{
        "package": {"ecosystem": "PyPI", "name": "typing_extensions"},
        "ranges": [{"events": [{"introduced": "0"}, {"fixed": "4.0.0"}]}]
      }]
    })");
    const LoadResult loaded = load_advisories(dir);
    CHECK(loaded.db.lookup(Ecosystem::python_poetry, "typing-extensions").size() == 1);
    CHECK(loaded.db.lookup(Ecosystem::python_poetry, "typing_extensions").empty());
    fs::remove_all(dir);
}

TEST_CASE("malformed advisories fail fast by default, skip on request") {
    const fs::path dir = make_db_dir("lockbom_advisory_bad");
    write_file(dir / "bad.json", "{broken");
    write_file(dir / "good.json", smallvec_advisory);

    CHECK_THROWS_AS((void)load_advisories(dir), Error);

    const LoadResult lenient = load_advisories(dir, {.fail_fast = false});
    CHECK(lenient.db.size() == 1);
    REQUIRE(lenient.warnings.size() == 1);
    CHECK(lenient.warnings[0].find("bad.json") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("duplicate ids across files are rejected") {
    const fs::path dir = make_db_dir("lockbom_advisory_dup");
    write_file(dir / "a.json", smallvec_advisory);
    write_file(dir / "b.json", smallvec_advisory);
    CHECK_THROWS_AS((void)load_advisories(dir), Error);
    fs::remove_all(dir);
}

TEST_CASE("load is deterministic") {
    const fs::path dir = make_db_dir("lockbom_advisory_det");
    write_file(dir / "z.json", smallvec_advisory);
    write_file(dir / "a.json", R"({
      "id": "GHSA-xxxx-yyyy-zzzz",
      "affected": [{
        "package": {"ecosystem": "crates.io", "name": "smallvec"},
        "ranges": [{"events": [{"introduced": "0"}]}]
      }]
    })");
    const LoadResult first = load_advisories(dir);
    const LoadResult second = load_advisories(dir);
    const auto& a = first.db.lookup(Ecosystem::rust_cargo, "smallvec");
    const auto& b = second.db.lookup(Ecosystem::rust_cargo, "smallvec");
    REQUIRE(a.size() == 2);
    CHECK(a[0].id == b[0].id);
    CHECK(a[1].id == b[1].id);
    CHECK(a[0].id < a[1].id); // sorted within the bucket
    fs::remove_all(dir);
}

TEST_CASE("symbol reference dialects") {
    SymbolRef r = parse_symbol_ref("decode");
    CHECK(r.module_path.empty());
    CHECK(r.symbol == "decode");

    r = parse_symbol_ref("yaml.load");
    CHECK(r.module_path == "yaml");
    CHECK(r.symbol == "load");

    r = parse_symbol_ref("ActiveSupport::MessageVerifier#verify");
    CHECK(r.module_path == "ActiveSupport::MessageVerifier");
    CHECK(r.symbol == "verify");

    r = parse_symbol_ref("active_support::*");
    CHECK(r.module_path == "active_support");
    CHECK(r.symbol.empty());

    CHECK_THROWS_AS((void)parse_symbol_ref("*"), Error);
}

TEST_CASE("range boundary semantics") {
    VersionRange range;
    range.events = {{VersionEvent::Kind::introduced, "1.0.0"},
                    {VersionEvent::Kind::fixed, "2.0.0"}};
    CHECK(range_contains("1.5.0", range, Ecosystem::rust_cargo));
    CHECK(range_contains("1.0.0", range, Ecosystem::rust_cargo)); // inclusive
    CHECK_FALSE(range_contains("2.0.0", range, Ecosystem::rust_cargo)); // exclusive
    CHECK_FALSE(range_contains("0.9.9", range, Ecosystem::rust_cargo));

    VersionRange last;
    last.events = {{VersionEvent::Kind::introduced, "0"},
                   {VersionEvent::Kind::last_affected, "3.0.1"}};
    CHECK(range_contains("3.0.1", last, Ecosystem::ruby_bundler)); // inclusive
    CHECK_FALSE(range_contains("3.0.2", last, Ecosystem::ruby_bundler));
    CHECK(range_contains("0.0.1", last, Ecosystem::ruby_bundler));

    VersionRange open;
    open.events = {{VersionEvent::Kind::introduced, "1.0.0"}};
    CHECK(range_contains("999.0.0", open, Ecosystem::rust_cargo));
}

TEST_CASE("version_affected equals the pairwise-comparison oracle") {
    std::mt19937 rng(2024);
    for (Ecosystem eco : all_ecosystems) {
        CAPTURE(to_string(eco));
        // 20 random ranges
        std::vector<VersionRange> ranges;
        for (int i = 0; i < 20; ++i) {
            const std::string a = testgen::gen_version(rng, eco);
            const std::string b = testgen::gen_version(rng, eco);
            const bool a_first =
                version::compare_versions(a, b, eco) != version::Order::greater;
            VersionRange r;
            r.events.push_back({VersionEvent::Kind::introduced, a_first ? a : b});
            switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
            case 0:
                r.events.push_back({VersionEvent::Kind::fixed, a_first ? b : a});
                break;
            case 1:
                r.events.push_back({VersionEvent::Kind::last_affected, a_first ? b : a});
                break;
            default:
                break; // open-ended
            }
            ranges.push_back(std::move(r));
        }
        // 200 random versions against them
        for (int i = 0; i < 200; ++i) {
            const std::string v = testgen::gen_version(rng, eco);
            CAPTURE(v);
            CHECK(version_affected(v, ranges, eco) == oracle_affected(v, ranges, eco));
        }
    }
}
