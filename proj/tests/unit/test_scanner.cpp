#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "lockbom/advisory/advisory.hpp"
#include "lockbom/error.hpp"
#include "lockbom/lockfile/parsers.hpp"
#include "lockbom/scan/scanner.hpp"
#include "lockbom/sbom/cyclonedx.hpp"
#include "lockbom/version/compare.hpp"
#include "version_gen.hpp"

using namespace lockbom;
using scan::Finding;
using scan::Summary;
using scan::VulnReport;
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

sbom::SbomDocument sbom_of_fixture(const char* dir, Ecosystem eco) {
    const auto deps =
        lockfile::parse_lockfile(slurp(fixture(dir) / lockfile_basename(eco)), eco);
    return sbom::build_sbom(deps);
}

sbom::SbomDocument doc_from(std::vector<std::tuple<const char*, const char*>> parts,
                            Ecosystem eco) {
    DependencySet set(eco, "");
    for (const auto& [name, ver] : parts) {
        Dependency d;
        d.name = name;
        d.version = ver;
        d.ecosystem = eco;
        set.insert(std::move(d));
    }
    return sbom::build_sbom(set);
}

// exhaustive (component x advisory) double loop, independent of scan::scan()
std::multiset<std::pair<std::string, std::string>>
brute_force_pairs(const sbom::SbomDocument& doc, const advisory::AdvisoryDb& db) {
    std::multiset<std::pair<std::string, std::string>> out;
    for (const sbom::Component& c : doc.components) {
        const auto eco = ecosystem_from_purl_type(c.purl.type);
        if (!eco.has_value()) {
            continue;
        }
        for (const advisory::Advisory* adv : db.all()) {
            if (adv->ecosystem != *eco) {
                continue;
            }
            const std::string key =
                c.purl.ns.empty() ? c.purl.name : c.purl.ns + "/" + c.purl.name;
            if (adv->package_name != key) {
                continue;
            }
            try {
                if (advisory::version_affected(c.purl.version, adv->ranges, *eco)) {
                    out.emplace(c.purl.to_string(), adv->id);
                }
            } catch (const Error&) {
                // unparsable version: scan records a warning instead
            }
        }
    }
    return out;
}

std::multiset<std::pair<std::string, std::string>> pairs_of(const VulnReport& report) {
    std::multiset<std::pair<std::string, std::string>> out;
    for (const Finding& f : report.findings) {
        out.emplace(f.component.to_string(), f.advisory_id);
    }
    return out;
}

} // namespace

TEST_CASE("empty SBOM scans to an empty report") {
    const advisory::LoadResult db = advisory::load_advisories(fixture("scan_db"));
    const VulnReport report = scan::scan(sbom::build_sbom(DependencySet{}), db.db);
    CHECK(report.reported_count() == 0);
    CHECK(report.warnings.empty());
}

TEST_CASE("dtool-shaped fixture yields exactly 15 findings") {
    const advisory::LoadResult db = advisory::load_advisories(fixture("scan_db"));
    const auto doc = sbom_of_fixture("locks/cargo_a", Ecosystem::rust_cargo);
    const VulnReport report = scan::scan(doc, db.db);
    CHECK(report.reported_count() == 15);
    CHECK(report.severity_counts().critical == 1);
    CHECK(report.severity_counts().high == 3);

    // two findings land on the same smallvec component
    std::size_t smallvec = 0;
    for (const Finding& f : report.findings) {
        if (f.component.name == "smallvec") {
            ++smallvec;
        }
    }
    CHECK(smallvec == 2);

    // no match for the unaffected fixture
    const auto clean = sbom_of_fixture("locks/cargo_c", Ecosystem::rust_cargo);
    CHECK(scan::scan(clean, db.db).reported_count() == 0);
}

TEST_CASE("ten advisories on one component produce ten findings") {
    const advisory::LoadResult db =
        advisory::load_advisories(fixture("reach_activesupport/advisories"));
    const auto doc = doc_from({{"activesupport", "3.0.1"}, {"rake", "13.0.6"}},
                              Ecosystem::ruby_bundler);
    const VulnReport report = scan::scan(doc, db.db);
    CHECK(report.reported_count() == 10);
    for (const Finding& f : report.findings) {
        CHECK(f.component.name == "activesupport");
        CHECK(f.reachability == reach::Reachability::unchecked);
    }
}

TEST_CASE("scan equals the exhaustive pair enumeration on random fixtures") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> comp_count(0, 12);
    std::uniform_int_distribution<int> adv_count(0, 25);
    std::uniform_int_distribution<int> name_pick(0, 7);
    static const char* names[] = {"alpha", "bravo", "charlie", "delta",
                                  "echo", "foxtrot", "golf", "hotel"};

    for (int seed = 0; seed < 25; ++seed) {
        advisory::AdvisoryDb db;
        const int advisories = adv_count(rng);
        for (int i = 0; i < advisories; ++i) {
            advisory::Advisory adv;
            adv.id = "GHSA-gen0-" + std::to_string(seed) + "-" + std::to_string(i);
            adv.ecosystem = Ecosystem::rust_cargo;
            adv.package_name = names[name_pick(rng)];
            const std::string a = testgen::gen_version(rng, Ecosystem::rust_cargo);
            const std::string b = testgen::gen_version(rng, Ecosystem::rust_cargo);
            const bool a_first = version::compare_versions(a, b, Ecosystem::rust_cargo) !=
                                 version::Order::greater;
            advisory::VersionRange r;
            r.events.push_back(
                {advisory::VersionEvent::Kind::introduced, a_first ? a : b});
            r.events.push_back({advisory::VersionEvent::Kind::fixed, a_first ? b : a});
            adv.ranges.push_back(std::move(r));
            db.add(std::move(adv));
        }

        DependencySet set(Ecosystem::rust_cargo, "");
        const int components = comp_count(rng);
        for (int i = 0; i < components; ++i) {
            Dependency d;
            d.name = names[name_pick(rng)];
            d.version = testgen::gen_version(rng, Ecosystem::rust_cargo);
            d.ecosystem = Ecosystem::rust_cargo;
            set.insert(std::move(d));
        }
        const auto doc = sbom::build_sbom(set);
        CHECK(pairs_of(scan::scan(doc, db)) == brute_force_pairs(doc, db));
    }
}

TEST_CASE("unparsable component versions surface as warnings, never silently") {
    advisory::AdvisoryDb db;
    advisory::Advisory adv;
    adv.id = "GHSA-warn-0001-0001";
    adv.ecosystem = Ecosystem::php_composer;
    adv.package_name = "acme/widget";
    advisory::VersionRange r;
    r.events.push_back({advisory::VersionEvent::Kind::introduced, "0"});
    adv.ranges.push_back(std::move(r));
    db.add(std::move(adv));

    DependencySet set(Ecosystem::php_composer, "");
    Dependency d;
    d.name = "acme/widget";
    d.version = "dev-master";
    d.ecosystem = Ecosystem::php_composer;
    set.insert(std::move(d));

    const VulnReport report = scan::scan(sbom::build_sbom(set), db);
    CHECK(report.reported_count() == 0);
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("dev-master") != std::string::npos);
}

TEST_CASE("dev components are scanned by default and excludable by flag") {
    advisory::AdvisoryDb db;
    advisory::Advisory adv;
    adv.id = "GHSA-devx-0001-0001";
    adv.ecosystem = Ecosystem::php_composer;
    adv.package_name = "phpunit/phpunit";
    advisory::VersionRange r;
    r.events.push_back({advisory::VersionEvent::Kind::introduced, "0"});
    adv.ranges.push_back(std::move(r));
    db.add(std::move(adv));

    const auto doc = sbom_of_fixture("locks/composer_a", Ecosystem::php_composer);
    CHECK(scan::scan(doc, db).reported_count() == 1);
    CHECK(scan::scan(doc, db, {.include_dev = false}).reported_count() == 0);
}

TEST_CASE("monotonicity: more advisories or components never remove findings") {
    const advisory::LoadResult base = advisory::load_advisories(fixture("scan_db"));
    const auto doc = sbom_of_fixture("locks/cargo_a", Ecosystem::rust_cargo);
    const auto before = pairs_of(scan::scan(doc, base.db));

    advisory::AdvisoryDb bigger;
    for (const advisory::Advisory* a : base.db.all()) {
        bigger.add(*a);
    }
    advisory::Advisory extra;
    extra.id = "GHSA-mono-0001-0001";
    extra.ecosystem = Ecosystem::rust_cargo;
    extra.package_name = "serde";
    advisory::VersionRange r;
    r.events.push_back({advisory::VersionEvent::Kind::introduced, "0"});
    extra.ranges.push_back(std::move(r));
    bigger.add(std::move(extra));

    const auto after = pairs_of(scan::scan(doc, bigger));
    CHECK(after.size() == before.size() + 1);
    CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
}

TEST_CASE("report serialization is deterministic") {
    const advisory::LoadResult db = advisory::load_advisories(fixture("scan_db"));
    const auto doc = sbom_of_fixture("locks/cargo_a", Ecosystem::rust_cargo);
    const VulnReport a = scan::scan(doc, db.db);
    const VulnReport b = scan::scan(doc, db.db);
    CHECK(scan::render_report_json(a) == scan::render_report_json(b));
    CHECK(scan::render_report_json(a).find("\"total\": 15") != std::string::npos);
}

TEST_CASE("summarize reproduces the totals arithmetic") {
    CHECK(scan::summarize({}).total.repos == 0);

    std::vector<VulnReport> reports(3);
    reports[0].ecosystem = Ecosystem::rust_cargo;
    reports[0].findings.resize(2);
    reports[1].ecosystem = Ecosystem::rust_cargo; // zero findings: not a vulnerable repo
    reports[2].ecosystem = Ecosystem::ruby_bundler;
    reports[2].findings.resize(4);

    const Summary s = scan::summarize(reports);
    CHECK(s.total.repos == 2);
    CHECK(s.total.vulns == 6);
    CHECK(scan::render_summary_text(s).find("3.00") != std::string::npos);

    // 496 repos totaling 5615 findings average to 11.32
    std::vector<VulnReport> many(496);
    for (std::size_t i = 0; i < many.size(); ++i) {
        many[i].ecosystem = Ecosystem::rust_cargo;
        many[i].findings.resize(i < 495 ? 11 : 5615 - 495 * 11);
    }
    const Summary big = scan::summarize(many);
    CHECK(big.total.repos == 496);
    CHECK(big.total.vulns == 5615);
    CHECK(scan::render_summary_json(big).find("\"avg\": \"11.32\"") != std::string::npos);
}
