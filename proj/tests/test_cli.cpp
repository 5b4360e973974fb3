// End-to-end checks of the swcert binary: exit codes, certificate output
// round-trip, and byte-identical sweep output. The binary path arrives in
// the SWCERT_BIN environment variable; config files are written to a
// scratch directory.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "switched/config.hpp"

namespace {

std::string binary_path() {
    const char* env = std::getenv("SWCERT_BIN");
    REQUIRE_MESSAGE(env != nullptr, "SWCERT_BIN must point at the swcert binary");
    return env;
}

std::string scratch_dir() {
    static std::string dir = [] {
        std::string tmpl = "/tmp/swcert_cli_XXXXXX";
        REQUIRE(mkdtemp(tmpl.data()) != nullptr);
        return tmpl;
    }();
    return dir;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

const char* kDelayFree = R"({
  "schema_version": 1,
  "kind": "delay_free_ncs",
  "plant": {"A": [[0.0, 1.0], [2.0, 1.0]], "B": [[0.0], [1.0]]},
  "gain": [[-2.0, -1.0]],
  "failure_ratio": 0.48,
  "analysis": {"h": 2, "norm": "spectral", "epsilon": 1e-16}
})";

}  // namespace

TEST_CASE("certify exit codes") {
    const std::string dir = scratch_dir();
    write_file(dir + "/stable.json", kDelayFree);
    CHECK(run("certify --config " + dir + "/stable.json") == 0);

    std::string inconclusive(kDelayFree);
    inconclusive.replace(inconclusive.find("0.48"), 4, "0.50");
    write_file(dir + "/inconclusive.json", inconclusive);
    CHECK(run("certify --config " + dir + "/inconclusive.json") == 2);

    std::string malformed(kDelayFree);
    malformed.replace(malformed.find("[[0.0], [1.0]]"), 14, "[[0.0], [1.0, 3.0]]");
    write_file(dir + "/malformed.json", malformed);
    CHECK(run("certify --config " + dir + "/malformed.json") == 1);

    CHECK(run("certify --config " + dir + "/missing.json") == 1);
}

TEST_CASE("machine-readable certificate re-parses to an equal value") {
    const std::string dir = scratch_dir();
    write_file(dir + "/stable.json", kDelayFree);
    const std::string out = dir + "/cert.json";
    REQUIRE(run("certify --config " + dir + "/stable.json --out " + out) == 0);
    const switched::StabilityCertificate cert = switched::certificate_from_json(read_file(out));
    CHECK(cert.h == 2);
    CHECK(cert.verdict == switched::Verdict::CertifiedStable);
    CHECK(cert.objective < 0.0);
    // serialize -> parse -> serialize is a fixed point
    CHECK(switched::certificate_to_json(cert) + "\n" == read_file(out));
}

TEST_CASE("sweep output is byte-identical across runs and worker counts") {
    const std::string dir = scratch_dir();
    write_file(dir + "/scan.json", kDelayFree);
    const std::string base =
        "sweep --config " + dir + "/scan.json --h 1 --h-max 4 --param rho --grid 0.3,0.48,0.6 "
        "--no-timing --out ";
    REQUIRE(run(base + dir + "/a.csv --workers 1") == 0);
    REQUIRE(run(base + dir + "/b.csv --workers 2") == 0);
    REQUIRE(run(base + dir + "/c.csv --workers 2") == 0);
    const std::string a = read_file(dir + "/a.csv");
    CHECK(a == read_file(dir + "/b.csv"));
    CHECK(a == read_file(dir + "/c.csv"));
    CHECK(a.substr(0, a.find('\n')) == "h,param,value,J,verdict,status,wall_ms");
}

TEST_CASE("oracle and bench emit the published counts") {
    const std::string dir = scratch_dir();
    REQUIRE(run("bench --bench-h-max 15 --bench-m-max 3 --out " + dir + "/bench.csv") == 0);
    const std::string bench = read_file(dir + "/bench.csv");
    CHECK(bench.find("15,3,14348907,136") != std::string::npos);
}
