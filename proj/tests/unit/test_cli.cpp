#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "goas/io.hpp"
#include "goas/rng.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kWork = (fs::temp_directory_path() / "goas_cli_tests").string();

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args) {
    fs::create_directories(kWork);
    const std::string out_path = kWork + "/stdout.txt";
    const std::string err_path = kWork + "/stderr.txt";
    const std::string cmd =
        std::string(GOAS_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    const int rc = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = goas::read_file(out_path);
    res.err = goas::read_file(err_path);
    return res;
}

std::string small_config(std::size_t k, std::size_t rays, double eps,
                         std::uint64_t max_iter = 0) {
    std::string text = "[target]\nname = banana\n\n[discretize]\nscheme = grid\nk = " +
                       std::to_string(k) + "\n\n[reflector]\nrays = " + std::to_string(rays) +
                       "\nepsilon = " + goas::format_double(eps) +
                       "\nmax_iterations = " + std::to_string(max_iter) +
                       "\n\n[domain]\nprobes = 3000\n\n[run]\nthreads = 2\n";
    return text;
}

} // namespace

TEST_CASE("targets-list names every built-in target") {
    const auto res = run_cli("targets-list");
    CHECK(res.exit_code == 0);
    for (const char* name : {"funnel", "banana", "mog", "ring", "cosine", "bod", "beam",
                             "acoustic"})
        CHECK(res.out.find("target." + std::string(name)) != std::string::npos);
    CHECK(res.out.find("[reflector]") != std::string::npos); // default config echo
}

TEST_CASE("build fails cleanly on a missing config") {
    const auto res = run_cli("build --config " + kWork + "/no_such.cfg --out " + kWork + "/o");
    CHECK(res.exit_code == 1);
    CHECK(res.err.find("error:") != std::string::npos);
}

TEST_CASE("build + sample + diagnose round trip") {
    fs::remove_all(kWork + "/bananaA");
    goas::write_file(kWork + "/banana.cfg", small_config(16, 20000, 1e-4));
    const auto build = run_cli("build --config " + kWork + "/banana.cfg --out " + kWork +
                               "/bananaA");
    REQUIRE(build.exit_code == 0);
    CHECK(build.out.find("converged = true") != std::string::npos);

    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(kWork + "/bananaA")) {
        (void)e;
        ++files;
    }
    CHECK(files == 4);

    const std::string csv_a = kWork + "/a.csv";
    const auto s1 = run_cli("sample --artifacts " + kWork + "/bananaA --count 1000 --seed 9 --out " +
                            csv_a);
    REQUIRE(s1.exit_code == 0);
    CHECK(s1.out.find("mean_retries") != std::string::npos);

    const std::string bytes_first = goas::read_file(csv_a);
    {
        // header + 1000 rows
        std::size_t lines = 0;
        for (char c : bytes_first)
            if (c == '\n') ++lines;
        CHECK(lines == 1001);
        CHECK(bytes_first.rfind("z1,z2,cell,retries\n", 0) == 0);
    }

    // repeated seed: identical bytes
    const auto s2 = run_cli("sample --artifacts " + kWork + "/bananaA --count 1000 --seed 9 --out " +
                            kWork + "/a2.csv");
    REQUIRE(s2.exit_code == 0);
    CHECK(goas::read_file(kWork + "/a2.csv") == bytes_first);

    // different seed for the diagnose pairing
    const auto s3 = run_cli("sample --artifacts " + kWork + "/bananaA --count 1000 --seed 10 --out " +
                            kWork + "/b.csv");
    REQUIRE(s3.exit_code == 0);

    const auto diag = run_cli("diagnose --a " + csv_a + " --b " + kWork +
                              "/b.csv --p 2 --reg 0.001 --support 500");
    REQUIRE(diag.exit_code == 0);
    CHECK(diag.out.find("p = 2") != std::string::npos);
    CHECK(diag.out.find("reg = 0.001") != std::string::npos);
    CHECK(diag.out.find("w_distance = ") != std::string::npos);
    CHECK(diag.out.find("a.moments.theta1.mean") != std::string::npos);
    CHECK(diag.out.find("a.ess = ") != std::string::npos);

    // identical files: distance is only the entropic bias
    const auto self = run_cli("diagnose --a " + csv_a + " --b " + csv_a +
                              " --p 2 --reg 0.001 --support 400");
    REQUIRE(self.exit_code == 0);
    const auto pos = self.out.find("w_distance = ");
    const double w = goas::parse_double(
        self.out.substr(pos + 13, self.out.find('\n', pos) - pos - 13));
    CHECK(w < 0.05);
}

TEST_CASE("corrupted artifacts are refused with no partial output") {
    fs::remove_all(kWork + "/bananaB");
    goas::write_file(kWork + "/banana.cfg", small_config(9, 8000, 1e-4));
    const auto build = run_cli("build --config " + kWork + "/banana.cfg --out " + kWork +
                               "/bananaB");
    REQUIRE(build.exit_code == 0);

    auto text = goas::read_file(kWork + "/bananaB/reflector.txt");
    text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
    goas::write_file(kWork + "/bananaB/reflector.txt", text);

    const std::string out_csv = kWork + "/corrupt.csv";
    fs::remove(out_csv);
    const auto res = run_cli("sample --artifacts " + kWork + "/bananaB --count 100 --seed 3 --out " +
                             out_csv);
    CHECK(res.exit_code == 1);
    CHECK_FALSE(fs::exists(out_csv));
}

TEST_CASE("unreachable tolerance exits with the quality code") {
    fs::remove_all(kWork + "/bananaC");
    goas::write_file(kWork + "/tiny.cfg", small_config(16, 100, 1e-6, 4000));
    const auto res = run_cli("build --config " + kWork + "/tiny.cfg --out " + kWork + "/bananaC");
    CHECK(res.exit_code == 2);
    // best iterate still written, manifest flags the failure
    CHECK(fs::exists(kWork + "/bananaC/reflector.txt"));
    const auto manifest = goas::read_file(kWork + "/bananaC/manifest.txt");
    CHECK(manifest.find("converged = false") != std::string::npos);
    CHECK(manifest.find("warning_") != std::string::npos);
}

TEST_CASE("diagnose validates its inputs") {
    goas::write_file(kWork + "/bad.csv", "not,a,sample\n1,2,3\n");
    const auto res = run_cli("diagnose --a " + kWork + "/bad.csv --b " + kWork + "/bad.csv");
    CHECK(res.exit_code == 1);

    const auto none = run_cli("diagnose --a " + kWork + "/bad.csv");
    CHECK(none.exit_code == 1);
}

TEST_CASE("gaussian moments through the diagnose command") {
    // write a gaussian CSV by hand and check the reported moments
    goas::RngStream rng(81);
    std::ostringstream csv;
    csv << "z1,z2,cell,retries\n";
    for (int i = 0; i < 20000; ++i)
        csv << goas::format_double(rng.gaussian()) << "," << goas::format_double(rng.gaussian())
            << ",0,0\n";
    goas::write_file(kWork + "/gauss.csv", csv.str());
    const auto res = run_cli("diagnose --a " + kWork + "/gauss.csv --b " + kWork +
                             "/gauss.csv --support 200");
    REQUIRE(res.exit_code == 0);

    auto grab = [&](const std::string& key) {
        const auto pos = res.out.find(key + " = ");
        REQUIRE(pos != std::string::npos);
        const auto end = res.out.find('\n', pos);
        return goas::parse_double(res.out.substr(pos + key.size() + 3, end - pos - key.size() - 3));
    };
    CHECK(grab("a.moments.theta1.mean") == Catch::Approx(0.0).margin(0.03));
    CHECK(grab("a.moments.theta1.variance") == Catch::Approx(1.0).margin(0.04));
    CHECK(grab("a.moments.theta2.skewness") == Catch::Approx(0.0).margin(0.06));
    CHECK(grab("a.moments.theta2.kurtosis") == Catch::Approx(3.0).margin(0.12));
    CHECK(grab("a.ess") == Catch::Approx(20000.0).epsilon(0.10));
}
