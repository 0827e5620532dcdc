#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <vector>

#include "goas/io.hpp"

using namespace goas;

TEST_CASE("doubles survive text round trips bit-exactly") {
    RngStream rng(3);
    for (int rep = 0; rep < 2000; ++rep) {
        double v = std::exp(rng.uniform(-300.0, 300.0) * 0.1) *
                   (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform01();
        const double back = parse_double(format_double(v));
        CHECK(back == v);
    }
    CHECK(parse_double(format_double(0.1)) == 0.1);
    CHECK_THROWS_AS(parse_double("1.5x"), Error);
    CHECK_THROWS_AS(parse_double("zz"), Error);
}

TEST_CASE("fnv1a hashes differ on small perturbations") {
    CHECK(fnv1a64("hello") != fnv1a64("hellp"));
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("document parser handles scalars, blocks and errors") {
    const std::string text =
        "a = 1\n# comment\nname = banana target\nbegin m\n1 2\n3 4\nend m\n";
    const Document doc = parse_document(text);
    CHECK(doc.need("a") == "1");
    CHECK(doc.need("name") == "banana target");
    CHECK(doc.need_block("m").size() == 2);
    CHECK(doc.need_block("m")[1][1] == 4.0);
    CHECK_THROWS_AS(doc.need("missing"), Error);
    CHECK_THROWS_AS(parse_document("begin x\n1 2\n"), Error);
    CHECK_THROWS_AS(parse_document("no equals here\n"), Error);
}

TEST_CASE("reflector serialization round-trips bit-exactly") {
    RngStream rng(5);
    Reflector r;
    r.sphere_dim = 2;
    r.cell_count = 7;
    r.orientation = Orientation::convex;
    r.d1 = 1.0;
    r.total_energy = 1.0;
    r.achieved_residual = 3.14159e-5 / 3.0;
    r.iterations = 1234;
    for (std::size_t i = 0; i < r.cell_count; ++i) {
        std::vector<double> v{rng.gaussian(), rng.gaussian(), -std::abs(rng.gaussian()) - 0.1};
        auto axis = UnitDirection::normalized(v);
        r.axes.insert(r.axes.end(), axis.coords().begin(), axis.coords().end());
        r.focal.push_back(rng.uniform(0.3, 3.0));
        r.energies.push_back(rng.uniform01() + 0.01);
    }

    const std::string text = serialize_reflector(r, 42);
    std::uint64_t seed = 0;
    const Reflector back = deserialize_reflector(text, &seed);
    CHECK(seed == 42);
    CHECK(back.axes == r.axes);
    CHECK(back.focal == r.focal);
    CHECK(back.energies == r.energies);
    CHECK(back.achieved_residual == r.achieved_residual);
    CHECK(back.iterations == r.iterations);
    // write -> read -> write is byte stable
    CHECK(serialize_reflector(back, seed) == text);
}

TEST_CASE("dual serialization round-trips") {
    DualReflector d;
    d.sphere_dim = 2;
    d.cell_count = 2;
    d.orientation = Orientation::convex;
    d.kind = ProposalKind::gaussian;
    d.proposal_width = 0.37;
    d.cell_dirs = {0.6, 0.0, 0.8, -0.6, 0.0, 0.8};
    d.mean_radius = {1.7, 1.9};
    d.dual_focal = {1.0 / 1.7, 1.0 / 1.9};
    d.cell_centers = {0.5, 0.25, -0.5, 0.25};
    d.build_counts = {100, 200};
    d.domain = Box({-1.0, -1.0}, {1.0, 1.0});
    d.sampling_box = d.domain.padded_abs(0.5 * d.proposal_width);

    const std::string text = serialize_dual(d);
    const DualReflector back = deserialize_dual(text);
    CHECK(back.cell_dirs == d.cell_dirs);
    CHECK(back.mean_radius == d.mean_radius);
    CHECK(back.dual_focal == d.dual_focal);
    CHECK(back.cell_centers == d.cell_centers);
    CHECK(back.build_counts == d.build_counts);
    CHECK(back.kind == ProposalKind::gaussian);
    CHECK(back.sampling_box.lower[0] == d.sampling_box.lower[0]);
    CHECK(serialize_dual(back) == text);
}

TEST_CASE("target measure serialization recomputes consistent lifts") {
    TargetSpec t = make_target("banana");
    Box domain({-2.0, -2.0}, {2.0, 2.0});
    auto m = discretize_target(t.density, domain, 12, Scheme::hammersley, 1.0, RngStream(1));
    const std::string text = serialize_target_measure(m);
    const auto back = deserialize_target_measure(text);
    CHECK(back.points == m.points);
    CHECK(back.energies == m.energies);
    CHECK(back.axes == m.axes); // lift is deterministic
    CHECK(serialize_target_measure(back) == text);
}

TEST_CASE("sample csv writes the documented header and round-trips") {
    SampleBatch batch;
    batch.dim = 2;
    batch.count = 3;
    batch.points = {0.1, 0.2, -1.5, 2.5, 3.25, -0.75};
    batch.cells = {0, 4, 2};
    batch.retries = {0, 3, 1};
    const std::string csv = sample_batch_csv(batch);
    CHECK(csv.rfind("z1,z2,cell,retries\n", 0) == 0);

    const CsvSamples back = parse_sample_csv(csv);
    CHECK(back.dim == 2);
    CHECK(back.count() == 3);
    CHECK(back.points == batch.points);
    CHECK(back.cells == std::vector<std::int32_t>{0, 4, 2});
    CHECK(back.retries == std::vector<std::int32_t>{0, 3, 1});

    CHECK_THROWS_AS(parse_sample_csv("bogus,header\n1,2\n"), Error);
    CHECK_THROWS_AS(parse_sample_csv("z1,z2,cell,retries\n"), Error);
}

TEST_CASE("ini parser maps sections to dotted keys") {
    const std::string text =
        "[target]\nname = bod\n\n[reflector]\nrays = 1000\nepsilon = 1e-4\n"
        "# comment\n[run]\nthreads = 2\n";
    const Ini ini = Ini::parse(text);
    CHECK(ini.get("target.name", "") == "bod");
    CHECK(ini.get_u64("reflector.rays", 0) == 1000);
    CHECK(ini.get_double("reflector.epsilon", 0.0) == 1e-4);
    CHECK(ini.get_u64("run.threads", 0) == 2);
    CHECK(ini.get("nope.key", "fallback") == "fallback");
    CHECK_THROWS_AS(Ini::parse("[target\nname = x\n"), Error);

    const Ini lists = Ini::parse("[sweep]\nk = 50, 100,200\n");
    const auto k = lists.get_list("sweep.k");
    REQUIRE(k.size() == 3);
    CHECK(k[1] == 100.0);
}

TEST_CASE("write_file leaves no partial output and read_file reports missing") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "goas_io_test").string();
    fs::remove_all(dir);
    write_file(dir + "/x/y.txt", "payload");
    CHECK(read_file(dir + "/x/y.txt") == "payload");
    CHECK_THROWS_AS(read_file(dir + "/missing.txt"), Error);
    fs::remove_all(dir);
}
