#include "qamp/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>

using namespace qamp;

TEST_CASE("doubles round-trip through their text form")
{
    for (double v : {0.1, 1.0 / 3.0, 2.0 / 87.0, 1e-300, 0.0, -0.38, M_PI,
                     0.30000000000000004}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("range parsing: endpoints, single values, rejections")
{
    std::vector<double> r = parse_range("0:2:0.1");
    CHECK(r.size() == 21);
    CHECK(r.front() == 0.0);
    CHECK(r.back() == doctest::Approx(2.0).epsilon(1e-12));

    CHECK(parse_range("1:1:1") == std::vector<double>{1.0});
    CHECK(parse_range("0:0:1") == std::vector<double>{0.0});
    CHECK(parse_range("0.5") == std::vector<double>{0.5});
    // endpoint included when within half a step
    CHECK(parse_range("0:1:0.3").size() == 4);

    CHECK_THROWS_AS(parse_range("2:1:0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("0:1:-0.1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("a:b:c"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("1:2"), std::invalid_argument);
}

TEST_CASE("config parsing: sections, comments, diagnostics")
{
    const std::string text =
        "# top comment\n"
        "[pipeline]\n"
        "alpha = 0.8   # inline comment\n"
        "m = 2\n"
        "\n"
        "[tomography]\n"
        "eta = 0.57\n";
    auto kv = parse_config(text);
    CHECK(kv.at("pipeline.alpha") == "0.8");
    CHECK(kv.at("pipeline.m") == "2");
    CHECK(kv.at("tomography.eta") == "0.57");

    try {
        parse_config("[pipeline]\nkey value\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(parse_config("[unterminated\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("= 3\n"), ConfigError);
}

TEST_CASE("quadrature dataset round-trips bit-exactly")
{
    QuadratureDataset d;
    d.eta = 0.57;
    d.seed = 90210;
    d.samples = {{0.0, 1.4142135623730951},
                 {M_PI / 12, -0.30000000000000004},
                 {2.356194490192345, 1e-17}};

    const std::string csv = dataset_to_csv(d);
    const std::string meta = dataset_metadata(d);
    QuadratureDataset back = dataset_from_csv(csv, meta);

    CHECK(back.eta == d.eta);
    CHECK(back.seed == d.seed);
    REQUIRE(back.samples.size() == d.samples.size());
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        CHECK(back.samples[i].theta == d.samples[i].theta);
        CHECK(back.samples[i].x == d.samples[i].x);
    }
    // serialization itself is reproducible
    CHECK(dataset_to_csv(back) == csv);
    CHECK(dataset_metadata(back) == meta);

    CHECK_THROWS(dataset_from_csv("bogus\n", meta));
    CHECK_THROWS(dataset_from_csv(csv, "samples = 99\n"));
}

TEST_CASE("csv tables carry comments, footers, and a json mirror")
{
    CsvTable t;
    t.comments = {"figure: demo"};
    t.columns = {"a", "b"};
    t.add_row({1.0, 0.5});
    t.footers = {"min = 0.5"};
    const std::string csv = t.to_csv();
    CHECK(csv.find("# figure: demo\n") != std::string::npos);
    CHECK(csv.find("a,b\n") != std::string::npos);
    CHECK(csv.find("1,0.5\n") != std::string::npos);
    CHECK(csv.find("# min = 0.5\n") != std::string::npos);

    const std::string json = t.to_json();
    CHECK(json.find("\"columns\"") != std::string::npos);
    CHECK(json.find("0.5") != std::string::npos);
}

TEST_CASE("manifest text is stable and keyed by checksums")
{
    RunManifest m;
    m.command = "gain-curve";
    m.kernel_backend = "scalar";
    m.seed = 5;
    m.parameters["alpha"] = "0:1:0.5";
    m.outputs.emplace_back("gain_curve.csv", checksum_hex("abc"));
    const std::string text = m.to_text();
    CHECK(text.find("command = gain-curve") != std::string::npos);
    CHECK(text.find("param.alpha = 0:1:0.5") != std::string::npos);
    CHECK(text.find("output.gain_curve.csv = fnv1a:") != std::string::npos);
    CHECK(checksum_hex("abc") == checksum_hex("abc"));
    CHECK(checksum_hex("abc") != checksum_hex("abd"));
}
