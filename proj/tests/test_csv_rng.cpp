#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "wavecast/csv.hpp"
#include "wavecast/rng.hpp"

using namespace wavecast;

TEST_CASE("csv line splitting", "[csv]") {
    CHECK(split_csv_line("a,b,c", "t") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("a,,c", "t") == std::vector<std::string>{"a", "", "c"});
    CHECK(split_csv_line("\"x,y\",z", "t") == std::vector<std::string>{"x,y", "z"});
    CHECK(split_csv_line("\"he said \"\"hi\"\"\",2", "t") ==
          std::vector<std::string>{"he said \"hi\"", "2"});
    CHECK_THROWS_AS(split_csv_line("\"open,1", "t"), Error);
}

TEST_CASE("csv reader validates header and reports line numbers", "[csv]") {
    testutil::TempDir dir("csv");
    testutil::write_file(dir.file("ok.csv"), "a,b\r\n1,2\n\n3,4\n");
    CsvReader reader(dir.file("ok.csv"), {"a", "b"});
    std::vector<std::string> fields;
    REQUIRE(reader.next_row(fields));
    CHECK(fields == std::vector<std::string>{"1", "2"});
    REQUIRE(reader.next_row(fields)); // blank line skipped
    CHECK(reader.location().ends_with(":4"));
    CHECK_FALSE(reader.next_row(fields));

    testutil::write_file(dir.file("bad.csv"), "a,c\n1,2\n");
    CHECK_THROWS_WITH(CsvReader(dir.file("bad.csv"), {"a", "b"}),
                      Catch::Matchers::ContainsSubstring("expected 'a,b'"));
    CHECK_THROWS_AS(CsvReader(dir.file("missing.csv"), {"a"}), Error);
}

TEST_CASE("strict number parsing", "[csv]") {
    CHECK(parse_integer("42", "n") == 42);
    CHECK(parse_integer("-3", "n") == -3);
    CHECK_THROWS_AS(parse_integer("4.5", "n"), Error);
    CHECK_THROWS_AS(parse_integer("4x", "n"), Error);
    CHECK_THROWS_AS(parse_integer("", "n"), Error);
    CHECK(parse_real("2.5", "x") == 2.5);
    CHECK(parse_real("-1e3", "x") == -1000.0);
    CHECK_THROWS_AS(parse_real("1,5", "x"), Error);
}

TEST_CASE("number formatting is nan-safe", "[csv]") {
    CHECK(format_number(1.5) == "1.5");
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-std::nan("")) == "nan");
}

TEST_CASE("csv escaping", "[csv]") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"q") == "\"q\"\"q\"");
}

TEST_CASE("random source is deterministic and unbiased at the edges", "[rng]") {
    RandomSource a(42), b(42);
    for (int i = 0; i < 100; ++i)
        CHECK(a.next() == b.next());

    RandomSource r(7);
    for (int i = 0; i < 1000; ++i) {
        std::size_t v = r.uniform_index(3);
        CHECK(v < 3);
    }
    CHECK_THROWS_AS(r.uniform_index(0), Error);

    double u = r.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("sampling without replacement", "[rng]") {
    RandomSource r(9);
    auto sample = r.sample_without_replacement(10, 4);
    REQUIRE(sample.size() == 4);
    std::set<std::size_t> unique(sample.begin(), sample.end());
    CHECK(unique.size() == 4);
    for (std::size_t v : sample)
        CHECK(v < 10);

    auto all = r.sample_without_replacement(5, 5);
    CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 5);
    CHECK_THROWS_AS(r.sample_without_replacement(3, 4), Error);
}

TEST_CASE("seed derivation separates streams", "[rng]") {
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    CHECK(mix_seed(1, 2) != mix_seed(2, 2));
    CHECK(hash_string("abc") != hash_string("abd"));
    CHECK(hash_string("") != 0);
}
