#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

#include "rafs/errors.hpp"
#include "rafs/ingest.hpp"

using namespace rafs;
namespace fs = std::filesystem;

namespace {

IngestSpec basic_spec() {
  IngestSpec s;
  s.name = "basic";
  s.target = "t";
  s.features = {"a", "b"};
  return s;
}

std::string error_of(std::string_view text, const IngestSpec& spec) {
  try {
    parse_csv(text, spec, "mem");
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

// Writes `rows` rows of the given header where every cell is a small
// deterministic positive number.
void write_fixture(const fs::path& path, const std::vector<std::string>& header, std::size_t rows) {
  std::ofstream out(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << '"' << header[j] << '"';
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      out << (j ? "," : "") << static_cast<double>((i * 7 + j * 13) % 97) / 10.0;
    }
    out << '\n';
  }
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("rafs_ingest_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Dataset indexed(std::size_t n) {
  Dataset d;
  d.X = Matrix(n, 1);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.X(i, 0) = static_cast<double>(i);
    d.y[i] = static_cast<double>(i);
  }
  return d;
}

}  // namespace

TEST_CASE("a three-row CSV loads in order") {
  const LoadResult r = parse_csv("a,b,t\n1,2,3\n4,5,6\n7,8,9\n", basic_spec(), "mem");
  CHECK(r.data.rows() == 3);
  CHECK(r.data.dim() == 2);
  CHECK(r.data.X(0, 0) == 1.0);
  CHECK(r.data.X(2, 1) == 8.0);
  CHECK(r.data.y == std::vector<double>{3, 6, 9});
  CHECK(r.dropped_rows == 0);
  CHECK(r.data.feature_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("quoting, column order, CRLF and a byte-order mark") {
  const std::string text = "\xEF\xBB\xBFt,\"b\",extra,\"a\"\r\n3,2,\"x,y\",1\r\n6,5,z,4\r\n";
  const LoadResult r = parse_csv(text, basic_spec(), "mem");
  REQUIRE(r.data.rows() == 2);
  CHECK(r.data.X(0, 0) == 1.0);
  CHECK(r.data.X(0, 1) == 2.0);
  CHECK(r.data.y[1] == 6.0);
}

TEST_CASE("rows with missing values are dropped and counted") {
  const LoadResult r = parse_csv("a,b,t,junk\n1,2,3,?\n,5,6,1\n7,NA,9,1\n1,1,1,1\n", basic_spec(), "mem");
  CHECK(r.data.rows() == 2);
  CHECK(r.dropped_rows == 2);
  CHECK(r.data.y == std::vector<double>{3, 1});
}

TEST_CASE("errors name the offending row and column") {
  const std::string msg = error_of("a,b,t\n1,2,3\n1,oops,3\n", basic_spec());
  CHECK(msg.find("row 3") != std::string::npos);
  CHECK(msg.find("'b'") != std::string::npos);
  CHECK(error_of("a,t\n1,2\n", basic_spec()).find("'b'") != std::string::npos);
  CHECK(error_of("a,b,t\n,,\n", basic_spec()).find("no usable rows") != std::string::npos);
  CHECK_THROWS_AS(parse_csv("a,b,t\n1,2\n", basic_spec(), "mem"), DataError);
  IngestSpec missing = basic_spec();
  missing.path = "/nonexistent/file.csv";
  CHECK_THROWS_AS(load_csv(missing), DataError);
}

TEST_CASE("ln1p transforms apply to the listed columns only") {
  IngestSpec s = basic_spec();
  s.transforms = {{"t", ColumnTransform::Ln1p}};
  const LoadResult r = parse_csv("a,b,t\n1,2,0\n3,4,1.718281828459045\n", s, "mem");
  CHECK(r.data.X(1, 0) == 3.0);
  CHECK(r.data.y[0] == 0.0);
  CHECK(r.data.y[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(invert_transform(ColumnTransform::Ln1p, r.data.y[1]) == doctest::Approx(1.718281828459045));
  CHECK_THROWS_AS(apply_transform(ColumnTransform::Ln1p, -1.0), DomainError);
  CHECK(parse_transform("ln1p") == ColumnTransform::Ln1p);
  CHECK(parse_transform("identity") == ColumnTransform::Identity);
  CHECK_FALSE(parse_transform("log").has_value());
}

TEST_CASE("presets select the expected feature lists") {
  const auto abalone = ingest_preset("abalone", "data");
  REQUIRE(abalone.has_value());
  CHECK(abalone->features ==
        std::vector<std::string>{"Length", "Diameter", "Height", "Whole weight", "Shucked weight"});
  const auto boston = ingest_preset("Boston", "data");
  REQUIRE(boston.has_value());
  CHECK(boston->features == std::vector<std::string>{"RM"});
  CHECK(boston->n_train == 354);
  CHECK(boston->n_test == 152);
  const auto fire = ingest_preset("ForestFire", "data");
  REQUIRE(fire.has_value());
  CHECK(fire->transform_for(fire->target) == ColumnTransform::Ln1p);
  for (const std::string& f : fire->features) CHECK(fire->transform_for(f) == ColumnTransform::Identity);
  const auto park = ingest_preset("parkinsons", "data");
  REQUIRE(park.has_value());
  CHECK(park->features == std::vector<std::string>{"NHR", "HNR", "DFA", "PPE", "RPDE"});
  CHECK(park->target == "total_UPDRS");
  CHECK(ingest_preset_names().size() == 5);
  CHECK_FALSE(ingest_preset("iris", "data").has_value());
}

TEST_CASE("preset fixtures split to the preset sizes") {
  TempDir dir;
  struct Case {
    std::string preset;
    std::size_t rows, n_train, n_test;
  };
  for (const Case& c : {Case{"Boston", 506, 354, 152}, Case{"Abalone", 4177, 1880, 2297},
                        Case{"Parkinsons", 5875, 2643, 3232}}) {
    CAPTURE(c.preset);
    IngestSpec spec = *ingest_preset(c.preset, dir.path.string());
    std::vector<std::string> header = spec.features;
    header.insert(header.begin(), "id");
    header.push_back(spec.target);
    write_fixture(spec.path, header, c.rows);
    const LoadResult r = load_csv(spec);
    CHECK(r.data.rows() == c.rows);
    const auto [train, test] = split(r.data, spec.n_train, spec.n_test, 1);
    CHECK(train.rows() == c.n_train);
    CHECK(test.rows() == c.n_test);
    CHECK(train.split == "train");
    CHECK(test.split == "test");
  }
}

TEST_CASE("splits are deterministic, disjoint and in range") {
  const Dataset d = indexed(300);
  const auto a = split(d, 120, 150, 9);
  const auto b = split(d, 120, 150, 9);
  CHECK(a.first.X.data == b.first.X.data);
  CHECK(a.second.X.data == b.second.X.data);
  CHECK_FALSE(split(d, 120, 150, 10).first.X.data == a.first.X.data);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto [train, test] = split(d, 120, 150, seed);
    std::set<double> seen(train.X.data.begin(), train.X.data.end());
    CHECK(seen.size() == 120);
    for (double v : test.X.data) CHECK(seen.insert(v).second);
    CHECK(seen.size() == 270);
  }
  CHECK_THROWS_AS(split(d, 200, 101, 1), DataError);
  CHECK_NOTHROW(split(d, 200, 100, 1));
}

TEST_CASE("split rows are close to uniform") {
  const Dataset d = indexed(10);
  std::vector<int> hits(10, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const auto [train, test] = split(d, 3, 2, static_cast<std::uint64_t>(t));
    for (double v : train.X.data) hits[static_cast<std::size_t>(v)]++;
  }
  for (int h : hits) CHECK(std::abs(static_cast<double>(h) / trials - 0.3) < 0.02);
}

TEST_CASE("CSV export reloads to the same dataset") {
  Dataset d;
  d.X = Matrix(2, 2);
  d.X(0, 0) = 0.1;
  d.X(0, 1) = -1e-300;
  d.X(1, 0) = 12345.678901234567;
  d.X(1, 1) = 3.0;
  d.y = {1.0 / 3.0, 2.5};
  d.feature_names = {"p,q", "r"};
  d.target_name = "out";
  IngestSpec s;
  s.name = "round";
  s.features = {"p,q", "r"};
  s.target = "out";
  const LoadResult r = parse_csv(dataset_to_csv(d), s, "mem");
  CHECK(r.data.X.data == d.X.data);
  CHECK(r.data.y == d.y);
}
