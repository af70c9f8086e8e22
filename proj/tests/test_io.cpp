#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gasket/error.hpp"
#include "gasket/io.hpp"

using namespace gasket;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gasket-test-io" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("reals round-trip through 17 digits") {
  for (double x : {0.1, 1.0 / 3.0, 16.815998889348393, -2.5e-300, 423663.0})
    CHECK(std::stod(io::format_real(x)) == x);
  CHECK(io::format_real(0.5) == "0.5");
}

TEST_CASE("spectrum CSV footer matches the counting function") {
  const auto dir = scratch("spectrum");
  const auto table = enumerate_spectrum(5000.0);
  io::write_spectrum_csv(table, dir / "s.csv");
  const auto back = io::read_spectrum_csv(dir / "s.csv");
  CHECK(back.cutoff == table.cutoff);
  CHECK(back.footer_dimension == table.dimension());
  REQUIRE(back.rows.size() == table.records.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].value == table.records[i].value);
    CHECK(back.rows[i].branches == table.records[i].branches);
    total += back.rows[i].multiplicity;
  }
  CHECK(total == back.footer_dimension);
}

TEST_CASE("bundle dumps reload bit for bit") {
  const auto dir = scratch("bundle");
  const auto ls = build_level_spectrum(3);
  for (const auto& key : {"6:2:+", "5:2:", "2:1:"}) {
    const auto& b = ls.bundle(key);
    io::dump_bundle(b, dir / "b.bin");
    const auto back = io::load_bundle(dir / "b.bin");
    CHECK(back.level == b.level);
    CHECK(back.record.key() == b.record.key());
    CHECK(back.graph_value == b.graph_value);
    CHECK(back.vectors == b.vectors);
  }
  std::ofstream(dir / "junk.bin") << "nothing here\n";
  CHECK_THROWS_AS(io::load_bundle(dir / "junk.bin"), Error);
}

TEST_CASE("report, cluster and operator writers") {
  const auto dir = scratch("writers");
  ConvergenceReport r;
  r.experiment = "demo <a&b>";
  r.target = 1.0;
  r.samples = {{2, 3, 1.5, 0, 3, 0, {}}, {3, 12, 1.1, 0, 12, 0, 0.2}};
  r.recompute_errors();
  io::write_report_csv(r, dir / "r.csv");
  io::write_report_svg(r, dir / "r.svg");
  CHECK(slurp(dir / "r.csv") == "index,d,value,abs_error,head_mass,tail_mass\n"
                                "2,3,1.5,0.5,3,0\n"
                                "3,12,1.1000000000000001,0.10000000000000009,12,0\n");
  const auto svg = slurp(dir / "r.svg");
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("demo &lt;a&amp;b&gt;") != std::string::npos);
  const auto j = io::report_json(r);
  CHECK(j["samples"][1]["bound"] == 0.2);
  CHECK_FALSE(j["samples"][0].contains("bound"));

  io::write_moments_csv({{2, 1, 0.25, 0.5}}, dir / "m.csv");
  CHECK(slurp(dir / "m.csv") == "j,k,moment,target,abs_error\n2,1,0.25,0.5,0.25\n");

  const auto ls = build_level_spectrum(2);
  const auto op = compress(riesz_symbol(1.0), basis_up_to(ls.bundles, INFINITY), ls.level);
  io::write_operator(op, dir / "op.csv", dir / "op.json");
  std::ifstream in(dir / "op.json");
  const auto meta = nlohmann::json::parse(in);
  CHECK(meta["dimension"] == op.dimension());
  CHECK(meta["basis"].size() == op.dimension());
}

TEST_CASE("sha256 and manifest") {
  const auto dir = scratch("manifest");
  io::write_text(dir / "abc.txt", "abc");
  CHECK(io::sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  io::write_manifest(dir, {{"level", 3}}, {{"stage", 0.5}}, {dir / "abc.txt"});
  std::ifstream in(dir / "manifest.json");
  const auto m = nlohmann::json::parse(in);
  CHECK(m["config"]["level"] == 3);
  CHECK(m["outputs"][0]["file"] == "abc.txt");
  CHECK(m["outputs"][0]["bytes"] == 3);
  CHECK(m["versions"]["gasket"] == io::kVersion);
}
