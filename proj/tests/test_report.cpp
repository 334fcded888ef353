#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "eqlab/errors.hpp"
#include "eqlab/report.hpp"

using namespace eqlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, -0.75, 1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(-0.75), "-0.75");
}

TEST(Table, CsvQuotingAndLineEnds) {
  Table t("demo", {"a", "b,c"});
  t.add_row({"plain", "with \"quote\""});
  t.add_row({"line\nbreak", ""});
  EXPECT_EQ(t.to_csv(), "a,\"b,c\"\r\nplain,\"with \"\"quote\"\"\"\r\n\"line\nbreak\",\r\n");
}

TEST(Table, Utf8PassesThrough) {
  Table t("u", {"name"});
  t.add_row({"\xce\xbc_FS"});
  EXPECT_EQ(t.to_csv(), "name\r\n\xce\xbc_FS\r\n");
}

TEST(Table, RejectsRaggedRows) {
  Table t("demo", {"a", "b"});
  EXPECT_THROW(t.add_row({"1"}), ContractError);
  EXPECT_THROW(Table("empty", {}), ContractError);
}

TEST(Svg, RendersBothKinds) {
  Plot scatter{"cloud", Plot::Kind::Scatter, "x", "y", {{"atoms", {0.0, 1.0}, {0.0, 1.0}}}};
  const std::string s = render_svg(scatter);
  EXPECT_NE(s.find("<svg"), std::string::npos);
  EXPECT_NE(s.find("<circle"), std::string::npos);
  Plot line{"decay", Plot::Kind::LogLinear, "n", "<err>", {{"a&b", {1, 2, 3}, {1e-1, 1e-2, 0.0}}}};
  const std::string l = render_svg(line);
  EXPECT_NE(l.find("<polyline"), std::string::npos);
  EXPECT_NE(l.find("&lt;err&gt;"), std::string::npos);
  EXPECT_NE(l.find("a&amp;b"), std::string::npos);
}

TEST(Report, SummaryAndFiles) {
  ExperimentReport r;
  r.subcommand = "constants";
  r.seed = 7;
  r.tables.emplace_back("constants", std::vector<std::string>{"k"});
  r.tables.back().add_row({"2"});
  r.checks.push_back({"one", true, ""});
  EXPECT_TRUE(r.all_pass());
  r.checks.push_back({"two", false, "off"});
  EXPECT_FALSE(r.all_pass());
  EXPECT_EQ(r.table("constants").rows(), 1u);
  EXPECT_THROW(r.table("missing"), ContractError);
  const auto j = r.summary();
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["all_pass"], false);
  EXPECT_EQ(j["tables"][0]["file"], "constants.csv");

  r.plots.push_back({"p", Plot::Kind::Scatter, "x", "y", {}});
  const auto dir = std::filesystem::temp_directory_path() / "eqlab_report_test";
  std::filesystem::remove_all(dir);
  write_report(r, dir, false);
  EXPECT_EQ(slurp(dir / "constants.csv"), "k\r\n2\r\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  EXPECT_FALSE(std::filesystem::exists(dir / "p.svg"));
  write_report(r, dir, true);
  EXPECT_TRUE(std::filesystem::exists(dir / "p.svg"));
  std::filesystem::remove_all(dir);
}
