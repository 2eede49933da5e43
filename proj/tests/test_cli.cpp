#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "su0/cli.hpp"
#include "su0/numeric.hpp"
#include "su0/opalgebra.hpp"
#include "su0/rep.hpp"
#include "su0/weyl.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace su0;
using cli::Complex;
using cli::RunConfig;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  REQUIRE(f.good());
  f << body;
}

int run_argv(std::vector<std::string> args) {
  std::vector<const char*> argv;
  argv.push_back("su0");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("lambda specifications") {
  CHECK_FALSE(cli::parse_lambda("formal", 2).has_value());
  CHECK_FALSE(cli::parse_lambda("", 2).has_value());

  const auto lit = cli::parse_lambda("0.6+0.8i,1", 2);
  REQUIRE(lit.has_value());
  CHECK(std::abs((*lit)[0] - Complex(0.6, 0.8)) < 1e-15);
  CHECK(std::abs((*lit)[1] - Complex(1.0, 0.0)) < 1e-15);

  const auto ang = cli::parse_lambda("1/4,0/1", 2);
  REQUIRE(ang.has_value());
  CHECK(std::abs((*ang)[0] - Complex(0.0, 1.0)) < 1e-12);
  CHECK(std::abs((*ang)[1] - Complex(1.0, 0.0)) < 1e-12);

  const auto imag = cli::parse_lambda("i,-i", 2);
  REQUIRE(imag.has_value());
  CHECK(std::abs((*imag)[0] - Complex(0.0, 1.0)) < 1e-15);
  CHECK(std::abs((*imag)[1] - Complex(0.0, -1.0)) < 1e-15);

  CHECK(std::abs((*cli::parse_lambda("-1", 1))[0] - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs((*cli::parse_lambda("0.6-0.8i", 1))[0] - Complex(0.6, -0.8)) < 1e-15);

  CHECK_THROWS_AS(cli::parse_lambda("1", 2), std::invalid_argument);       // count
  CHECK_THROWS_AS(cli::parse_lambda("2,1", 2), std::invalid_argument);     // modulus
  CHECK_THROWS_AS(cli::parse_lambda("x,1", 2), std::invalid_argument);     // syntax
  CHECK_THROWS_AS(cli::parse_lambda("1/0", 1), std::invalid_argument);     // angle
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(cli::validate(c));
  c.window = 7;  // N = 12
  CHECK_THROWS_AS(cli::validate(c), std::invalid_argument);
  c.window = 6;
  c.format = "pdf";
  CHECK_THROWS_AS(cli::validate(c), std::invalid_argument);
  c.format = "json";
  c.tol = 0.0;
  CHECK_THROWS_AS(cli::validate(c), std::invalid_argument);
}

TEST_CASE("build emits a loadable bundle") {
  RunConfig c;
  c.n = 2;
  c.word = "s[1,1] s[1,2]";
  const auto res = cli::cmd_build(c);
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.output);
  CHECK(j["n"] == 2);
  CHECK(j["word"] == "s[1,1] s[1,2]");
  CHECK(j["lambda"] == "formal");
  CHECK(rep::rep_from_json(res.output) ==
        rep::build(2, weyl::parse_word(2, "s[1,1] s[1,2]")));
}

TEST_CASE("verify: passing and failing reports") {
  RunConfig c;
  c.n = 2;
  c.word = "s[1,1] s[1,2]";
  const auto res = cli::cmd_verify(c);
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.output);
  CHECK(j["pass"] == true);
  CHECK(j["failures"].empty());
  CHECK(j["checked"].get<int>() > 100);

  // the identity word passes trivially
  RunConfig ce;
  ce.n = 2;
  ce.word = "e";
  const auto re = cli::cmd_verify(ce);
  CHECK(re.exit_code == 0);
  CHECK(nlohmann::json::parse(re.output)["pass"] == true);

  // a corrupted bundle is flagged with concrete relation ids
  rep::SymbolicRep bad = rep::build(2, weyl::parse_word(2, "s[1,1] s[1,2]"));
  bad.set_image(1, 1, opalg::tensor_scale(opalg::LaurentScalar(2), bad.image(1, 1)));
  const std::string bundle = "/tmp/su0_cli_bad_bundle.json";
  spit(bundle, rep::rep_to_json(bad));
  RunConfig cb;
  cb.input = bundle;
  const auto rb = cli::cmd_verify(cb);
  CHECK(rb.exit_code == 1);
  const auto jb = nlohmann::json::parse(rb.output);
  CHECK(jb["pass"] == false);
  CHECK(jb["failures"].size() > 0);
  CHECK(jb["failures"][0].contains("id"));
  std::remove(bundle.c_str());
}

TEST_CASE("classify verdict through the front end") {
  RunConfig c;
  c.n = 2;
  c.word = "s[2,2]";
  c.word2 = "s[1,1]";
  const auto res = cli::cmd_classify(c);
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.output);
  CHECK(j["equivalent"] == false);
  CHECK(j["case"] == "I");
  CHECK(j["witness"] == "z[2,3]");

  RunConfig cs = c;
  cs.word2 = "s[2,2]";
  cs.lambda = cs.lambda2 = "i,1";
  const auto rs = cli::cmd_classify(cs);
  CHECK(rs.exit_code == 0);
  CHECK(nlohmann::json::parse(rs.output)["equivalent"] == true);
}

TEST_CASE("identify: flags, bundle file, matrix directory") {
  // symbolic from flags (identity word is the trivial case)
  RunConfig c;
  c.n = 2;
  c.word = "e";
  auto j = nlohmann::json::parse(cli::cmd_identify(c).output);
  CHECK(j["word"] == "e");
  CHECK(j["mode"] == "symbolic");

  // numeric from flags
  RunConfig cn;
  cn.n = 2;
  cn.word = "s[1,1] s[1,2]";
  cn.lambda = "0.6+0.8i,1";
  cn.N = 12;
  cn.window = 6;
  cn.tol = 1e-8;
  const auto rn = cli::cmd_identify(cn);
  CHECK(rn.exit_code == 0);
  j = nlohmann::json::parse(rn.output);
  CHECK(j["mode"] == "numeric");
  CHECK(j["word"] == "s[1,1] s[1,2]");
  CHECK(std::abs(j["lambda"][0][0].get<double>() - 0.6) < 1e-6);
  CHECK(std::abs(j["lambda"][0][1].get<double>() - 0.8) < 1e-6);

  // bundle file round-trip
  const std::string bundle = "/tmp/su0_cli_identify_bundle.json";
  spit(bundle, rep::rep_to_json(rep::build(2, weyl::parse_word(2, "s[2,2]"))));
  RunConfig cf;
  cf.input = bundle;
  j = nlohmann::json::parse(cli::cmd_identify(cf).output);
  CHECK(j["word"] == "s[2,2]");
  std::remove(bundle.c_str());

  // matrix directory written by export, read back by identify
  const std::string dir = "/tmp/su0_cli_matrix_dir";
  std::filesystem::remove_all(dir);
  RunConfig ce;
  ce.n = 2;
  ce.word = "s[1,2]";
  ce.lambda = "5/13+12/13i,0.6+0.8i";
  ce.N = 12;
  ce.window = 6;
  ce.out = dir;
  const auto rex = cli::cmd_export(ce);
  CHECK(rex.exit_code == 0);
  CHECK(nlohmann::json::parse(rex.output)["files"] == 10);
  RunConfig cd;
  cd.input = dir;
  cd.tol = 1e-8;
  const auto rid = cli::cmd_identify(cd);
  CHECK(rid.exit_code == 0);
  j = nlohmann::json::parse(rid.output);
  CHECK(j["mode"] == "numeric");
  CHECK(j["word"] == "s[1,2]");
  CHECK(std::abs(j["lambda"][0][0].get<double>() - 5.0 / 13.0) < 1e-6);
  CHECK(std::abs(j["lambda"][1][1].get<double>() - 0.8) < 1e-6);
  std::filesystem::remove_all(dir);

  // peel failure surfaces as a machine-readable error with exit 1
  rep::SymbolicRep bad = rep::build(2, weyl::parse_word(2, "s[1,2]"));
  bad.set_image(2, 2, opalg::tensor_scale(opalg::LaurentScalar(2), bad.image(2, 2)));
  const std::string badfile = "/tmp/su0_cli_identify_bad.json";
  spit(badfile, rep::rep_to_json(bad));
  RunConfig cbad;
  cbad.input = badfile;
  const auto rbad = cli::cmd_identify(cbad);
  CHECK(rbad.exit_code == 1);
  CHECK(nlohmann::json::parse(rbad.output).contains("error"));
  std::remove(badfile.c_str());
}

TEST_CASE("qlimit convergence table") {
  RunConfig c;
  c.n = 2;
  c.word = "s[1,1] s[1,2]";
  c.N = 8;
  c.window = 4;
  c.q = {0.3, 0.1, 0.03};
  const auto res = cli::cmd_qlimit(c);
  CHECK(res.exit_code == 0);

  std::istringstream in(res.output);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "q,i,j,distance");
  std::map<double, double> max_dist;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    double q, dist;
    int i, j;
    char comma;
    std::istringstream ls(line);
    ls >> q >> comma >> i >> comma >> j >> comma >> dist;
    max_dist[q] = std::max(max_dist[q], dist);
  }
  CHECK(rows == 27);  // 3 q-values, 9 generators each
  REQUIRE(max_dist.size() == 3);
  CHECK(max_dist[0.1] < max_dist[0.3]);
  CHECK(max_dist[0.03] < max_dist[0.1]);
  CHECK(max_dist[0.3] > 0.0);

  // duplicated q gives identical rows
  RunConfig cd = c;
  cd.q = {0.3, 0.3};
  const auto rd = cli::cmd_qlimit(cd);
  std::vector<std::string> lines;
  std::istringstream din(rd.output);
  while (std::getline(din, line))
    if (!line.empty()) lines.push_back(line);
  REQUIRE(lines.size() == 19);
  for (int t = 0; t < 9; ++t) CHECK(lines[1 + t] == lines[10 + t]);
}

TEST_CASE("diagram rendering") {
  // empty word: n+1 plain horizontal lines
  RunConfig c;
  c.n = 2;
  c.word = "e";
  c.format = "txt";
  const auto res = cli::cmd_diagram(c);
  CHECK(res.exit_code == 0);
  std::vector<std::string> lines;
  std::istringstream in(res.output);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  for (const auto& l : lines) {
    CHECK(l.find('X') == std::string::npos);
    CHECK(l.find("λ") == 0);
    CHECK(l.find('-') != std::string::npos);
  }

  // single crossing between lines i and i+1
  RunConfig c1;
  c1.n = 2;
  c1.word = "s[1,1]";
  c1.format = "txt";
  const auto r1 = cli::cmd_diagram(c1);
  lines.clear();
  std::istringstream in1(r1.output);
  while (std::getline(in1, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);  // header + 3 levels
  CHECK(lines[0].find("s[1,1]") != std::string::npos);
  const std::size_t x1 = lines[1].find('X');
  CHECK(x1 != std::string::npos);
  CHECK(lines[2].find('X') == x1);
  CHECK(lines[3].find('X') == std::string::npos);

  // the five-section rank-10 word renders five section labels
  RunConfig c10;
  c10.n = 10;
  c10.word = "s[2,4] s[6,7] s[1,8] s[5,9] s[3,10]";
  c10.format = "txt";
  const auto r10 = cli::cmd_diagram(c10);
  for (const std::string label :
       {"s[2,4]", "s[6,7]", "s[1,8]", "s[5,9]", "s[3,10]"})
    CHECK(r10.output.find(label) != std::string::npos);

  // highlight overlays the contributing paths
  RunConfig ch;
  ch.n = 2;
  ch.word = "s[1,1]";
  ch.format = "txt";
  ch.highlight = "1,1";
  const auto rh = cli::cmd_diagram(ch);
  CHECK(rh.output.find("paths z[1,1]: 1") != std::string::npos);
  CHECK(rh.output.find('=') != std::string::npos);

  // svg: n+1 horizontal lines plus two diagonals per crossing, labels, path
  RunConfig cs;
  cs.n = 2;
  cs.word = "s[1,1] s[1,2]";
  cs.format = "svg";
  cs.highlight = "3,1";
  const auto rs = cli::cmd_diagram(cs);
  CHECK(rs.output.rfind("<svg", 0) == 0);
  int nline = 0;
  for (std::size_t p = rs.output.find("<line"); p != std::string::npos;
       p = rs.output.find("<line", p + 1))
    ++nline;
  CHECK(nline == 3 + 2 * 3);
  CHECK(rs.output.find("<polyline") != std::string::npos);
  CHECK(rs.output.find("s[1,2]") != std::string::npos);
  CHECK(rs.output.find("λ1") != std::string::npos);

  // csv is not a diagram format
  RunConfig cbad;
  cbad.format = "csv";
  CHECK_THROWS_AS(cli::cmd_diagram(cbad), std::invalid_argument);
}

TEST_CASE("full command line dispatch and exit codes") {
  const std::string out = "/tmp/su0_cli_run_out.json";
  std::remove(out.c_str());
  CHECK(run_argv({"verify", "-n", "2", "--word", "s[1,1]", "--lambda", "formal",
                  "--out", out}) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["pass"] == true);
  std::remove(out.c_str());

  // usage errors exit 2
  CHECK(run_argv({"qlimit", "-n", "2", "--word", "e", "-q", "0.3", "--dim", "8",
                  "--window", "5", "--out", "/tmp/su0_cli_unused.csv"}) == 2);
  CHECK(run_argv({"no-such-command"}) == 2);
  CHECK(run_argv({"identify", "--word", "s[9,9]"}) == 2);

  // config file in key=value form under a [subcommand] section
  const std::string cfg = "/tmp/su0_cli_config.ini";
  spit(cfg, "[verify]\nn=2\nword=\"s[2,2]\"\nout=\"" + out + "\"\n");
  CHECK(run_argv({"verify", "--config", cfg}) == 0);
  CHECK(nlohmann::json::parse(slurp(out))["word"] == "s[2,2]");
  std::remove(cfg.c_str());
  std::remove(out.c_str());
}
