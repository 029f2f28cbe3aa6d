#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "kreinx/cli.hpp"

using namespace kreinx;

namespace {

const std::string kConfigs = KREINX_CONFIG_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

ErrorKind parse_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

std::string parse_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) ::setenv(name, value, 1);
    else ::unsetenv(name);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(name_, old_->c_str(), 1);
    else ::unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST(Csv, SeventeenDigitsRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-0.0), "0");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(std::stod(format_double(1e-300)), 1e-300);
}

TEST(Csv, NonFiniteIsAnError) {
  try {
    format_double(std::numeric_limits<double>::quiet_NaN());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
  EXPECT_THROW(format_double(std::numeric_limits<double>::infinity()), Error);
}

TEST(Csv, HeaderAlwaysPresentAndQuoting) {
  CsvTable empty({"a", "b"});
  EXPECT_EQ(empty.str(), "a,b\n");
  CsvTable t({"name", "value", "count"});
  t.add_row({std::string("x,y"), 2.5, std::int64_t{3}});
  t.add_row({std::string("say \"hi\""), -1.0, std::int64_t{-4}});
  EXPECT_EQ(t.str(), "name,value,count\n\"x,y\",2.5,3\n\"say \"\"hi\"\"\",-1,-4\n");
  EXPECT_THROW(t.add_row({1.0}), Error);
}

TEST(Config, MinimalMatrix) {
  const auto cfg = parse_config(R"({"backend":"matrix","matrix":{"A":[[1,0],[0,-1]],"tau":[[1,1]]},"theta":[[1]]})");
  EXPECT_EQ(cfg.backend, "matrix");
  EXPECT_EQ(cfg.a.rows(), 2);
  EXPECT_FALSE(cfg.scan.has_value());
  EXPECT_FALSE(cfg.seed.has_value());
  const ExtensionProblem p = build_problem(cfg);
  EXPECT_EQ(p.charge_dim(), 1);
}

TEST(Config, ComplexEntriesAndBarePoints) {
  const auto cfg = parse_config(
      R"({"backend":"laplacian1d","points":[-0.5,0.5],"theta":[[1,[0,2]],[[0,-2],1]],"seed":9})");
  EXPECT_EQ(cfg.points.size(), 2u);
  EXPECT_EQ(cfg.theta(0, 1), Complex(0.0, 2.0));
  EXPECT_EQ(*cfg.seed, 9u);
}

TEST(Config, NonHermitianThetaRejected) {
  const std::string text = R"({"backend":"matrix","matrix":{"A":[[1,0],[0,-1]],"tau":[[1,0],[0,1]]},
                               "theta":[[0,1],[0,0]]})";
  EXPECT_EQ(parse_kind(text), ErrorKind::InvariantError);
  EXPECT_NE(parse_message(text).find("hermitian"), std::string::npos);
}

TEST(Config, LaplacianScanMustBePositive) {
  const std::string text = R"({"backend":"laplacian3d","points":[[0,0,0]],"theta":[[-0.1]],
                               "scan":{"a":-1,"b":2}})";
  EXPECT_EQ(parse_kind(text), ErrorKind::InvariantError);
  EXPECT_NE(parse_message(text).find("(-inf, 0]"), std::string::npos);
}

TEST(Config, SchemaErrors) {
  EXPECT_EQ(parse_kind(R"({"backend":"matrix","matrix":{"A":[[1]],"tau":[[1]]},"theta":[[1]],"colour":1})"),
            ErrorKind::SchemaError);
  EXPECT_EQ(parse_kind("not json"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_kind(R"({"backend":"spline"})"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_kind(R"({"backend":"laplacian3d","points":[[0,0,0]],"theta":[["x"]]})"), ErrorKind::SchemaError);
}

TEST(Config, ListsEveryViolation) {
  const std::string text = R"({"backend":"laplacian3d","points":[[0,0,0]],"theta":[[0,1],[0,0]],
                               "scan":{"a":-1,"b":2}})";
  const std::string msg = parse_message(text);
  EXPECT_NE(msg.find("hermitian"), std::string::npos);
  EXPECT_NE(msg.find("trace has 1 rows"), std::string::npos);
  EXPECT_NE(msg.find("(-inf, 0]"), std::string::npos);
}

TEST(Config, RoundTrip) {
  for (const char* name : {"matrix_2x2.json", "laplacian1d_pair.json", "laplacian3d_pair.json",
                           "laplacian3d_single.json", "multiplier1d_laplacian.json"}) {
    const auto cfg = cli::load_config(kConfigs + "/" + name);
    const auto again = parse_config(serialize_config(cfg));
    EXPECT_TRUE(cfg == again) << name;
    EXPECT_EQ(serialize_config(cfg), serialize_config(again)) << name;
  }
}

TEST(Cli, GreenRowAtUnitRadius) {
  const CliRun r = run({"green", "--dim", "3", "--z", "1", "--r-min", "1", "--r-max", "1", "--steps", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "r,g0,gz_re,gz_im,diagonal_re,diagonal_im");
  const auto f = fields(ls[1]);
  ASSERT_EQ(f.size(), 6u);
  EXPECT_NEAR(std::stod(f[1]), 0.0795774715459477, 1e-16);
  EXPECT_NEAR(std::stod(f[2]), 0.0292749157621596, 1e-16);
  EXPECT_EQ(f[3], "0");
  // lim (G - G_z) at the origin = sqrt(z) / (4 pi).
  EXPECT_NEAR(std::stod(f[4]), 0.0795774715459477, 1e-16);
}

TEST(Cli, SpectrumExitCodes) {
  const CliRun ok = run({"spectrum", "-c", kConfigs + "/matrix_2x2.json"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto ls = lines(ok.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "root_index,z0,energy,multiplicity,residual,Q_re_1,Q_im_1");
  EXPECT_NEAR(std::stod(fields(ls[1])[1]), 1.0 + std::sqrt(2.0), 1e-12);

  EXPECT_EQ(run({"spectrum", "-c", kConfigs + "/does_not_exist.json"}).code, 2);
  EXPECT_EQ(run({"spectrum", "-c", kConfigs + "/matrix_2x2.json", "--a", "0.5"}).code, 2);
  const CliRun none = run({"spectrum", "-c", kConfigs + "/matrix_2x2.json", "--a", "3", "--b", "9"});
  EXPECT_EQ(none.code, 3);
  EXPECT_EQ(lines(none.out).size(), 1u);
  EXPECT_NE(none.err.find("no sign change bracketed"), std::string::npos);
  EXPECT_EQ(run({"spectrum"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
}

TEST(Cli, SpectrumWritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "kreinx_spectrum_test.csv";
  const CliRun r = run({"spectrum", "-c", kConfigs + "/laplacian3d_pair.json", "-o", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path);
  std::stringstream text;
  text << f.rdbuf();
  EXPECT_EQ(lines(text.str()).size(), 3u);
  EXPECT_NE(r.out.find("2 root(s)"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, ResolventTable) {
  const CliRun r = run({"resolvent", "-c", kConfigs + "/matrix_2x2.json", "--z", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  const auto f = fields(ls[1]);
  EXPECT_NEAR(std::stod(f[2]), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(std::stod(f[4]), -3.0, 1e-14);
  EXPECT_EQ(run({"resolvent", "-c", kConfigs + "/matrix_2x2.json", "--z", format_double(1.0 + std::sqrt(2.0))})
                .code,
            3);
}

TEST(Cli, VerifyIsDeterministic) {
  const CliRun a = run({"verify", "--models", "5"});
  const CliRun b = run({"verify", "--models", "5", "--seed", "42"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out)[0], "check,max_residual,tolerance,pass,count,note");
  const CliRun c = run({"verify", "--models", "5", "--seed", "43"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, SeedPrecedence) {
  {
    ScopedEnv env("KREINX_SEED", nullptr);
    EXPECT_EQ(cli::resolve_seed(std::nullopt, std::nullopt), 42u);
    EXPECT_EQ(cli::resolve_seed(std::nullopt, 5u), 5u);
  }
  {
    ScopedEnv env("KREINX_SEED", "1234");
    EXPECT_EQ(cli::resolve_seed(std::nullopt, std::nullopt), 1234u);
    EXPECT_EQ(cli::resolve_seed(std::nullopt, 5u), 5u);
    EXPECT_EQ(cli::resolve_seed(9u, 5u), 9u);
    EXPECT_EQ(run({"verify", "--models", "3"}).out, run({"verify", "--models", "3", "--seed", "1234"}).out);
  }
  {
    ScopedEnv env("KREINX_SEED", "12x");
    EXPECT_THROW(cli::resolve_seed(std::nullopt, std::nullopt), Error);
    EXPECT_EQ(run({"verify", "--models", "1"}).code, 2);
  }
}

TEST(Cli, OracleAgrees) {
  const CliRun r = run({"oracle", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out)[0], "index,oracle_eigenvalue,krein_pole,abs_difference");
  const CliRun fixed = run({"oracle", "--seed", "7", "--n", "5", "--charge", "2"});
  EXPECT_EQ(fixed.code, 0) << fixed.err;
  EXPECT_EQ(lines(fixed.out).size(), 6u);
  EXPECT_EQ(run({"oracle", "--n", "2", "--charge", "3"}).code, 2);
}

TEST(Cli, OracleEmitsLoadableConfig) {
  const auto path = std::filesystem::temp_directory_path() / "kreinx_oracle_config.json";
  ASSERT_EQ(run({"oracle", "--seed", "11", "--emit-config", path.string()}).code, 0);
  const auto cfg = cli::load_config(path.string());
  EXPECT_EQ(cfg.backend, "matrix");
  EXPECT_EQ(*cfg.seed, 11u);
  std::filesystem::remove(path);
}
