#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "siac_cli.hpp"

namespace fs = std::filesystem;
using namespace siac;
using siac::tool::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result siac_run(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("siac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string &name, const std::string &text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }

  std::string write_xy(const std::string &name, std::size_t n, double lo, double hi, auto &&f) {
    std::string text;
    const double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = lo + (static_cast<double>(j) + 0.5) * h;
      text += tool::fmt(x) + " " + tool::fmt(f(x)) + "\n";
    }
    return write(name, text);
  }

  std::string write_moments(const std::string &name, std::size_t n, double dx, auto &&edit) {
    MomentSet m;
    for (std::size_t j = 0; j < n; ++j)
      m.xs.push_back((static_cast<double>(j) + 0.5) * dx);
    for (auto &p : m.profiles)
      p.assign(n, 0.0);
    for (auto v : {Moment::n_e, Moment::n_i, Moment::u_ex, Moment::u_ix, Moment::E})
      m[v].assign(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      m[Moment::T_ex][j] = 1.0 + 0.1 * std::sin(m.xs[j]);
      m[Moment::T_ix][j] = 0.5;
    }
    edit(m);
    std::string text = "x";
    for (auto s : kMomentNames)
      text += " " + std::string(s);
    text += "\n";
    for (std::size_t j = 0; j < n; ++j) {
      text += tool::fmt(m.xs[j]);
      for (const auto &p : m.profiles)
        text += " " + tool::fmt(p[j]);
      text += "\n";
    }
    return write(name, text);
  }

  static tool::Table parse(const std::string &text) {
    std::istringstream in(text);
    return tool::parse_table(in, "output");
  }

  static bool has_line(const std::string &text, const std::string &line) {
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
      if (l == line)
        return true;
    return false;
  }

  fs::path dir_;
};

} // namespace

TEST_F(CliTest, FilterConstantColumnIsUnchanged) {
  const auto in = write_xy("c.txt", 100, 0.0, 10.0, [](double) { return 2.5; });
  const auto r = siac_run({"filter", in, "--r", "2", "--l", "2", "--H", "0.5", "--generalized-spline"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = parse(r.out);
  ASSERT_EQ(t.rows(), 100u);
  for (double v : t.columns[1])
    EXPECT_NEAR(v, 2.5, 1e-13);
}

TEST_F(CliTest, FilterEchoesConfiguration) {
  const auto in = write_xy("p.txt", 1000, 0.0, 100.0, [](double x) { return std::sin(0.2 * x); });
  const auto r = siac_run({"filter", in, "--r", "2", "--l", "2", "--H", "6.4", "--periodic"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char *line : {"# siac filter", "# r = 2", "# l = 2", "# scaling = constant",
                           "# H = 6.4000000000000004", "# generalized_spline = false",
                           "# boundary = periodic", "# columns = x filtered"})
    EXPECT_TRUE(has_line(r.out, line)) << line << "\n" << r.out.substr(0, 400);
  EXPECT_TRUE(has_line(r.out, "# input = " + in));
  EXPECT_EQ(parse(r.out).rows(), 1000u);
}

TEST_F(CliTest, OutputFileRoundTrips) {
  const auto in = write_xy("s.txt", 200, 0.0, 1.0, [](double x) { return std::exp(x) * std::cos(7 * x); });
  const auto out = (dir_ / "out.txt").string();
  const auto r = siac_run({"filter", in, "--H", "0.02", "--generalized-spline", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto t = tool::read_table(out);
  const auto src = tool::read_table(in);
  EXPECT_EQ(t.columns[0], src.columns[0]);
  // Writing the parsed values again reproduces the file byte for byte.
  std::ifstream f(out);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::string body;
  for (std::size_t i = 0; i < t.rows(); ++i)
    body += tool::fmt(t.columns[0][i]) + " " + tool::fmt(t.columns[1][i]) + "\n";
  EXPECT_NE(text.find(body), std::string::npos);
}

TEST_F(CliTest, AcceptsCommasAndComments) {
  const auto in = write("csv.txt", "# a comment\n0.5, 1\n1.5,1 # trailing\n\n2.5 ,1\n3.5,1\n");
  const auto r = siac_run({"filter", in, "--r", "0", "--l", "1", "--H", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse(r.out).rows(), 4u);
}

TEST_F(CliTest, MissingInputNamesThePath) {
  const auto path = (dir_ / "absent.txt").string();
  const auto r = siac_run({"filter", path, "--H", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(path), std::string::npos);
}

TEST_F(CliTest, MalformedRowReportsLineNumber) {
  const auto in = write("bad.txt", "0.5 1\n1.5 2\n# c\n2.5 x3\n");
  const auto r = siac_run({"filter", in, "--H", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":4:"), std::string::npos) << r.err;
}

TEST_F(CliTest, RaggedRowReportsLineNumber) {
  const auto in = write("rag.txt", "0.5 1\n1.5 2 3\n");
  const auto r = siac_run({"filter", in, "--H", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
}

TEST_F(CliTest, NonMonotoneXIsRejected) {
  const auto in = write("nm.txt", "0.5 1\n1.5 2\n1.5 3\n2.5 4\n");
  const auto r = siac_run({"filter", in, "--H", "0.1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("strictly increasing"), std::string::npos);
}

TEST_F(CliTest, ConfigurationErrorsExitTwo) {
  const auto in = write_xy("d.txt", 50, 0.0, 1.0, [](double x) { return x; });
  EXPECT_EQ(siac_run({"filter", in}).code, 2);                                        // no scaling
  EXPECT_EQ(siac_run({"filter", in, "--H", "1.0"}).code, 2);                          // too wide
  EXPECT_EQ(siac_run({"filter", in, "--H", "0.1", "--periodic", "--generalized-spline"}).code, 2);
  EXPECT_EQ(siac_run({"filter", in, "--adaptive"}).code, 2);
  EXPECT_EQ(siac_run({"filter", in, "--H", "0.1", "--H-int", "0.1"}).code, 2);
  EXPECT_EQ(siac_run({"filter", in, "--H", "0.1", "--l", "0"}).code, 2);
  EXPECT_EQ(siac_run({"filter", in, "--H", "0.1", "--unknown"}).code, 2);
  EXPECT_EQ(siac_run({}).code, 2);
}

TEST_F(CliTest, AdaptiveFilterTracksBoundaryCells) {
  const auto in = write_xy("a.txt", 100, 0.0, 10.0, [](double x) { return std::cos(x); });
  const auto r = siac_run({"filter", in, "--adaptive", "--H-int", "1.6", "--generalized-spline"});
  const auto c = siac_run({"filter", in, "--H", "1.6"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_TRUE(has_line(r.out, "# scaling = adaptive"));
  EXPECT_TRUE(has_line(r.out, "# H_int = 1.6000000000000001"));
  EXPECT_TRUE(has_line(r.out, "# h_grid = 0.10000000000000001"));
  const auto a = parse(r.out).columns[1];
  const auto k = parse(c.out).columns[1];
  const auto src = tool::read_table(in).columns[1];
  EXPECT_LT(std::abs(a.front() - src.front()), std::abs(k.front() - src.front()));
  EXPECT_LT(std::abs(a.back() - src.back()), std::abs(k.back() - src.back()));
}

TEST_F(CliTest, ThreadEnvironmentIsHonouredAndValidated) {
  const auto in = write_xy("t.txt", 300, 0.0, 3.0, [](double x) { return x * x; });
  ::setenv("SIAC_THREADS", "1", 1);
  const auto one = siac_run({"filter", in, "--H", "0.05"});
  ::setenv("SIAC_THREADS", "5", 1);
  const auto five = siac_run({"filter", in, "--H", "0.05"});
  ::setenv("SIAC_THREADS", "lots", 1);
  const auto bad = siac_run({"filter", in, "--H", "0.05"});
  ::unsetenv("SIAC_THREADS");
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(one.out, five.out);
  EXPECT_EQ(bad.code, 2);
}

TEST_F(CliTest, SpectrumOfPureTone) {
  const std::size_t n = 128;
  const auto in = write_xy("tone.txt", n, 0.0, 1.0, [](double x) { return 0.7 * std::sin(2 * std::numbers::pi * 9 * x); });
  const auto r = siac_run({"spectrum", in, "--periodic"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "# window = none"));
  EXPECT_TRUE(has_line(r.out, "# columns = k amplitude"));
  const auto t = parse(r.out);
  ASSERT_EQ(t.rows(), n / 2 + 1);
  for (std::size_t m = 0; m < t.rows(); ++m)
    EXPECT_NEAR(t.columns[1][m], m == 9 ? 0.7 : 0.0, 1e-12);
  EXPECT_NEAR(t.columns[0][9], 2 * std::numbers::pi * 9, 1e-9);
}

TEST_F(CliTest, SpectrumWindowReducesRampLeakage) {
  const auto in = write_xy("ramp.txt", 64, 0.0, 1.0, [](double x) { return x; });
  const auto win = siac_run({"spectrum", in});
  const auto raw = siac_run({"spectrum", in, "--no-window"});
  ASSERT_EQ(win.code, 0);
  ASSERT_EQ(raw.code, 0);
  EXPECT_TRUE(has_line(win.out, "# window = hann"));
  const auto a = parse(win.out).columns[1];
  const auto b = parse(raw.out).columns[1];
  for (std::size_t m = 1; m < a.size(); ++m)
    EXPECT_LT(a[m], b[m]) << "mode " << m;
}

TEST_F(CliTest, SpectrumWithFilteredColumn) {
  const auto in = write_xy("f.txt", 256, 0.0, 1.0, [](double x) {
    return std::sin(2 * std::numbers::pi * x) + 0.3 * std::sin(2 * std::numbers::pi * 40 * x);
  });
  const auto r = siac_run({"spectrum", in, "--periodic", "--filtered", "--H", "0.03125"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "# columns = k amplitude filtered_amplitude"));
  const auto t = parse(r.out);
  ASSERT_EQ(t.columns.size(), 3u);
  EXPECT_LT(t.columns[2][40], 0.1 * t.columns[1][40]);
  EXPECT_NEAR(t.columns[2][1], t.columns[1][1], 0.01);
  EXPECT_EQ(siac_run({"spectrum", in, "--filtered"}).code, 2);
}

TEST_F(CliTest, SpectrumEmptyFileFails) {
  const auto in = write("empty.txt", "# nothing here\n");
  const auto r = siac_run({"spectrum", in});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no data"), std::string::npos);
}

TEST_F(CliTest, SpectrumNeedsUniformGrid) {
  const auto in = write("nu.txt", "0 1\n1 2\n3 1\n4 0\n");
  EXPECT_EQ(siac_run({"spectrum", in}).code, 1);
}

TEST_F(CliTest, KernelResponseStartsAtOne) {
  const auto r = siac_run({"kernel-response", "--H", "0.5", "--k-count", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "# columns = k response"));
  const auto t = parse(r.out);
  ASSERT_EQ(t.rows(), 11u);
  EXPECT_EQ(t.columns[0][0], 0.0);
  EXPECT_NEAR(t.columns[1][0], 1.0, 1e-14);
  EXPECT_NEAR(t.columns[0][10], 40.0, 1e-12);
}

TEST_F(CliTest, KernelResponseDilatesWithH) {
  const auto a = parse(siac_run({"kernel-response", "--H", "1", "--k-max", "20", "--k-count", "41"}).out);
  const auto b = parse(siac_run({"kernel-response", "--H", "2", "--k-max", "10", "--k-count", "41"}).out);
  for (std::size_t i = 0; i < 41; ++i) {
    EXPECT_NEAR(b.columns[0][i], 0.5 * a.columns[0][i], 1e-12);
    EXPECT_NEAR(b.columns[1][i], a.columns[1][i], 1e-14);
  }
}

TEST_F(CliTest, KernelResponseHigherOrderDampsMore) {
  const double k = 3.0 * std::numbers::pi;
  const auto lo = parse(siac_run({"kernel-response", "--H", "1", "--l", "2", "--k-min", "0", "--k-max",
                                  tool::fmt(k), "--k-count", "2"}).out);
  const auto hi = parse(siac_run({"kernel-response", "--H", "1", "--l", "4", "--k-min", "0", "--k-max",
                                  tool::fmt(k), "--k-count", "2"}).out);
  EXPECT_LT(hi.columns[1][1], lo.columns[1][1]);
}

TEST_F(CliTest, KernelResponseRejectsUnsupported) {
  EXPECT_EQ(siac_run({"kernel-response", "--H-int", "1", "--adaptive"}).code, 2);
  EXPECT_EQ(siac_run({"kernel-response", "--H", "1", "--generalized-spline"}).code, 2);
  EXPECT_EQ(siac_run({"kernel-response", "--H", "1", "--r", "3"}).code, 2);
  EXPECT_EQ(siac_run({"kernel-response"}).code, 2);
}

TEST_F(CliTest, BohmZeroFluxGivesBetaThree) {
  const auto in = write_moments("m.txt", 400, 0.1, [](MomentSet &) {});
  const auto r = siac_run({"bohm", in});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "# columns = x beta u_bohm validity"));
  EXPECT_TRUE(has_line(r.out, "# summary: real = 400, complex_modulus = 0, degenerate = 0"));
  EXPECT_NE(r.err.find("complex_modulus = 0"), std::string::npos);
  EXPECT_TRUE(has_line(r.out, "# scaling_cells = q_n_e:8 q_n_i:4 Q_ee:16 Q_ei:16 Q_ii:16 E:2 R_T:32 "
                              "n_e:6 n_i:6 u_ex:8 u_ix:8 T_ex:16 T_ix:4"));
  const auto t = parse(r.out);
  const auto src = tool::read_table(in);
  ASSERT_EQ(t.rows(), 400u);
  for (std::size_t j = 0; j < 400; ++j) {
    EXPECT_EQ(t.columns[1][j], 3.0);
    EXPECT_EQ(t.columns[3][j], 0.0);
  }
  // Unfiltered: exact formula on the raw temperatures.
  const auto raw = parse(siac_run({"bohm", in, "--raw"}).out);
  for (std::size_t j = 0; j < 400; ++j)
    EXPECT_NEAR(raw.columns[2][j], std::sqrt(3 * src.columns[12][j] + 3 * src.columns[13][j]), 1e-14);
}

TEST_F(CliTest, BohmMissingColumnIsNamed) {
  const auto in = write("m.txt", "x q_n_e q_n_i\n0 1 2\n1 1 2\n");
  const auto r = siac_run({"bohm", in});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("'Q_ee'"), std::string::npos) << r.err;
}

TEST_F(CliTest, BohmScalingOverrides) {
  const auto in = write_moments("m.txt", 400, 0.1, [](MomentSet &m) {
    for (std::size_t j = 0; j < m.size(); ++j)
      m[Moment::q_n_e][j] = 0.1 * std::sin(m.xs[j]);
  });
  const auto js = write("s.json", R"({"q_n_e": 3, "R_T": 10})");
  const auto r = siac_run({"bohm", in, "--scalings", js});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(" q_n_e:3 "), std::string::npos);
  EXPECT_NE(r.out.find(" R_T:10 "), std::string::npos);
  EXPECT_NE(r.out.find(" T_ix:4\n"), std::string::npos);
  EXPECT_EQ(siac_run({"bohm", in, "--scalings", write("u.json", R"({"T_e": 3})")}).code, 2);
  EXPECT_EQ(siac_run({"bohm", in, "--scalings", write("n.json", R"({"T_ix": -1})")}).code, 2);
  EXPECT_EQ(siac_run({"bohm", in, "--scalings", write("b.json", "{oops")}).code, 1);
  EXPECT_EQ(siac_run({"bohm", in, "--H", "1"}).code, 2);
}

TEST_F(CliTest, BohmStrictFlagsComplexPoints) {
  const auto in = write_moments("m.txt", 100, 0.1, [](MomentSet &m) {
    m[Moment::T_ex].assign(m.size(), -1.0);
    m[Moment::T_ix].assign(m.size(), 0.1);
  });
  const auto loose = siac_run({"bohm", in, "--raw"});
  EXPECT_EQ(loose.code, 0);
  EXPECT_TRUE(has_line(loose.out, "# summary: real = 0, complex_modulus = 100, degenerate = 0"));
  const auto strict = siac_run({"bohm", in, "--raw", "--strict"});
  EXPECT_EQ(strict.code, 3);
  EXPECT_EQ(strict.out, loose.out);
}

TEST_F(CliTest, BohmDegenerateValuesRoundTrip) {
  const auto in = write_moments("m.txt", 50, 0.1, [](MomentSet &m) { m[Moment::E][7] = 0.0; });
  const auto r = siac_run({"bohm", in, "--raw"});
  ASSERT_EQ(r.code, 0);
  const auto t = parse(r.out);
  EXPECT_TRUE(std::isnan(t.columns[1][7]));
  EXPECT_TRUE(std::isnan(t.columns[2][7]));
  EXPECT_EQ(t.columns[3][7], 2.0);
}
