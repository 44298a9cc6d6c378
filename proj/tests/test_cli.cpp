#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + FALSETHETA_CLI + std::string(" ") + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> v;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      v.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  v.push_back(cur);
  return v;
}

}  // namespace

TEST(Coeffs, AlphaZeroRows) {
  auto r = run("coeffs --j 0 --n 12");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 12u);
  std::vector<std::string> got;
  for (const auto& l : ls) {
    auto j = nlohmann::json::parse(l);
    got.push_back(j["alpha"].get<std::string>());
    EXPECT_EQ(j["decomposition"], "ok");
  }
  EXPECT_EQ(got, (std::vector<std::string>{"-1", "0", "1", "1", "4", "4", "9", "11", "19", "23", "37", "44"}));
}

TEST(Coeffs, Podeu) {
  auto r = run("coeffs --podeu --n 10 --format csv");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 11u);
  EXPECT_EQ(ls[0], "n,podeu");
  std::string vals;
  for (std::size_t i = 1; i < ls.size(); ++i) vals += split(ls[i])[1] + (i + 1 < ls.size() ? "," : "");
  EXPECT_EQ(vals, "1,1,1,2,3,3,4,5,8,8");
}

TEST(Coeffs, SingleRow) {
  auto r = run("coeffs --j 1 --n 1 --format csv");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[1], "1,0,1,ok");
}

TEST(Coeffs, SeriesJson) {
  auto r = run("coeffs --j 1 --n 6 --series u");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["offset"], "25/48");
  EXPECT_EQ(j["order"], 6);
  ASSERT_EQ(j["coeffs"].size(), 6u);
  auto a = nlohmann::json::parse(run("coeffs --j 0 --n 4 --series alpha").out);
  EXPECT_EQ(a["offset"], "-1/48");
  EXPECT_EQ(a["coeffs"][0], "-1");
}

TEST(Coeffs, LatticeDump) {
  auto r = run("coeffs --j 0 --dump 20");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_GT(ls.size(), 2u);
  EXPECT_EQ(ls[0], "j,n_numerator,n_denominator,value");
  bool found = false;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = split(ls[i]);
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[0], "0");
    EXPECT_EQ(48 % std::stol(f[2]), 0);
    if (f[1] == "1" && f[2] == "48") {
      EXPECT_EQ(f[3], "-1");
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Asymptotic, ResidualPopulated) {
  auto r = run("asymptotic --j 1 --n 100 --exact");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["exact"], "448822583");
  double ms = j["main_sum"].get<double>();
  EXPECT_NEAR(j["residual"].get<double>(), 448822583.0 - ms, 1e-6);
  EXPECT_TRUE(j["n34_ratio"].is_number());
  auto bare = nlohmann::json::parse(run("asymptotic --j 1 --n 100").out);
  EXPECT_TRUE(bare["exact"].is_null());
  EXPECT_TRUE(bare["residual"].is_null());
}

TEST(Asymptotic, ScanCsv) {
  auto r = run("asymptotic --j 2 --scan 500:4000:4 --format csv");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls[0], "j,n,exact,main_sum,residual,n34_ratio");
  const char* ns[] = {"500", "1000", "2000", "4000"};
  for (int i = 0; i < 4; ++i) {
    auto f = split(ls[static_cast<std::size_t>(i + 1)]);
    ASSERT_EQ(f.size(), 6u);
    EXPECT_EQ(f[1], ns[i]);
    EXPECT_FALSE(f[5].empty());
  }
}

TEST(Asymptotic, FloatsCarrySeventeenDigits) {
  auto r = run("asymptotic --j 0 --n 50 --exact --format csv");
  auto f = split(lines(r.out)[1]);
  std::string ms = f[3];
  int digits = 0;
  for (char c : ms) {
    if (c == 'e' || c == 'E') break;
    if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
  }
  EXPECT_GE(digits, 16);
}

TEST(Threads, ByteIdenticalOutput) {
  for (const char* args : {"asymptotic --j 0 --n 400 --exact", "coeffs --j 2 --n 50 --format csv", "kernel-table"}) {
    auto a = run(args, "FALSETHETA_THREADS=1");
    auto b = run(args, "FALSETHETA_THREADS=3");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(KernelTable, Shape) {
  auto r = run("kernel-table");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 16u);
  EXPECT_EQ(ls[0], "j,r,value,closed_form_string,rel_error_vs_table");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = split(ls[i]);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_LT(std::abs(std::stod(f[4])), 1e-10);
  }
  EXPECT_EQ(split(ls[3])[3], "284/3*pi^6");
}

TEST(Multiplier, InversionMatrix) {
  auto r = run("multiplier --a 0 --b -1 --c 1 --d 0");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  const double s = std::sqrt(0.5);
  const double expect[3][3] = {{0.5, 0.5, s}, {0.5, 0.5, -s}, {s, -s, 0}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      EXPECT_NEAR(j["psi"][a][b]["re"].get<double>(), expect[a][b], 1e-12);
      EXPECT_NEAR(j["psi"][a][b]["im"].get<double>(), 0, 1e-12);
    }
  auto arc = nlohmann::json::parse(run("multiplier --arc 1/3").out);
  EXPECT_EQ(arc["h_prime"], 2);
}

TEST(ExactPn, Rademacher) {
  auto r = run("exact-pn --n 200");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["exact"], "3972999029388");
  EXPECT_NEAR(j["rademacher"].get<double>(), 3972999029388.0, 0.5);
  EXPECT_EQ(lines(run("exact-pn --n 30 --all").out).size(), 30u);
}

TEST(Verify, Groups) {
  auto t = run("verify --only table");
  EXPECT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("15/15 Table 1 entries OK"), std::string::npos);
  EXPECT_EQ(run("verify --only multipliers").code, 0);
  EXPECT_EQ(run("verify --only sigma").code, 0);
  EXPECT_EQ(run("verify --only nothing").code, 2);
}

TEST(ExitCodes, Validation) {
  EXPECT_EQ(run("coeffs --j 3 --n 5").code, 2);
  EXPECT_EQ(run("asymptotic --j 0").code, 2);
  EXPECT_EQ(run("asymptotic --j 0 --scan 10:5:2").code, 2);
  EXPECT_EQ(run("multiplier --a 1 --b 1 --c 1 --d 1").code, 2);
  EXPECT_EQ(run("nonsense").code, 2);
  EXPECT_EQ(run("coeffs --j 0 --n 3", "FALSETHETA_THREADS=zero").code, 2);
}

TEST(ExitCodes, NonConvergence) {
  // a tolerance below what any precision tier can reach on the near arcs
  EXPECT_EQ(run("asymptotic --j 1 --n 200 --tol 1e-200").code, 4);
}
