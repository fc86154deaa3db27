#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("balext_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  /// Runs the CLI with `args`; stdout and stderr go to files in the temp dir.
  int run(const std::string& args) {
    const std::string cmd = std::string(BALEXT_CLI) + " " + args + " > " + path("stdout") + " 2> " + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write_bytes(const std::string& name, const std::string& bytes) const {
    std::ofstream(path(name), std::ios::binary) << bytes;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckConditionPrintsBothSides) {
  ASSERT_EQ(run("check-condition --n-exp 10 --m-exp 4 --s-exp 8 --d-exp 1"), 0);
  const auto out = slurp("stdout");
  EXPECT_NE(out.find("holds=true"), std::string::npos);
  EXPECT_NE(out.find("lhs=65536"), std::string::npos);
  EXPECT_NE(out.find("rhs=7411.96734"), std::string::npos);
  ASSERT_EQ(run("check-condition --n-exp 3 --m-exp 2 --s-exp 2 --d-exp 1"), 0);
  EXPECT_NE(slurp("stdout").find("holds=false"), std::string::npos);
}

TEST_F(Cli, ConstantTableFailsVerification) {
  std::string file = "BTAB";
  file += std::string("\x01\x00\x00\x03\x02\x02\x02", 7);
  file += std::string(16 + 64, '\0');
  write_bytes("const.btab", file);
  EXPECT_EQ(run("verify-table --table " + path("const.btab") + " --report " + path("r.json")), 2);
  const auto report = nlohmann::json::parse(slurp("r.json"));
  EXPECT_EQ(report["passed"], false);
  ASSERT_TRUE(report["witness"].is_object());
  EXPECT_EQ(report["witness"]["colors"], nlohmann::json::array({0}));
  EXPECT_EQ(slurp("stderr").rfind("error: ", 0), 0u);
}

TEST_F(Cli, GeneratedTableVerifies) {
  ASSERT_EQ(run("gen-table --n-exp 2 --m-exp 2 --s-exp 2 --d-exp 2 --backend canonical --out " + path("c.btab")), 0);
  EXPECT_EQ(run("verify-table --table " + path("c.btab") + " --report " + path("r.json")), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp("r.json"))["passed"], true);
  EXPECT_EQ(run("verify-table --table " + path("c.btab") + " --prefix-balance --report " + path("p.json")), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp("p.json"))["check"], "prefix_balance");
  ASSERT_EQ(run("gen-table --n-exp 8 --m-exp 4 --s-exp 4 --d-exp 1 --seed 3 --out " + path("r.btab")), 0);
  EXPECT_EQ(run("verify-table --table " + path("r.btab") + " --mode sampled --samples 500 --seed 1"), 0);
}

TEST_F(Cli, ExtractGoldenFromFiles) {
  write_bytes("x", std::string("\x00\x10", 2));
  write_bytes("y", std::string("\x80\x00", 2));
  ASSERT_EQ(run("extract --x " + path("x") + " --y " + path("y") + " --bits 12 --sigma 1/2 --alpha 1/8 --seed 7 --out " +
                path("z")),
            0);
  EXPECT_EQ(slurp("z"), std::string("\x14", 1));
  EXPECT_NE(slurp("stdout").find("z=00010100"), std::string::npos);
}

TEST_F(Cli, ExtractRejectsUnequalLengths) {
  write_bytes("x", std::string("\x00\x10", 2));
  write_bytes("y", std::string("\x80", 1));
  EXPECT_EQ(run("extract --x " + path("x") + " --y " + path("y") + " --sigma 1/2 --alpha 1/8 --out " + path("z")), 1);
  const auto err = slurp("stderr");
  EXPECT_EQ(err.rfind("error: invalid_params: ", 0), 0u);
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
}

TEST_F(Cli, ErrorExitCodes) {
  EXPECT_EQ(run("verify-table --table " + path("missing.btab")), 3);
  EXPECT_EQ(slurp("stderr").rfind("error: io: ", 0), 0u);
  write_bytes("bad.btab", "BTAX garbage garbage garbage");
  EXPECT_EQ(run("verify-table --table " + path("bad.btab")), 3);
  EXPECT_EQ(run("gen-table --n-exp 20 --m-exp 4 --s-exp 10 --d-exp 1 --out " + path("t.btab")), 1);
  EXPECT_EQ(slurp("stderr").rfind("error: too_large: ", 0), 0u);
  EXPECT_EQ(run("extract-cond --x " + path("x") + " --y " + path("y") + " --s 1 --alpha 0 --out " + path("z")), 3);
  EXPECT_EQ(run("experiment --n 12 --sigma 1/0 --alpha 1/8 --trials 5"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("gen-table --n-exp 3"), 1);
}

TEST_F(Cli, ExtractCondAndTransform) {
  std::string bytes(128, '\0');
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<char>(i * 37 + 11);
  write_bytes("x", bytes);
  std::reverse(bytes.begin(), bytes.end());
  write_bytes("y", bytes);
  ASSERT_EQ(run("extract-cond --x " + path("x") + " --y " + path("y") + " --s 512 --alpha 32 --seed 7 --out " + path("z")), 0);
  EXPECT_EQ(slurp("z").size(), 24u);  // 186 bits
  ASSERT_EQ(run("transform --x seed:1 --y seed:2 --tau 1/2 --delta 1/2 --B 2 --out-bits 11 --out " + path("t")), 0);
  EXPECT_NE(slurp("stdout").find("z=01000100111"), std::string::npos);
  ASSERT_EQ(run("transform --x " + path("x") + " --y " + path("y") + " --tau 1/2 --delta 1/2 --out-bits 11 --out " +
                path("t2")),
            0);
  EXPECT_EQ(slurp("t2").size(), 2u);
  // 1024 input bits per stream cannot feed 1000 output bits.
  EXPECT_EQ(run("transform --x " + path("x") + " --y " + path("y") + " --tau 1/2 --delta 1/2 --out-bits 1000 --out " +
                path("t3")),
            3);
}

TEST_F(Cli, HelpDocumentsFormats) {
  for (const char* sub : {"gen-table", "verify-table", "check-condition", "extract", "extract-cond", "transform",
                          "experiment"}) {
    ASSERT_EQ(run(std::string(sub) + " --help"), 0) << sub;
    const auto out = slurp("stdout");
    EXPECT_NE(out.find("BTAB"), std::string::npos) << sub;
    EXPECT_NE(out.find("most significant bit"), std::string::npos) << sub;
  }
}
