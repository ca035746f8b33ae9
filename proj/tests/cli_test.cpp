// Copyright 2026 The Covenant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "covenant/codegen.hpp"
#include "covenant/package.hpp"
#include "test_support.hpp"

namespace covenant {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result Cli(const std::string& args) {
  std::string cmd = std::string(COVENANT_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("covenant_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, CompileWritesBinaryAndListing) {
  Result r = Cli("compile --acg toyacc --cdlt add --layer N=12,dtype=i16 -o " + P("add.bin"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(ReadBytes(P("add.bin")),
            ReadBytes(covenant::testing::TestDir() / "golden" / "add12_toyacc.cvnt"));
  EXPECT_NE(ReadText(P("add.bin.lst")).find("ADD #14, #28, #0, VECTOR, i16"), std::string::npos);
}

TEST_F(CliTest, EmitsStages) {
  Result r = Cli("compile --acg fig8acc --cdlt add --layer N=12,dtype=i16 --emit=tiled");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("loop n(2, stride=6)"), std::string::npos) << r.out;
  r = Cli("compile --acg fig8acc --cdlt add --layer N=12,dtype=i16 --emit=bogus");
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, LayerFileWithInlineOverride) {
  WriteText(P("layer.txt"), "codelet=add\nN=12\ndtype=i16\n");
  Result r = Cli("compile --acg fig8acc --layer " + P("layer.txt") + " --layer N=6 --emit=instantiated");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("a=inp([6], i16"), std::string::npos) << r.out;
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli("").code, 1);
  EXPECT_EQ(Cli("compile --cdlt add").code, 1);
  Result bad = Cli("compile --acg fig8acc --cdlt add --layer N=4,dtype=i32 --emit=mapped");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("ADD"), std::string::npos);
  EXPECT_NE(bad.out.find("i32"), std::string::npos);
  EXPECT_EQ(Cli("verify --acg fig9acc --cdlt relu --layer N=25,dtype=i32").code, 0);
}

TEST_F(CliTest, MismatchAndFault) {
  Package p = LoadPackage(FindPackage("vliw-mini"));
  // A well-formed program that never computes the sum.
  MnemonicStream wrong = {MakeMnemonic(p.acg, "ST", {0, 0, 4, 0})};
  WriteBytes(P("wrong.bin"), EncodeProgram(wrong, p.acg).binary);
  Result r = Cli("verify --acg vliw-mini --cdlt add --layer N=4,dtype=i32 --bin " + P("wrong.bin"));
  EXPECT_EQ(r.code, 3) << r.out;

  Packet clash;
  clash.slots = {MakeMnemonic(p.acg, "LD", {0, 0, 2, 0}),
                 MakeMnemonic(p.acg, "ADD", {8, 9, 1, 0, 0})};
  clash.resources = {"VMEM", "SCALAR"};
  WriteBytes(P("fault.bin"), EncodeProgram(std::vector<Packet>{clash}, p.acg).binary);
  r = Cli("verify --acg vliw-mini --cdlt add --layer N=4,dtype=i32 --bin " + P("fault.bin"));
  EXPECT_EQ(r.code, 4) << r.out;
}

TEST_F(CliTest, ReportComparesRuns) {
  const std::string base = "verify --acg fig9acc --cdlt relu --layer N=25,dtype=i32 ";
  ASSERT_EQ(Cli(base + "-o " + P("a.json")).code, 0);
  ASSERT_EQ(Cli(base + "--opt=parallelize,pack -o " + P("b.json")).code, 0);
  Result one = Cli("report " + P("a.json"));
  EXPECT_EQ(one.code, 0);
  EXPECT_NE(one.out.find(",1.000"), std::string::npos) << one.out;
  Result two = Cli("report " + P("a.json") + " " + P("b.json"));
  EXPECT_NE(two.out.find("parallelize+pack"), std::string::npos) << two.out;
  ASSERT_EQ(Cli("verify --acg fig8acc --cdlt add --layer N=4,dtype=i16 -o " + P("c.json")).code, 0);
  EXPECT_NE(Cli("report " + P("a.json") + " " + P("c.json")).code, 0);
  WriteText(P("junk.json"), "{ not json");
  EXPECT_NE(Cli("report " + P("junk.json")).code, 0);
}

TEST_F(CliTest, InspectAcgShowsCapacities) {
  Result r = Cli("inspect-acg --acg toyacc");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("SCRATCH data_width=32 banks=7 depth=1024 capacity=229376 bits (28672 bytes)"),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("MATRIX (i32,2,2)=MMUL((i8,2,2),(i8,2,2))"), std::string::npos);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::string cmd = "simulate --acg hvx-mini --cdlt mul --layer N=11,dtype=i32 --seed 5";
  Result a = Cli(cmd), b = Cli(cmd);
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("\"outputs\""), std::string::npos);
}

}  // namespace
}  // namespace covenant
