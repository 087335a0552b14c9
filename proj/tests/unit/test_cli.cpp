#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#ifndef HMMCR_CLI_PATH
#error "HMMCR_CLI_PATH must point at the hmmcr executable"
#endif

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("hmmcr_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string err;
};

Result cli(const std::string& args, const TempDir& dir, const std::string& env = "") {
  const std::string errFile = dir / "stderr.txt";
  const std::string cmd = "cd '" + dir.path.string() + "' && " + env + " '" HMMCR_CLI_PATH "' " + args +
                          " > /dev/null 2> '" + errFile + "'";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(errFile);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int countLines(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST_CASE("simulate writes one line per individual") {
  TempDir dir;
  REQUIRE(cli("simulate --model dipper --n 300 --k 7 --seed 1 --out d.txt", dir).code == 0);
  CHECK(countLines(dir / "d.txt") == 300);
  REQUIRE(cli("simulate --model dipper --n 300 --k 7 --seed 1 --out d2.txt", dir).code == 0);
  CHECK(slurp(dir / "d.txt") == slurp(dir / "d2.txt"));
  REQUIRE(cli("simulate --model dipper --n 300 --k 7 --seed 1 --theta 0.6,0.9 --reduced --out r.txt", dir).code == 0);
  CHECK(slurp(dir / "r.txt").find(" : ") != std::string::npos);
}

TEST_CASE("run writes chain, metadata and report; determinism") {
  TempDir dir;
  REQUIRE(cli("simulate --model dipper --n 300 --k 7 --seed 1 --theta 0.6,0.9 --out d.txt", dir).code == 0);
  const std::string base = "run --model dipper --data d.txt --strategy filter --iterations 10000";
  REQUIRE(cli(base + " --seed 1 --out a", dir).code == 0);
  REQUIRE(cli(base + " --seed 1 --out b", dir).code == 0);
  for (const char* f : {"chain.csv", "meta.json", "report.csv"}) {
    CHECK(fs::exists(dir.path / "a" / f));
  }
  CHECK(countLines(dir / "a/chain.csv") == 10001);
  CHECK(slurp(dir / "a/chain.csv") == slurp(dir / "b/chain.csv"));
  CHECK(slurp(dir / "a/report.csv").find("phi") != std::string::npos);

  REQUIRE(cli(base + " --seed 2 --out c", dir).code == 0);
  CHECK(slurp(dir / "a/chain.csv") != slurp(dir / "c/chain.csv"));
}

TEST_CASE("latent strategy refuses reduced data") {
  TempDir dir;
  REQUIRE(cli("simulate --model dipper --n 100 --k 5 --seed 3 --theta 0.6,0.9 --reduced --out r.txt", dir).code == 0);
  const auto res = cli("run --model dipper --data r.txt --strategy latent --iterations 500 --out x", dir);
  CHECK(res.code == 1);
  CHECK(res.err.find("latent strategy needs one history per individual") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "x"));
}

TEST_CASE("usage and runtime errors") {
  TempDir dir;
  CHECK(cli("", dir).code == 1);
  CHECK(cli("bogus", dir).code == 1);
  CHECK(cli("run --model dipper --data nope.txt --strategy filter", dir).code == 1);
  CHECK(cli("simulate --model dipper --n 0 --k 7 --out d.txt", dir).code == 1);
  std::ofstream(dir / "bad.txt") << "10x1\n";
  CHECK(cli("run --model dipper --data bad.txt --strategy filter --iterations 100 --out y", dir).code == 2);
  CHECK_FALSE(fs::exists(dir.path / "y"));
}

TEST_CASE("default output root comes from the environment") {
  TempDir dir;
  REQUIRE(cli("simulate --model dipper --n 50 --k 5 --seed 4 --theta 0.6,0.9 --out d.txt", dir).code == 0);
  fs::create_directories(dir.path / "root");
  REQUIRE(cli("run --model dipper --data d.txt --strategy filter --iterations 500 --seed 4", dir,
              "HMMCR_OUTPUT_ROOT='" + (dir / "root") + "'")
              .code == 0);
  bool found = false;
  for (const auto& e : fs::recursive_directory_iterator(dir.path / "root")) {
    found = found || e.path().filename() == "chain.csv";
  }
  CHECK(found);
}

TEST_CASE("report over four strategies") {
  TempDir dir;
  REQUIRE(cli("simulate --model dipper --n 200 --k 6 --seed 5 --theta 0.6,0.9 --out d.txt", dir).code == 0);
  std::string runs;
  for (const char* s : {"latent", "filter", "filter-rr", "filter-block"}) {
    const std::string out = std::string("r_") + s;
    REQUIRE(cli(std::string("run --model dipper --data d.txt --iterations 3000 --seed 5 --strategy ") + s +
                    " --out " + out,
                dir)
                .code == 0);
    runs += " " + out;
  }
  REQUIRE(cli("report --runs" + runs + " --out cmp", dir).code == 0);
  CHECK(countLines(dir / "cmp/comparison.csv") == 5);
  const std::string table = slurp(dir / "cmp/comparison.csv");
  CHECK(table.find("fold_change") != std::string::npos);
  for (const char* label : {"LatentState", "Filtering,", "FilteringRR", "FilteringBlocking"}) {
    CHECK(table.find(label) != std::string::npos);
  }
  CHECK(cli("report --runs r_latent --out cmp2", dir).code != 0);
}

TEST_CASE("autoblock scheme feeds run") {
  TempDir dir;
  REQUIRE(cli("simulate --model goose --n 1000 --k 4 --seed 21 --reduced --out g.txt", dir).code == 0);
  REQUIRE(cli("autoblock --model goose --data g.txt --pilot-iterations 5000 --eval-iterations 3000 "
              "--seed 21 --out scheme.json",
              dir)
              .code == 0);
  REQUIRE(cli("autoblock --model goose --data g.txt --pilot-iterations 5000 --eval-iterations 3000 "
              "--seed 21 --out scheme2.json",
              dir)
              .code == 0);
  const std::string scheme = slurp(dir / "scheme.json");
  CHECK(scheme == slurp(dir / "scheme2.json"));
  CHECK(scheme.find("\"blocks\"") != std::string::npos);
  CHECK(scheme.find("psi[") != std::string::npos);
  REQUIRE(cli("run --model goose --data g.txt --strategy filter-block --scheme scheme.json "
              "--iterations 1000 --seed 2 --out run",
              dir)
              .code == 0);
  CHECK(slurp(dir / "run/meta.json").find("FilteringBlocking") != std::string::npos);
  // a scheme for another model is rejected
  CHECK(cli("simulate --model dipper --n 50 --k 5 --seed 4 --out d.txt", dir).code == 0);
  CHECK(cli("run --model dipper --data d.txt --strategy filter-block --scheme scheme.json "
            "--iterations 100 --out z",
            dir)
            .code != 0);
}
