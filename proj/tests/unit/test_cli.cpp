#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qpack/config.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("qpack_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(QPACK_EXE) + " --quiet " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("validate writes the scene and succeeds") {
  Sandbox box;
  const auto cfg = box.write("c.json", R"({"gap_delta_mm": 2.0})");
  REQUIRE(run("--config " + cfg.string() + " --out " + (box.dir / "o").string() + " validate") == 0);
  const std::string scene = slurp(box.dir / "o" / "scene.json");
  CHECK(scene.find("\"gap\"") != std::string::npos);
}

TEST_CASE("exit codes") {
  Sandbox box;
  const std::string out = " --out " + (box.dir / "o").string();
  CHECK(run("--config " + box.write("bad.json", R"({"gap_delta_mm": "x"})").string() + out + " validate") == 2);
  CHECK(run("--config " + box.write("unk.json", R"({"colour": 1})").string() + out + " validate") == 2);
  CHECK(run("--config " + (box.dir / "missing.json").string() + out + " validate") == 5);
  CHECK(run(out + " no-such-command") == 2);
  CHECK(run(out + " --workers 0 validate") == 2);
  CHECK(run(out) != 0);
  box.write("file", "x");
  CHECK(run("--out " + (box.dir / "file" / "sub").string() + " validate") == 5);
}

TEST_CASE("outputs carry the config digest and do not depend on the worker count") {
  Sandbox box;
  const std::string text = R"({"gap_delta_mm": 1.0, "duration_ns": 2.0})";
  const auto cfg = box.write("c.json", text);
  const std::string digest = qpack::config_digest(qpack::parse_config(text));
  REQUIRE(run("--config " + cfg.string() + " --workers 1 --out " + (box.dir / "a").string() + " modes") == 0);
  REQUIRE(run("--config " + cfg.string() + " --workers 2 --out " + (box.dir / "b").string() + " modes") == 0);
  for (const std::string name : {"modes.csv", "cavity_modes.csv"}) {
    const std::string a = slurp(box.dir / "a" / name);
    CHECK(a.rfind("# qpack ", 0) == 0);
    CHECK(a.find("config_digest=" + digest) != std::string::npos);
    CHECK(a.find("command=modes") != std::string::npos);
    CHECK(a == slurp(box.dir / "b" / name));
  }
}
