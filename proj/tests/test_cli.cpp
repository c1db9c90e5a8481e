#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mgtr/config.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  static int counter = 0;
  const std::string base = "/tmp/mgtr_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const std::string cmd = std::string(MGTR_CLI_PATH) + " " + args + " >" + base + ".out 2>" + base + ".err";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(base + ".out");
  r.err = slurp(base + ".err");
  std::remove((base + ".out").c_str());
  std::remove((base + ".err").c_str());
  return r;
}

std::string write_doc(const std::string& name, const nlohmann::json& doc) {
  const std::string path = "/tmp/mgtr_cli_" + name + ".json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

const std::string kDefault = MGTR_CONFIG_DIR "/default.json";

}  // namespace

TEST_CASE("cli success paths") {
  SUBCASE("op as json") {
    const Run r = run("op --config " + kDefault + " --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["tool_version"] == "1.0.0");
    CHECK(j.contains("config_echo"));
  }
  SUBCASE("gain csv carries the config echo") {
    const Run r = run("gain --config " + kDefault + " --freq-ghz 2.1");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("f_hz") != std::string::npos);
    CHECK(r.out.find("\n# ") != std::string::npos);
  }
  SUBCASE("sweep with values") {
    const Run r = run("sweep --config " + kDefault + " --path bias.vb_v --values 0.38,0.42");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("bias.vb_v,", 0) == 0);
  }
  SUBCASE("single-gate override") {
    const Run r = run("sweetspot --config " + kDefault + " --mode single --format json");
    CHECK(r.code == 0);
  }
}

TEST_CASE("cli input errors exit with 2") {
  SUBCASE("missing config file") {
    const Run r = run("op --config /nonexistent.json");
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }
  SUBCASE("unknown key") {
    nlohmann::json doc = mgtr::emit(mgtr::default_design());
    doc["bias"]["vbias_v"] = 0.3;
    const Run r = run("op --config " + write_doc("unknown", doc));
    CHECK(r.code == 2);
    CHECK(r.err.find("bias.vbias_v") != std::string::npos);
  }
  SUBCASE("bad flag") {
    CHECK(run("op --config " + kDefault + " --format xml").code == 2);
  }
  SUBCASE("unknown sweep path") {
    const Run r = run("sweep --config " + kDefault + " --path bias.nope --values 1");
    CHECK(r.code == 2);
    CHECK(r.err.find("bias.vb_v") != std::string::npos);
  }
  SUBCASE("control transistor out of triode") {
    nlohmann::json doc = mgtr::emit(mgtr::default_design());
    doc["bias"]["vctrl_v"] = 2.1;
    CHECK(run("op --config " + write_doc("notriode", doc)).code == 2);
  }
}

TEST_CASE("cli non-convergence exits with 3 and names the branch") {
  nlohmann::json doc = mgtr::emit(mgtr::default_design());
  doc["analysis"]["bias_max_iter"] = 1;
  const Run r = run("op --config " + write_doc("noconv", doc));
  CHECK(r.code == 3);
  CHECK(r.err.find("branch MT") != std::string::npos);
}
