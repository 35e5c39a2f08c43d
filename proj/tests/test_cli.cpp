#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("kacsim_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result cli(const std::string& args, const std::string& env = "") {
  const auto o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  const std::string cmd = env + " \"" + std::string(KACSIM_CLI_PATH) + "\" " + args + " >\"" + o.string() + "\" 2>\"" +
                          e.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

fs::path write_config(const std::string& name, const json& j) {
  const auto p = scratch() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

json small_config() {
  return json{{"model", {{"M", 2}, {"N", 4}, {"lambda_S", 1.0}, {"lambda_R", 1.0}, {"mu", 1.0}}},
              {"initial", {{"type", "gaussian"}, {"variance", 0.3}}},
              {"ensemble", {{"n_traj", 2000}, {"t_grid", {0.0, 0.5, 1.0}}, {"seed", 17}}},
              {"entropy", {{"bootstrap", 10}}}};
}

std::string first_data_row(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    return line;
  }
  return {};
}

}  // namespace

TEST_CASE("version and help") {
  auto r = cli("--version");
  CHECK(r.code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
  CHECK(cli("--help").code == 0);
  CHECK(cli("no-such-command").code == 2);
}

TEST_CASE("envelope output starts at one") {
  const auto cfg = write_config("env.json", small_config());
  const auto out = scratch() / "env";
  const auto r = cli("envelope --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);
  const std::string csv = slurp(out / "envelope.csv");
  CHECK(csv.find("# config_hash=") != std::string::npos);
  CHECK(csv.find("# seed=17") != std::string::npos);
  CHECK(csv.find("t,envelope,envelope_poisson_sum,m1_pred,m2_pred") != std::string::npos);
  const auto row = first_data_row(csv);
  REQUIRE_FALSE(row.empty());
  std::istringstream rs(row);
  std::string t, e;
  std::getline(rs, t, ',');
  std::getline(rs, e, ',');
  CHECK(std::stod(t) == 0.0);
  CHECK(std::stod(e) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fs::exists(out / "manifest.json"));
  const auto summary = json::parse(r.out);
  CHECK(summary.at("pass").get<bool>());
}

TEST_CASE("invalid configurations exit with code 2 and write nothing") {
  auto bad = small_config();
  bad["model"]["mu"] = -1.0;
  const auto out = scratch() / "bad";
  auto r = cli("simulate --config \"" + write_config("bad.json", bad).string() + "\" --out \"" + out.string() + "\"");
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(json::accept(r.err));

  auto unknown = small_config();
  unknown["model"]["lambda"] = 1.0;
  r = cli("simulate --config \"" + write_config("unknown.json", unknown).string() + "\" --out \"" + out.string() + "\"");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).dump().find("lambda") != std::string::npos);

  std::ofstream(scratch() / "broken.json") << "{ \"model\": ";
  r = cli("simulate --config \"" + (scratch() / "broken.json").string() + "\" --out \"" + out.string() + "\"");
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("outputs do not depend on the worker count") {
  const auto cfg = write_config("sim.json", small_config());
  for (const std::string sub : {"simulate", "entropy"}) {
    CAPTURE(sub);
    const auto a = scratch() / (sub + "_w1"), b = scratch() / (sub + "_w4");
    REQUIRE(cli(sub + " --config \"" + cfg.string() + "\" --out \"" + a.string() + "\" --workers 1").code == 0);
    REQUIRE(cli(sub + " --config \"" + cfg.string() + "\" --out \"" + b.string() + "\"", "KACSIM_WORKERS=4").code == 0);
    const std::string csv = sub == "simulate" ? "moments.csv" : "entropy.csv";
    CHECK(slurp(a / csv) == slurp(b / csv));
    CHECK_FALSE(slurp(a / csv).empty());
  }
}

TEST_CASE("seed flag overrides the configuration") {
  const auto cfg = write_config("seed.json", small_config());
  const auto out = scratch() / "seeded";
  REQUIRE(cli("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\" --seed 99").code == 0);
  CHECK(slurp(out / "moments.csv").find("# seed=99") != std::string::npos);
  const auto manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("seed").get<std::uint64_t>() == 99);
  CHECK(manifest.at("files").contains("moments.csv"));
  CHECK(manifest.at("angle").at("inverse_cdf_knots").get<int>() == 65536);
}

TEST_CASE("sum rule report") {
  const auto out = scratch() / "sumrule";
  const auto r = cli("verify-sum-rule --k 2 --n 2000 --out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(out / "sum_rule.json"));
  for (const char* key : {"k", "n_words", "C_km", "Z_hat_diag_mean", "max_offdiag", "se", "max_z_score", "pass"})
    CHECK(j.contains(key));
  CHECK(j.at("k").get<int>() == 2);
}

TEST_CASE("discretization subcommands") {
  const auto a = scratch() / "angle";
  REQUIRE(cli("discretize-angle --K 3 --out \"" + a.string() + "\"").code == 0);
  CHECK(slurp(a / "nu_K.csv").find("theta,weight") != std::string::npos);
  CHECK(json::parse(slurp(a / "angle_report.json")).contains("mass_error"));

  const auto s = scratch() / "sphere";
  REQUIRE(cli("discretize-sphere --L 3 --K 4 --out \"" + s.string() + "\"").code == 0);
  CHECK(slurp(s / "sphere.csv").find("omega_x,omega_y,omega_z,weight") != std::string::npos);
  CHECK(fs::exists(s / "sphere_report.json"));
}
