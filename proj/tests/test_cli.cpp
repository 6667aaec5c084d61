#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

// SECALOHA_CLI_PATH is injected by the build and points at the built binary.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory per case, removed afterwards.
class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::path("cli_scratch") / std::to_string(counter++);
    fs::create_directories(dir_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path p = dir_ / name;
    std::ofstream out(p);
    out << content;
    return p;
  }

  const fs::path& dir() const { return dir_; }

  RunResult run(const std::string& args, const std::string& env = "") const {
    const fs::path out_file = dir_ / "stdout.txt";
    const fs::path err_file = dir_ / "stderr.txt";
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += std::string(SECALOHA_CLI_PATH) + " " + args + " >" +
           out_file.string() + " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
  }

 private:
  fs::path dir_;
};

std::string system_block(const std::string& arrival, const std::string& tx,
                         const std::string& fail, const std::string& rho) {
  return "[system]\nn_users = 2\narrival = " + arrival + "\ntx_prob = " + tx +
         "\nfail_prob = " + fail + "\nrho = " + rho + "\n";
}

std::string output_block(const fs::path& dir) {
  return "[output]\ndir = " + dir.string() + "\n";
}

json load_json(const fs::path& p) {
  REQUIRE_MESSAGE(fs::exists(p), p.string() << " should exist");
  return json::parse(slurp(p));
}

constexpr const char* kChannelBlock =
    "[channel]\n"
    "n_users = 2\n"
    "power = 10\n"
    "mean_gain_base = 1, 1\n"
    "mean_gain_cross = 0, 0.8, 0.8, 0\n"
    "n_samples = 20000\n"
    "seed = 11\n";

}  // namespace

TEST_CASE("capacity runs end to end and writes a self-describing report") {
  Scratch s;
  auto cfg = s.write("cap.ini",
                     std::string(kChannelBlock) + output_block(s.dir() / "o"));
  auto r = s.run("capacity " + cfg.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("capacity.json") != std::string::npos);

  auto doc = load_json(s.dir() / "o" / "capacity.json");
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["command"] == "capacity");
  REQUIRE(doc["records"].size() == 4);
  CHECK(doc["records"][0]["kind"] == "ergodic");
  CHECK(doc["records"][2]["kind"] == "secrecy");
  CHECK(doc["records"][0]["value"].get<double>() > 0.0);
  REQUIRE(doc["rho"].size() == 2);
  for (const auto& v : doc["rho"]) {
    CHECK(v.get<double>() >= 0.0);
    CHECK(v.get<double>() <= 1.0);
  }
}

TEST_CASE("capacity reports are byte-identical across reruns") {
  Scratch s;
  auto cfg_a = s.write("a.ini", std::string(kChannelBlock) +
                                    output_block(s.dir() / "a"));
  auto cfg_b = s.write("b.ini", std::string(kChannelBlock) +
                                    output_block(s.dir() / "b"));
  CHECK(s.run("capacity " + cfg_a.string()).exit_code == 0);
  CHECK(s.run("capacity " + cfg_b.string()).exit_code == 0);
  const auto bytes_a = slurp(s.dir() / "a" / "capacity.json");
  const auto bytes_b = slurp(s.dir() / "b" / "capacity.json");
  CHECK(bytes_a == bytes_b);
  CHECK_FALSE(bytes_a.empty());
}

TEST_CASE("zero transmit power is a domain error, exit 3") {
  Scratch s;
  auto cfg = s.write("cap.ini",
                     "[channel]\nn_users = 2\npower = 0\n"
                     "mean_gain_base = 1, 1\nmean_gain_cross = 0, 1, 1, 0\n"
                     "n_samples = 100\nseed = 1\n" +
                         output_block(s.dir()));
  auto r = s.run("capacity " + cfg.string());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("domain error") != std::string::npos);
}

TEST_CASE("a capacity run without a channel section exits 2 and says why") {
  Scratch s;
  auto cfg = s.write("cap.ini",
                     system_block("0.1, 0.1", "0.5, 0.5", "0, 0", "1, 1") +
                         output_block(s.dir()));
  auto r = s.run("capacity " + cfg.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("channel") != std::string::npos);
}

TEST_CASE("region tracing writes the report and the boundary table") {
  Scratch s;
  auto cfg = s.write("reg.ini",
                     system_block("0.04, 0.04", "0.3, 0.3", "0, 0", "0.5, 0.5") +
                         output_block(s.dir() / "o"));
  auto r = s.run("region " + cfg.string() + " --kind secrecy-original --grid 41");
  CHECK(r.exit_code == 0);

  auto doc = load_json(s.dir() / "o" / "region_report.json");
  CHECK(doc["command"] == "region");
  CHECK(doc["joint_nonempty"] == true);
  CHECK(doc["original"]["converged"] == true);

  REQUIRE_FALSE(doc["thresholds"].is_null());
  REQUIRE(doc["thresholds"]["points"].size() == 2);
  CHECK(std::abs(doc["thresholds"]["points"][0]["q1"].get<double>() -
                 0.5217803813052) < 1e-9);
  CHECK(std::abs(doc["thresholds"]["points"][0]["q2"].get<double>() -
                 0.0417424305044) < 1e-9);

  const auto csv = slurp(s.dir() / "o" / "boundaries.csv");
  CHECK(csv.rfind("kind,user,q1,q2\n", 0) == 0);
  CHECK(csv.find("secrecy-original") != std::string::npos);
}

TEST_CASE("threshold markers disappear outside their regime") {
  Scratch s;
  // Discriminant below zero: no real corner for these rates.
  auto cfg = s.write("reg.ini",
                     system_block("0.25, 0.3", "0.3, 0.3", "0, 0", "0.5, 0.5") +
                         output_block(s.dir() / "o"));
  auto r = s.run("region " + cfg.string() + " --kind secrecy-original --grid 21");
  CHECK(r.exit_code == 0);
  auto doc = load_json(s.dir() / "o" / "region_report.json");
  CHECK(doc["thresholds"].is_null());
}

TEST_CASE("region tracing is two-user only, exit 4") {
  Scratch s;
  auto cfg = s.write("reg.ini",
                     "[system]\nn_users = 3\narrival = 0.05, 0.05, 0.05\n"
                     "tx_prob = 0.3, 0.3, 0.3\nfail_prob = 0, 0, 0\n"
                     "rho = 0.5, 0.5, 0.5\n" +
                         output_block(s.dir()));
  auto r = s.run("region " + cfg.string());
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("dimensionality") != std::string::npos);
}

TEST_CASE("an unknown region kind exits 2") {
  Scratch s;
  auto cfg = s.write("reg.ini",
                     system_block("0.04, 0.04", "0.3, 0.3", "0, 0", "0.5, 0.5") +
                         output_block(s.dir()));
  auto r = s.run("region " + cfg.string() + " --kind nonsense");
  CHECK(r.exit_code == 2);
}

TEST_CASE("optimize reports the closed form next to the oracle") {
  Scratch s;
  auto cfg = s.write("opt.ini",
                     system_block("0.01, 0.01", "0, 0", "0, 0", "0.16, 0.16") +
                         output_block(s.dir() / "o"));
  auto r = s.run("optimize " + cfg.string() + " --oracle-resolution 500");
  CHECK(r.exit_code == 0);

  auto doc = load_json(s.dir() / "o" / "optimize.json");
  CHECK(doc["closed_form"]["case_label"] == "Case1");
  CHECK(std::abs(doc["closed_form"]["throughput"].get<double>() - 0.32) < 1e-9);
  CHECK(std::abs(doc["closed_form"]["q_opt"][0].get<double>() - 0.2) < 1e-9);
  CHECK(doc["oracle_resolution"] == 500);
  CHECK(doc["throughput_discrepancy"].get<double>() < 2.0 / 500.0);
}

TEST_CASE("an infeasible optimization exits 5") {
  Scratch s;
  auto cfg = s.write("opt.ini",
                     system_block("0.3, 0.3", "0, 0", "0, 0", "1, 1") +
                         output_block(s.dir()));
  auto r = s.run("optimize " + cfg.string());
  CHECK(r.exit_code == 5);
  CHECK(r.err.find("infeasible") != std::string::npos);
}

TEST_CASE("a degenerate oracle resolution exits 2") {
  Scratch s;
  auto cfg = s.write("opt.ini",
                     system_block("0.01, 0.01", "0, 0", "0, 0", "0.16, 0.16") +
                         output_block(s.dir()));
  auto r = s.run("optimize " + cfg.string() + " --oracle-resolution 0");
  CHECK(r.exit_code == 2);
}

TEST_CASE("simulate writes metrics that balance their own books") {
  Scratch s;
  auto cfg = s.write(
      "sim.ini",
      system_block("0.1, 0.1", "0.5, 0.5", "0, 0", "1, 1") +
          "[sim]\nn_slots = 20000\nwarmup_slots = 1000\nseed = 5\n"
          "replications = 3\n" +
          output_block(s.dir() / "o"));
  auto r = s.run("simulate " + cfg.string());
  CHECK(r.exit_code == 0);

  auto doc = load_json(s.dir() / "o" / "simulate.json");
  CHECK(doc["command"] == "simulate");
  CHECK(doc["replications"] == 3);
  const auto& m = doc["metrics"];
  CHECK(m["total_arrivals"].get<std::uint64_t>() ==
        m["total_departures"].get<std::uint64_t>() +
            m["final_queue_total"].get<std::uint64_t>());
  CHECK(m["throughput_total"].get<double>() > 0.1);
  CHECK_FALSE(m["ci_halfwidth"].is_null());
}

TEST_CASE("traced simulations also emit the per-slot table") {
  Scratch s;
  auto cfg = s.write(
      "sim.ini",
      system_block("0.2, 0.2", "0.5, 0.5", "0, 0", "1, 1") +
          "[sim]\nn_slots = 200\nseed = 5\ntrace = yes\n" +
          output_block(s.dir() / "o"));
  auto r = s.run("simulate " + cfg.string());
  CHECK(r.exit_code == 0);
  const auto csv = slurp(s.dir() / "o" / "trace.csv");
  CHECK(csv.rfind("slot,queue_1,queue_2,tx_1,tx_2,success_user,collision\n", 0) ==
        0);
  // Header plus one row per slot.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 201);
}

TEST_CASE("zero simulated slots is a config error, exit 2") {
  Scratch s;
  auto cfg = s.write(
      "sim.ini", system_block("0.1, 0.1", "0.5, 0.5", "0, 0", "1, 1") +
                     "[sim]\nn_slots = 0\nseed = 5\n" + output_block(s.dir()));
  auto r = s.run("simulate " + cfg.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("n_slots") != std::string::npos);
}

TEST_CASE("the output directory env override wins over the config") {
  Scratch s;
  auto cfg = s.write("cap.ini", std::string(kChannelBlock) +
                                    output_block(s.dir() / "ignored"));
  const fs::path forced = s.dir() / "forced";
  auto r = s.run("capacity " + cfg.string(),
                 "SECALOHA_OUTPUT_DIR=" + forced.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(forced / "capacity.json"));
  CHECK_FALSE(fs::exists(s.dir() / "ignored" / "capacity.json"));
}

TEST_CASE("csv-only output suppresses the json reports") {
  Scratch s;
  auto cfg = s.write("reg.ini",
                     system_block("0.04, 0.04", "0.3, 0.3", "0, 0", "0.5, 0.5") +
                         "[output]\ndir = " + (s.dir() / "o").string() +
                         "\nformat = csv\n");
  auto r = s.run("region " + cfg.string() + " --grid 11");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(s.dir() / "o" / "boundaries.csv"));
  CHECK_FALSE(fs::exists(s.dir() / "o" / "region_report.json"));
}

TEST_CASE("sweeping the transmit probability finds the throughput peak") {
  Scratch s;
  auto cfg = s.write(
      "sweep.ini",
      system_block("0.0, 0.0", "0.5, 0.4", "0, 0", "1, 1") +
          "[sim]\nn_slots = 30000\nseed = 13\ndominant_mode = yes\n"
          "replications = 2\n" +
          output_block(s.dir() / "o"));
  auto r = s.run("sweep " + cfg.string() +
                 " --param q1 --from 0.05 --to 0.95 --steps 7");
  CHECK(r.exit_code == 0);

  const auto csv = slurp(s.dir() / "o" / "sweep.csv");
  CHECK(csv.rfind("param,value,throughput_total,throughput_1,throughput_2,"
                  "p_e_1,p_e_2,stable_1,stable_2\n",
                  0) == 0);

  auto doc = load_json(s.dir() / "o" / "sweep.json");
  REQUIRE(doc["points"].size() == 7);
  // With q2 fixed at 0.4 the busy-queue total is maximized at q1 = 1:
  // S(q1) = 0.6 q1 + 0.4 (1 - q1) grows in q1.
  double best_value = -1.0, best_s = -1.0;
  for (const auto& pt : doc["points"]) {
    const double st = pt["metrics"]["throughput_total"].get<double>();
    if (st > best_s) {
      best_s = st;
      best_value = pt["value"].get<double>();
    }
  }
  CHECK(best_value == doctest::Approx(0.95).epsilon(1e-9));
  CHECK(best_s == doctest::Approx(0.6 * 0.95 + 0.4 * 0.05).epsilon(0.05));
}

TEST_CASE("sweep parameter names are strictly validated") {
  Scratch s;
  auto cfg = s.write(
      "sweep.ini",
      system_block("0.0, 0.0", "0.5, 0.5", "0, 0", "1, 1") +
          "[sim]\nn_slots = 100\nseed = 1\n" + output_block(s.dir()));
  CHECK(s.run("sweep " + cfg.string() + " --param zeta --steps 3").exit_code == 2);
  CHECK(s.run("sweep " + cfg.string() + " --param q7 --steps 3").exit_code == 2);
  CHECK(s.run("sweep " + cfg.string() + " --param q1 --steps 1").exit_code == 2);
}

TEST_CASE("bad invocations exit 2") {
  Scratch s;
  CHECK(s.run("").exit_code == 2);                       // no subcommand
  CHECK(s.run("capacity").exit_code == 2);               // missing config path
  CHECK(s.run("capacity no_such_file.ini").exit_code == 2);
  CHECK(s.run("frobnicate x.ini").exit_code == 2);       // unknown subcommand
}
