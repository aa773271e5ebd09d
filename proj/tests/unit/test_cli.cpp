#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LOWERCS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string field(const std::string& text, const std::string& key) {
  for (const auto& line : lines(text)) {
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "lowercs_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("enumerate lists the hyperbolic cross") {
  const Run r = run("enumerate --s 4 --d 2");
  CHECK(r.status == 0);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 8);
  CHECK(out[0] == "0 0");
  CHECK(out[1] == "1 0");
  const Run csv = run("enumerate --s 4 --d 2 --format csv");
  CHECK(lines(csv.out).size() == 9);
  CHECK(lines(csv.out)[0] == "nu1,nu2");
  const Run lower = run("enumerate --s 4 --d 2 --lower-card 3");
  CHECK(lines(lower.out).size() == 3);
}

TEST_CASE("weights and K of s") {
  const Run w = run("weights --kind legendre --index 1,0,2");
  CHECK(w.status == 0);
  CHECK(std::stod(w.out) == doctest::Approx(3.872983346207417).epsilon(1e-15));
  CHECK(std::stod(run("weights --kind chebyshev --index 2,1").out) == doctest::Approx(2.0));
  CHECK(lines(run("weights --s 4 --d 2").out).size() == 8);
  const Run k = run("k-of-s --kind chebyshev --s 3 --d 2");
  CHECK(k.status == 0);
  CHECK(k.out == "5\n");
  CHECK(run("k-of-s --kind legendre --s 3 --d 2").out == "9\n");
}

TEST_CASE("bounds") {
  const Run lower = run("bounds --mode lower --K 50 --N 1000");
  CHECK(lower.status == 0);
  CHECK(std::stod(lower.out) == doctest::Approx(2.3244668972970776e16).epsilon(1e-12));
  const Run standard = run("bounds --mode standard --driver 100 --N 1000");
  CHECK(std::stod(standard.out) == doctest::Approx(5.2125497728308424e16).epsilon(1e-12));
  const Run csv = run("bounds --mode lower --kind chebyshev --s 8 --d 4 --format csv");
  CHECK(csv.status == 0);
  CHECK(lines(csv.out).size() == 2);
}

TEST_CASE("rip prints one estimate per trial") {
  const Run r = run("rip --kind legendre --d 2 --universe 8 --m 16 --s 3 --mode lower --trials 3");
  CHECK(r.status == 0);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 3);
  for (const auto& line : out) CHECK(std::stod(line) >= 0.0);
  const Run sup = run("rip --d 2 --universe 4 --m 16 --s 2 --supports --format csv");
  CHECK(lines(sup.out)[0] == "seed,support,lambda_min,lambda_max");
}

TEST_CASE("recover a sparse truth") {
  const Run r = run("recover --seed 4 --kind legendre --d 3 --universe 8 --m 80 --truth-sparsity 4 --eta 0");
  CHECK(r.status == 0);
  CHECK(field(r.out, "converged") == "yes");
  CHECK(std::stod(field(r.out, "relative_error")) <= 1e-5);
  const Run csv = run("recover --seed 4 --d 3 --universe 8 --m 80 --truth-sparsity 4 --eta 0 --format csv");
  const auto out = lines(csv.out);
  REQUIRE(out.size() == 2);
  CHECK(out[1].rfind("4,80,38,8,sup_norm,", 0) == 0);
}

TEST_CASE("systems round-trip through files") {
  const fs::path dir = scratch();
  const std::string prefix = (dir / "sys").string();
  const std::string coef = (dir / "coef.csv").string();
  const Run first = run("recover --seed 9 --d 2 --universe 6 --m 30 --truth-sparsity 3 --eta 0 --write-system " +
                        prefix + " --coefficients " + coef);
  CHECK(first.status == 0);
  CHECK(fs::exists(prefix + ".csv"));
  const auto rows = lines(slurp(coef));
  CHECK(rows[0] == "index,value");
  CHECK(rows.size() == 15);
  const Run again = run("recover --system " + prefix);
  CHECK(again.status == 0);
  CHECK(field(again.out, "objective") == field(first.out, "objective"));
}

TEST_CASE("iht with a trace") {
  const Run r = run("iht --seed 4 --d 3 --universe 8 --m 80 --truth-sparsity 4 --eta 0 --sparsity 4 --trace");
  CHECK(r.status == 0);
  const auto out = lines(r.out);
  REQUIRE(out.size() >= 2);
  CHECK(out[0] == "iteration,residual");
  CHECK(out[1].rfind("1,", 0) == 0);
}

TEST_CASE("experiment output is reproducible and honours --out") {
  const fs::path dir = scratch();
  const fs::path config = dir / "config.json";
  {
    std::ofstream cfg(config);
    cfg << R"({"function": "f2_exp_cos", "d": 2, "s": 6, "m": [10], "trials": 2,
              "weight_modes": ["unit", "sup_norm"], "n_test": 500, "eta_mode": "tail_l2"})";
  }
  const std::string base = "experiment --seed 5 --config " + config.string();
  const Run a = run(base + " --threads 1");
  const Run b = run(base + " --threads 2");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(lines(a.out).size() == 3);
  const fs::path out = dir / "conv.csv";
  fs::remove(out);
  CHECK(run(base + " --out " + out.string()).out.empty());
  CHECK(slurp(out) == a.out);
}

TEST_CASE("exit codes") {
  CHECK(run("bounds --mode lower --K 50 --N 1000 --delta 0.2").status == 3);
  CHECK(run("weights --index 1,x").status == 2);
  CHECK(run("enumerate --s 4 --d 2 --bogus").status == 2);
  CHECK(run("").status == 2);
  CHECK(run("weights --kind hermite --index 1").status == 2);
  CHECK(run("experiment --config /nonexistent/config.json").status == 2);
}
