#include "lapf/cli.hpp"

#include <doctest.h>

#include "support.hpp"

#include <sstream>
#include <vector>

using lapf::testing::slurp;
using lapf::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "lapf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = lapf::cli::main(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

// A small corpus and a briefly trained classifier, shared by the tests below.
struct Fixture {
  TempDir dir{"cli"};
  std::string corpus = (dir / "corpus.csv").string();
  std::string classifier = (dir / "classifier.model").string();

  Fixture() {
    REQUIRE(run({"gen-corpus", "--out", corpus, "--seed", "3", "--texts-per-level", "6"}).code == 0);
    REQUIRE(run({"train-classifier", "--corpus", corpus, "-o", classifier, "--epochs", "2", "--lr", "1e-3"}).code == 0);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("usage errors exit with 2 and help with 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"run", "--mode", "kalman"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"run", "--help"}).code == 0);
}

TEST_CASE("gen-corpus is reproducible") {
  TempDir dir("gen");
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  const auto r = run({"gen-corpus", "--out", a, "--seed", "9", "--texts-per-level", "4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("train") != std::string::npos);
  CHECK(run({"gen-corpus", "--out", b, "--seed", "9", "--texts-per-level", "4"}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(count_lines(slurp(a)) == 1 + 51 * 4);
}

TEST_CASE("gen-corpus rejects fractions that do not sum to one") {
  TempDir dir("frac");
  const auto r = run({"gen-corpus", "--out", (dir / "c.csv").string(), "--fractions", "0.5,0.5,0.5"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("lapf: ", 0) == 0);
}

TEST_CASE("training without a corpus is a configuration error") {
  TempDir dir("nocorpus");
  CHECK(run({"train-classifier", "--corpus", (dir / "none.csv").string(), "-o", (dir / "m").string()}).code == 2);
  CHECK(run({"train-regressor", "--corpus", (dir / "none.csv").string(), "-o", (dir / "m").string()}).code == 2);
}

TEST_CASE("training writes the model and a loss curve") {
  auto& f = fixture();
  CHECK(std::filesystem::exists(f.classifier));
  const auto loss = slurp(f.classifier + ".loss.csv");
  CHECK(count_lines(loss) == 3);
  CHECK(slurp(f.classifier).rfind("lapf-mlp 1\n", 0) == 0);
}

TEST_CASE("lapf run without a classifier exits with 2") {
  auto& f = fixture();
  TempDir dir("noclf");
  const auto r = run({"run", "--mode", "lapf", "--corpus", f.corpus, "--classifier", (dir / "none.model").string(),
                      "--trials", "1", "-o", dir.path().string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("classifier") != std::string::npos);
}

TEST_CASE("run writes outputs and report merges them") {
  auto& f = fixture();
  TempDir dir("run");
  const std::vector<std::string> common = {"--corpus", f.corpus, "--classifier", f.classifier, "--trials", "2",
                                           "--steps", "5", "--particles", "30", "-o", dir.path().string()};
  auto args = [&](std::vector<std::string> head) {
    head.insert(head.end(), common.begin(), common.end());
    return head;
  };
  const auto base = run(args({"run", "--mode", "baseline"}));
  REQUIRE(base.code == 0);
  CHECK(base.out.find("method = baseline") != std::string::npos);
  REQUIRE(run(args({"run", "--mode", "lapf", "--ood"})).code == 0);
  CHECK(std::filesystem::exists(dir / "lapf_ood_trajectory.csv"));
  CHECK(count_lines(slurp(dir / "lapf_ood_trajectory.csv")) == 1 + 2 * 5);
  CHECK(slurp(dir / "lapf_ood_summary.txt").find("trials = 2") != std::string::npos);

  const auto rep = run({"report", (dir / "lapf_ood_metrics.csv").string(), (dir / "baseline_metrics.csv").string()});
  REQUIRE(rep.code == 0);
  CHECK(count_lines(rep.out) == 13);
  CHECK(rep.out.find("1,baseline,") < rep.out.find("1,lapf_ood,"));
  CHECK(run({"report", (dir / "nothing.csv").string()}).code == 2);
}

TEST_CASE("run output is byte-identical across invocations") {
  auto& f = fixture();
  TempDir a("repa"), b("repb");
  for (const auto* d : {&a, &b})
    REQUIRE(run({"run", "--mode", "lapf", "--corpus", f.corpus, "--classifier", f.classifier, "--trials", "3",
                 "--steps", "8", "--particles", "40", "--workers", "2", "-o", d->path().string()})
                .code == 0);
  CHECK(slurp(a / "lapf_trajectory.csv") == slurp(b / "lapf_trajectory.csv"));
  CHECK(slurp(a / "lapf_metrics.csv") == slurp(b / "lapf_metrics.csv"));
}

TEST_CASE("config file and overrides") {
  TempDir dir("cfg");
  std::ofstream(dir / "x.cfg") << "trials = 1\nsteps = 3\nparticles = 5\n";
  const auto r = run({"run", "--mode", "baseline", "-c", (dir / "x.cfg").string(), "--set", "trials=2", "--corpus",
                      fixture().corpus, "-o", dir.path().string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("trials = 2") != std::string::npos);
  CHECK(run({"run", "--mode", "baseline", "--set", "colour=red"}).code == 2);
  CHECK(run({"run", "--mode", "baseline", "--set", "noequals"}).code == 2);
}

TEST_CASE("interactive mode") {
  auto& f = fixture();
  const std::vector<std::string> args = {"interactive", "--classifier", f.classifier, "--particles", "100"};
  const auto empty = run(args, "");
  CHECK(empty.code == 0);
  CHECK(count_lines(empty.out) == 1);
  CHECK(empty.out.rfind("step 0 estimate ", 0) == 0);

  const auto one = run(args, "The canal is nearly dry\n");
  CHECK(count_lines(one.out) == 2);
  CHECK(one.out.find("step 1 estimate ") != std::string::npos);
  CHECK(one.out.find("p(q|s) ") != std::string::npos);

  const std::string script = "water is low\n\nthe gate is flooding\nlevel looks normal\nbarely a trickle\nfull\n";
  const auto first = run(args, script);
  const auto second = run(args, script);
  CHECK(first.out == second.out);
  CHECK(count_lines(first.out) == 6);

  CHECK(run({"interactive", "--classifier", (f.dir / "none.model").string()}).code == 2);
}
