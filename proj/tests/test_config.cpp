#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "fpois/config.hpp"

using namespace fpois;

namespace {

RunConfig parse(const std::string& text) {
  std::stringstream ss(text);
  return parse_config(ss, "test");
}

}  // namespace

TEST_CASE("full study config parses") {
  const auto rc = parse(
      "# comment\n"
      "study = convergence\n"
      "k = 2\n"
      "h = 0.75,0.6\n"
      "resolutions = 4,8,16\n"
      "reference = 64\n"
      "replicates = 10\n"
      "seed = 99\n"
      "f1 = tanh\n"
      "f1_bound = 2.0\n"
      "f1_slope = 0.5\n"
      "f2 = linear\n"
      "f2_lipschitz = 0.25\n"
      "g = sinpi\n"
      "scheme = plain\n"
      "tol = 1e-9\n"
      "workers = 3\n"
      "slope_target = -0.4\n"
      "out = /tmp/x\n");
  CHECK(rc.study.kind == StudyKind::convergence);
  CHECK(rc.study.k == 2);
  CHECK(rc.study.h == std::vector<double>{0.75, 0.6});
  CHECK(rc.study.resolutions == std::vector<int>{4, 8, 16});
  CHECK(rc.study.reference_resolution == 64);
  CHECK(rc.study.replicates == 10);
  CHECK(rc.study.seed == 99);
  CHECK(rc.study.f.bound_m() == 2.0);
  CHECK(rc.study.f.lipschitz_l() == 0.25);
  CHECK(rc.study.tol == 1e-9);
  CHECK(rc.study.workers == 3);
  CHECK(rc.study.has_slope_target);
  CHECK(rc.study.slope_target == -0.4);
  CHECK(rc.out_dir == "/tmp/x");
  CHECK_NOTHROW(rc.study.validate());
}

TEST_CASE("single h broadcasts over k") {
  const auto rc = parse("k = 3\nh = 0.6\n");
  CHECK(rc.study.h == std::vector<double>{0.6, 0.6, 0.6});
}

TEST_CASE("unknown keys are rejected with line context") {
  try {
    parse("h = 0.75\nbogus_key = 1\n");
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("test:2") != std::string::npos);
    CHECK(msg.find("bogus_key") != std::string::npos);
  }
}

TEST_CASE("malformed lines and duplicates are rejected") {
  CHECK_THROWS_AS(parse("h 0.75\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("h = 0.75\nh = 0.6\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("h = abc\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("h = 0.75\nstudy = sideways\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("h = 0.75\nf1 = cubic\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse(""), std::invalid_argument);  // h is required
}

TEST_CASE("replicates = 0 fails validation downstream") {
  auto rc = parse(
      "study = convergence\nk = 1\nh = 0.75\nresolutions = 4,8,16\n"
      "reference = 64\nreplicates = 0\n");
  CHECK_THROWS_AS(rc.study.validate(), std::invalid_argument);
}

TEST_CASE("sample/solve keys") {
  const auto rc = parse("h = 0.75\nn = 32\nstream = 7\nseed = 5\n");
  CHECK(rc.n_single == 32);
  CHECK(rc.stream_id == 7);
  CHECK(rc.study.seed == 5);
}

TEST_CASE("mu accepts 'auto'") {
  const auto rc = parse("h = 0.8,0.8,0.8,0.8\nk = 4\nscheme = smoothed\nmu = auto\n");
  CHECK(rc.study.mu == 0.0);
  CHECK(rc.study.resolved_mu() == doctest::Approx(0.49));
}
