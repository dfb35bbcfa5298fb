#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "tcdiff/rng.hpp"

using namespace tcdiff;

TEST_SUITE("rng") {

TEST_CASE("same seed reproduces the sequence") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(42), d(43);
  bool differ = false;
  for (int i = 0; i < 10; ++i) differ |= c.next_u64() != d.next_u64();
  CHECK(differ);
}

TEST_CASE("fork depends on the construction seed, not on draw position") {
  RngStream a(7);
  RngStream b(7);
  (void)b.normal();
  (void)b.next_u64();
  (void)b.uniform();
  CHECK(a.fork(3).next_u64() == b.fork(3).next_u64());
  CHECK(a.fork(3).next_u64() != a.fork(4).next_u64());
  CHECK(a.fork(1, 2).next_u64() == a.fork(1).fork(2).next_u64());
}

TEST_CASE("forked children are pairwise distinct") {
  RngStream root(123);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 200; ++i) firsts.insert(root.fork(i).next_u64());
  CHECK(firsts.size() == 200);
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
  RngStream s(5);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
  const double v = s.uniform(2.0, 6.0);
  CHECK(v >= 2.0);
  CHECK(v < 6.0);
}

TEST_CASE("normal moments") {
  RngStream s(11);
  const int n = 50000;
  double sum = 0.0, sumsq = 0.0, sumcube = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sumsq += x * x;
    sumcube += x * x * x;
  }
  // 4 sigma tolerances for the standardized moment estimators
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(sumsq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sumcube / n) < 4.0 * std::sqrt(15.0 / n));
}

TEST_CASE("uniform_index bounds and coverage") {
  RngStream s(17);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t k = s.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(c > 700);  // each bin near 1000
  CHECK(s.uniform_index(1) == 0);
}

TEST_CASE("pinned draws stay stable across platforms") {
  // frozen outputs of the reference implementation; a change here breaks
  // every seeded test and stored sample set in the project
  RngStream s(2024);
  CHECK(s.next_u64() == 9674054429496410833ull);
  CHECK(s.next_u64() == 5440047934801865465ull);
  RngStream t(2024);
  CHECK(t.uniform() == doctest::Approx(0.52443154146015125).epsilon(1e-15));
  RngStream u(2024);
  CHECK(u.normal() == doctest::Approx(-0.31633387091610565).epsilon(1e-12));
  CHECK(u.normal() == doctest::Approx(1.0912440810790689).epsilon(1e-12));
}

}  // TEST_SUITE
