#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "pomd/rng.hpp"
#include "pomd/tensor.hpp"

using namespace pomd;

TEST_SUITE("tensor_rng") {

TEST_CASE("grids are row-major with contiguous last axis") {
  Tensor3 t(2, 3, 4);
  double fill = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 4; ++k) t(i, j, k) = fill++;

  CHECK(t.data().size() == 24);
  CHECK(t.data()[0] == 0.0);
  CHECK(t.data()[23] == 23.0);
  // row(i, j) aliases the (i, j, .) slice.
  auto row = t.row(1, 2);
  REQUIRE(row.size() == 4);
  CHECK(row[0] == t(1, 2, 0));
  CHECK(row[3] == t(1, 2, 3));
  row[1] = -5.0;
  CHECK(t(1, 2, 1) == -5.0);

  Tensor4 f(2, 2, 2, 3, 1.5);
  CHECK(f.dim3() == 3);
  CHECK(f.row(1, 1, 1).size() == 3);
  CHECK(f(0, 1, 0, 2) == 1.5);
}

TEST_CASE("grid equality is elementwise") {
  Count3 a(2, 2, 2), b(2, 2, 2);
  CHECK(a == b);
  b(1, 0, 1) = 7;
  CHECK_FALSE(a == b);
}

TEST_CASE("same seed reproduces the exact stream") {
  SplitRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("split streams are decorrelated and order-independent") {
  SplitRng root(7);
  SplitRng child_a = root.split(1);
  SplitRng child_b = root.split(2);
  CHECK(child_a.next_u64() != child_b.next_u64());

  // Splitting again with the same stream id gives the same child, regardless
  // of how much the siblings have been consumed.
  SplitRng child_a2 = SplitRng(7).split(1);
  child_a = SplitRng(7).split(1);
  for (int i = 0; i < 10; ++i) CHECK(child_a.next_u64() == child_a2.next_u64());
}

TEST_CASE("uniform01 lies in [0,1) and has the right mean") {
  SplitRng rng(3);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform01();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("uniform_int respects bounds and hits every value") {
  SplitRng rng(11);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const int x = rng.uniform_int(5);
    REQUIRE(x >= 0);
    REQUIRE(x < 5);
    ++hits[x];
  }
  for (int v : hits) CHECK(v > 0);
}

TEST_CASE("sample_discrete follows the distribution") {
  SplitRng rng(5);
  const std::vector<double> degenerate{0.0, 1.0, 0.0};
  for (int i = 0; i < 50; ++i) CHECK(rng.sample_discrete(degenerate) == 1);

  const std::vector<double> skewed{0.8, 0.2};
  int first = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    if (rng.sample_discrete(skewed) == 0) ++first;
  // 3 sigma of Binomial(n, 0.8) is ~0.0085.
  CHECK(std::abs(first / static_cast<double>(n) - 0.8) < 0.012);
}

}  // TEST_SUITE
