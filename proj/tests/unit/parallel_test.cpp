#include "carefree/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace carefree {
namespace {

TEST(ResolveThreads, ExplicitRequestWins) {
  ::setenv(kThreadsEnvVar, "3", 1);
  EXPECT_EQ(resolve_threads(5), 5U);
  ::unsetenv(kThreadsEnvVar);
}

TEST(ResolveThreads, EnvironmentVariableIsNext) {
  ::setenv(kThreadsEnvVar, "3", 1);
  EXPECT_EQ(resolve_threads(0), 3U);
  ::setenv(kThreadsEnvVar, "not-a-number", 1);
  EXPECT_GE(resolve_threads(0), 1U);
  ::unsetenv(kThreadsEnvVar);
  EXPECT_GE(resolve_threads(0), 1U);
}

TEST(ParallelForBlocks, VisitsEveryBlockOnce) {
  for (const unsigned threads : {1U, 2U, 7U}) {
    std::vector<std::atomic<int>> hits(103);
    parallel_for_blocks(hits.size(), threads, [&](std::size_t b) { hits[b].fetch_add(1); });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelForBlocks, EmptyRangeIsANoOp) {
  bool called = false;
  parallel_for_blocks(0, 4, [&](std::size_t) { called = true; });
  EXPECT_FALSE(called);
}

TEST(ParallelForBlocks, RethrowsWorkerException) {
  for (const unsigned threads : {1U, 4U}) {
    EXPECT_THROW(parallel_for_blocks(50, threads,
                                     [](std::size_t b) {
                                       if (b == 17) throw std::runtime_error("block 17");
                                     }),
                 std::runtime_error);
  }
}

}  // namespace
}  // namespace carefree
