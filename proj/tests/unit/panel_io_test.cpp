#include "carefree/panel_io.hpp"

#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

namespace carefree {
namespace {

TEST(PanelCsv, WritesDocumentedSchema) {
  ValueGrid grid(2, 2);
  grid.at(0, 0) = 1.0;
  grid.at(0, 1) = 2.5;
  grid.at(1, 0) = 1.0;
  grid.at(1, 1) = 0.0;
  const EProcessPanel panel(grid, TruthLabels({true, false}));
  std::ostringstream values;
  std::ostringstream truth;
  write_panel_csv(panel, values);
  write_truth_csv(panel.truth(), truth);
  EXPECT_EQ(values.str(), "hypothesis,time,value\n0,0,1\n0,1,2.5\n1,0,1\n1,1,0\n");
  EXPECT_EQ(truth.str(), "hypothesis,is_null\n0,1\n1,0\n");
}

TEST(PanelCsv, RoundTripsRandomPanelsBitExactly) {
  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> draw(0.0, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t k = 1 + rng() % 5;
    const std::size_t cols = 1 + rng() % 20;
    ValueGrid grid(k, cols);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < cols; ++c) grid.at(r, c) = rng() % 7 == 0 ? 0.0 : draw(rng);
    if (trial == 0) grid.at(0, 0) = std::numeric_limits<double>::infinity();
    std::vector<bool> flags(k);
    for (std::size_t r = 0; r < k; ++r) flags[r] = rng() % 2 == 0;
    const EProcessPanel panel(grid, TruthLabels(flags));

    std::stringstream values;
    std::stringstream truth;
    write_panel_csv(panel, values);
    write_truth_csv(panel.truth(), truth);
    const EProcessPanel back = read_panel_csv(values, truth);
    EXPECT_EQ(back.values(), panel.values());
    EXPECT_EQ(back.truth(), panel.truth());
  }
}

TEST(PanelCsv, MalformedInputNamesTheLine) {
  std::istringstream truth("hypothesis,is_null\n0,1\n");
  std::istringstream values("hypothesis,time,value\n0,0,1\n0,1,abc\n");
  try {
    read_panel_csv(values, truth);
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& ex) {
    EXPECT_NE(std::string(ex.what()).find("line 3"), std::string::npos) << ex.what();
  }
}

TEST(PanelCsv, RejectsSparseGridsAndBadHeaders) {
  {
    std::istringstream truth("hypothesis,is_null\n0,1\n1,1\n");
    std::istringstream values("hypothesis,time,value\n0,0,1\n1,1,1\n");
    EXPECT_THROW(read_panel_csv(values, truth), std::runtime_error);
  }
  {
    std::istringstream truth("id,null\n0,1\n");
    std::istringstream values("hypothesis,time,value\n0,0,1\n");
    EXPECT_THROW(read_panel_csv(values, truth), std::runtime_error);
  }
  {
    std::istringstream truth("hypothesis,is_null\n0,maybe\n");
    std::istringstream values("hypothesis,time,value\n0,0,1\n");
    EXPECT_THROW(read_panel_csv(values, truth), std::runtime_error);
  }
}

}  // namespace
}  // namespace carefree
