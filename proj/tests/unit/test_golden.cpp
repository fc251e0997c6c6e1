#include <gtest/gtest.h>

#include "golden.hpp"

namespace {

using iodnet::testkit::golden_rules;
using iodnet::testkit::run_golden;

class RuleGolden : public ::testing::TestWithParam<std::string> {};

TEST_P(RuleGolden, MatchesHandCheckedNet) {
  const auto outcome = run_golden(std::filesystem::path(IODNET_SOURCE_DIR) / "tests" / "golden", GetParam());
  EXPECT_TRUE(outcome.matches) << outcome.detail;
  EXPECT_TRUE(outcome.rule_traced) << "rule " << GetParam() << " not applied";
  EXPECT_LT(outcome.milliseconds, 10.0);
}

std::string case_name(const ::testing::TestParamInfo<std::string>& info) {
  std::string s = info.param;
  for (auto& c : s)
    if (c == '.') c = '_';
  return s;
}

INSTANTIATE_TEST_SUITE_P(Rules, RuleGolden, ::testing::ValuesIn(golden_rules()), case_name);

} // namespace
