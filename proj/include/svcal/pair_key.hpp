#pragma once

#include <compare>
#include <string>

namespace svcal {

// A case-alleged-article pair; every join in the toolkit is keyed on it.
struct PairKey {
  std::string case_id;
  int article = 0;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;

  std::string str() const { return case_id + "/Art." + std::to_string(article); }
};

}  // namespace svcal
