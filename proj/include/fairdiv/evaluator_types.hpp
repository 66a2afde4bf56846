#pragma once

#include <string>
#include <vector>

namespace fairdiv {

struct Menu {
  std::vector<std::vector<double>> bundles;
  std::vector<std::string> labels;

  int n_goods() const {
    return bundles.empty() ? 0 : static_cast<int>(bundles.front().size());
  }
};

}  // namespace fairdiv
