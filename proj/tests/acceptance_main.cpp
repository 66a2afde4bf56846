#include <cstdio>
#include <cstring>

#include "fairdiv/acceptance.hpp"

// Release gate: every quantitative reproduction row must pass. Prints one
// line per row so a failing run names the broken target directly.
int main(int argc, char** argv) {
  fairdiv::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) opts.quick = true;
  }
  auto rows = fairdiv::run_acceptance(opts);
  std::size_t passed = 0;
  for (const auto& r : rows) {
    std::printf("%s  %2d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str());
    if (r.pass) ++passed;
  }
  std::printf("%zu/%zu rows passed\n", passed, rows.size());
  return passed == rows.size() ? 0 : 1;
}
