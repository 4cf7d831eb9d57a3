#include <cstdlib>
#include <iostream>

#include "udnmob/acceptance.hpp"

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  const auto results = udnmob::run_acceptance(filter, 0, &std::cout);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return results.empty() ? 1 : (failed == 0 ? 0 : 2);
}
