#include "demmel/acceptance.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  int failed = 0;
  demmel::run_acceptance(ids, [&](const demmel::CriterionResult& r) {
    std::cout << demmel::format_line(r) << std::endl;
    if (!r.pass) ++failed;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}
