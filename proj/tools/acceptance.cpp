#include <cstdio>
#include <fstream>

#include <CLI11.hpp>

#include "ncsched/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one pass/fail line each"};
  std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string json_out;
  app.add_option("--only", ids, "criteria to run")->delimiter(',');
  app.add_option("--json", json_out, "write full results here");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  ncsched::Json all = ncsched::Json::array();
  for (int id : ids) {
    ncsched::CheckResult r;
    try {
      r = ncsched::run_acceptance({id}).front();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion";
      r.summary = std::string("error: ") + e.what();
    }
    std::printf("%s\n", ncsched::format_line(r).c_str());
    for (const auto& f : r.findings) std::printf("    finding: %s\n", f.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
    all.push_back(ncsched::to_json(r));
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  if (!json_out.empty()) std::ofstream(json_out) << all.dump(2) << '\n';
  return failed == 0 ? 0 : 1;
}
