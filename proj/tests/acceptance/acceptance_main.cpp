#include <cstdio>
#include <cstring>
#include <string>

#include "criteria.hpp"

namespace {

int usage(const char* argv0) {
  std::fprintf(stderr,
               "usage: %s [--criterion N] [--slow] [--mnist DIR]\n"
               "  --criterion N   run a single criterion (1..%d); default all\n"
               "  --slow          enable the long-running image criterion\n"
               "  --mnist DIR     directory with the IDX image files\n",
               argv0, tcdiff::accept::criterion_count());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  tcdiff::accept::AcceptOptions opts;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > tcdiff::accept::criterion_count())
        return usage(argv[0]);
    } else if (!std::strcmp(argv[i], "--slow")) {
      opts.slow = true;
    } else if (!std::strcmp(argv[i], "--mnist") && i + 1 < argc) {
      opts.mnist_dir = argv[++i];
    } else if (!std::strcmp(argv[i], "--all")) {
      only = 0;
    } else {
      return usage(argv[0]);
    }
  }

  int failures = 0;
  auto report = [&](const tcdiff::accept::CriterionResult& r) {
    std::printf("%s\n", tcdiff::accept::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.pass && !r.skipped) ++failures;
  };
  if (only) {
    report(tcdiff::accept::run_criterion(only, opts));
  } else {
    for (int id = 1; id <= tcdiff::accept::criterion_count(); ++id)
      report(tcdiff::accept::run_criterion(id, opts));
  }
  return failures == 0 ? 0 : 1;
}
