// Writes a planted-keyword synthetic corpus as native JSON lines. The gold
// response's topic word is hidden in two nonadjacent context utterances, so
// the dataset rewards graph reasoning; see harness::make_synthetic.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "grn/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a planted-keyword synthetic dialogue corpus"};
  grn::harness::SyntheticSpec spec;
  std::string out_path;
  app.add_option("--out", out_path, "output path (JSON lines)")->required();
  app.add_option("--dialogues", spec.dialogues, "number of dialogues");
  app.add_option("--min-turns", spec.min_turns, "minimum context utterances (>= 4)");
  app.add_option("--max-turns", spec.max_turns, "maximum context utterances");
  app.add_option("--seed", spec.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    const auto dialogues = grn::harness::make_synthetic(spec);
    grn::harness::write_native_jsonl(out_path, dialogues);
    std::printf("wrote %d dialogues to %s\n", static_cast<int>(dialogues.size()),
                out_path.c_str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
