#include <CLI11.hpp>

#include <iostream>

#include "isobranch/config.hpp"
#include "isobranch/run.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"Numerical continuation for incompressible nonlinear elastostatics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run the study described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("-o,--output", out_dir, "output directory, replacing [output] directory");
  run->add_flag("-q,--quiet", quiet, "no progress lines");

  std::string csv_path;
  auto* summarize = app.add_subcommand("summarize", "report on a branch CSV");
  summarize->add_option("csv", csv_path, "branch CSV")->required();

  auto* schema = app.add_subcommand("schema", "print the config schema as markdown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*run) {
    isobranch::RunOptions options;
    options.output_directory = out_dir;
    options.log = quiet ? nullptr : &std::cerr;
    return isobranch::run(config_path, options);
  }
  if (*summarize)
    return isobranch::summarize(csv_path, std::cout);
  if (*schema)
    std::cout << isobranch::schema_markdown();
  return 0;
}
