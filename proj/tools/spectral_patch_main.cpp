#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spectral_patch/cli.hpp"

namespace cli = spectral_patch::cli;

int main(int argc, char** argv) {
  CLI::App app{"Spectral curves, monodromy and similarity classes of polynomial matrices on a patch"};
  cli::Options opts;
  std::string input_path;
  std::size_t rank = 0;

  app.add_option("command", opts.command, "classify | spectral | monodromy | section | sample | roundtrip")
      ->required()
      ->check(CLI::IsMember(cli::commands()));
  app.add_option("--input", input_path, "input JSON file, or - for standard input")->required();
  app.add_option("--bp-index", opts.bp_index, "branch point index for monodromy");
  app.add_option("--rank", rank, "rank of the Hitchin-base point for section");
  app.add_option("--grid-n", opts.region.grid_n, "grid points per axis for sample, in [2, 512]");
  app.add_option("--re-min", opts.region.re_min);
  app.add_option("--re-max", opts.region.re_max);
  app.add_option("--im-min", opts.region.im_min);
  app.add_option("--im-max", opts.region.im_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitMalformedInput;
  }
  if (app.count("--rank") > 0) opts.rank = rank;

  std::string text;
  if (input_path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream file(input_path);
    if (!file) {
      std::cerr << "error: cannot read input file '" << input_path << "'\n";
      return cli::kExitMalformedInput;
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    text = buf.str();
  }

  return cli::run(opts, text, std::cout, std::cerr);
}
