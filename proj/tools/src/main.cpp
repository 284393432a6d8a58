#include <exception>
#include <iostream>

#include "commands.hpp"
#include "iceseg/error.hpp"

int main(int argc, char** argv) {
  using namespace iceseg::cli;

  CLI::App app{"ice-seg: patch-based river ice segmentation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ice-seg 0.1.0");

  Globals globals;
  app.add_option("--seed", globals.seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--encoding", globals.encoding,
                 "Mask gray values, 'default' or e.g. water=0,anchor=128,frazil=255,void=64")
      ->capture_default_str();
  app.add_option("--jobs", globals.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  std::vector<Handler> handlers;
  register_data_commands(app, globals, handlers);
  register_eval_commands(app, globals, handlers);
  register_model_commands(app, globals, handlers);
  for (auto& [sub, fn] : handlers) sub->fallthrough();
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    globals.mask_encoding();  // reject a bad --encoding before any work
    for (auto& [sub, fn] : handlers) {
      if (sub->parsed()) {
        fn();
        return 0;
      }
    }
    std::cerr << "ice-seg: no command given\n";
    return 1;
  } catch (const iceseg::InvalidArgument& e) {
    std::cerr << "ice-seg: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ice-seg: error: " << e.what() << '\n';
    return 2;
  }
}
