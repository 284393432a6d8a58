#pragma once

#include <functional>
#include <utility>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include "common.hpp"

namespace iceseg::cli {

/// A parsed subcommand and the action that runs it.
using Handler = std::pair<CLI::App*, std::function<void()>>;

void register_data_commands(CLI::App& app, const Globals& globals, std::vector<Handler>& out);
void register_eval_commands(CLI::App& app, const Globals& globals, std::vector<Handler>& out);
void register_model_commands(CLI::App& app, const Globals& globals, std::vector<Handler>& out);

}  // namespace iceseg::cli
