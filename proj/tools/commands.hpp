#pragma once

#include "cli_support.hpp"

#include <CLI11.hpp>

#include <functional>

namespace rlcli {

using Action = std::function<void(Context&)>;

// Registers the experiment subcommands; parsing one stores its action in `selected`.
void add_commands(CLI::App& app, Action& selected);

}  // namespace rlcli
