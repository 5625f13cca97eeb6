#include "prolong/cli.hpp"

#include <CLI11.hpp>

#include <string>

int main(int argc, char** argv) {
  CLI::App app{"prolong: first-order closed systems for tracefree-Hessian-type equations "
               "on Riemannian charts -- algebra tables, parallel transport, and "
               "independent verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "path to the run configuration JSON")
        ->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    return sub;
  };

  add("algebra", "graded algebra and module tables, Hodge decomposition, dimension audit");
  add("prolong", "closed-system transport: solution space, holonomy, residual tables");
  add("oracle", "polynomial collocation nullspace of the equivalent higher-order operator");
  add("verify", "compare a prior prolong run against the oracle and rescaling checks");

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  return prolong::run_command(command, config_path, out_dir);
}
