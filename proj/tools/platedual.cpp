#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "plate/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Clamped von Karman plate solver and duality verifier"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string output_root;
  if (const char* env = std::getenv("PLATEDUAL_OUTPUT_ROOT"))
    output_root = env;
  app.add_option("--output-root", output_root,
                 "Directory that output folders are placed under "
                 "(overrides PLATEDUAL_OUTPUT_ROOT)");

  std::string run_cfg;
  CLI::App* run = app.add_subcommand(
      "run", "Solve a scenario and verify the duality principles");
  run->add_option("config", run_cfg, "Configuration file")->required();

  std::string gc_cfg;
  bool corrupt = false;
  CLI::App* gc = app.add_subcommand(
      "gradcheck", "Finite-difference validation of gradient and Hessian");
  gc->add_option("config", gc_cfg, "Configuration file")->required();
  gc->add_flag("--self-test-corrupt", corrupt,
               "Inject an error into the gradient; the check must fail");

  std::string sw_cfg, sw_param;
  CLI::App* sw = app.add_subcommand(
      "sweep", "Re-run the pipeline across a parameter list");
  sw->add_option("config", sw_cfg, "Configuration file")->required();
  sw->add_option("--param", sw_param, "epsilon | K | load_scale | grid")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return plate::pipeline::run(run_cfg, output_root);
  if (gc->parsed()) return plate::pipeline::gradcheck(gc_cfg, corrupt);
  if (sw->parsed())
    return plate::pipeline::sweep(sw_cfg, sw_param, output_root);
  return 1;
}
