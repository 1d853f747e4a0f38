#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ideaforge/error.hpp"
#include "ideaforge/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
namespace pl = ideaforge::pipeline;

struct Args {
  std::string config;
  std::string out;
  bool force = false;
};

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "Run configuration (JSON)")->required();
  cmd->add_flag("--force", args.force, "Rerun even when inputs are unchanged");
  cmd->add_option("--out", args.out, "Output directory (overrides IDEAFORGE_OUT and output_dir)");
}

int run(const std::string& command, const Args& args) {
  const pl::RunConfig cfg = pl::RunConfig::load(args.config);
  const fs::path out =
      pl::resolve_output_dir(cfg, args.out.empty() ? std::nullopt : std::optional<fs::path>(args.out));
  const pl::OutputLock lock(out);
  pl::Pipeline pipeline(cfg, out);
  if (command == "run") {
    pipeline.run_all(args.force);
  } else {
    pipeline.run_stage(*pl::parse_stage(command), args.force);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ideaforge: idea mining over dated document collections"};
  app.set_version_flag("--version", IDEAFORGE_VERSION);
  app.require_subcommand(1, 1);
  Args args;
  std::string command;
  for (pl::Stage s : pl::all_stages()) {
    auto* cmd = app.add_subcommand(pl::stage_name(s), std::string("Run the ") + pl::stage_name(s) + " stage");
    add_common(cmd, args);
    cmd->callback([&command, s] { command = pl::stage_name(s); });
  }
  auto* all = app.add_subcommand("run", "Run every enabled stage in order");
  add_common(all, args);
  all->callback([&command] { command = "run"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ideaforge::ExitCode::kUsage);
  }

  try {
    return run(command, args);
  } catch (const ideaforge::Error& e) {
    std::fprintf(stderr, "ideaforge: error: %s\n", e.what());
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "ideaforge: error: %s\n", e.what());
    return static_cast<int>(ideaforge::ExitCode::kData);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ideaforge: internal error: %s\n", e.what());
    return static_cast<int>(ideaforge::ExitCode::kInternal);
  }
}
