/**
 * Copyright (c) dsaplan contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace dsaplan::cli;

int main(int argc, char **argv) {
  CLI::App app{"dsaplan: offline memory planning from allocation traces"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto *plan_cmd = app.add_subcommand("plan", "solve a trace into an offset plan");
  plan_cmd->add_option("--trace", plan.trace, "allocation trace")->required();
  plan_cmd->add_option("--solver", plan.solver, "bestfit | exact")
      ->check(CLI::IsMember({"bestfit", "exact"}));
  plan_cmd->add_option("--capacity", plan.capacity, "available bytes");
  plan_cmd->add_option("--align", plan.align, "size granularity in bytes")
      ->check(CLI::PositiveNumber);
  plan_cmd->add_option("--time-limit", plan.time_limit,
                       "exact solver limit, e.g. 60s or 500ms");
  plan_cmd->add_option("--out", plan.out, "plan file to write");

  VerifyArgs verify;
  auto *verify_cmd = app.add_subcommand("verify", "check a plan");
  verify_cmd->add_option("--plan", verify.plan, "plan file")->required();
  verify_cmd->add_option("--trace", verify.trace,
                         "trace the plan must describe");
  verify_cmd->add_option("--out", verify.out, "JSON report to write");

  ReplayArgs replay;
  auto *replay_cmd = app.add_subcommand("replay", "replay a trace through the arena");
  replay_cmd->add_option("--trace", replay.trace, "allocation trace")->required();
  replay_cmd->add_option("--plan", replay.plan, "plan file")->required();
  replay_cmd->add_option("--epochs", replay.epochs, "number of passes");
  replay_cmd->add_option("--mode", replay.mode, "strict | lenient")
      ->check(CLI::IsMember({"strict", "lenient"}));
  replay_cmd->add_option("--out", replay.out, "JSON report to write");
  replay_cmd->add_flag("--addresses", replay.addresses,
                       "include served addresses in the report");

  RenderArgs render;
  auto *render_cmd = app.add_subcommand("render", "draw a plan as SVG");
  render_cmd->add_option("--plan", render.plan, "plan file")->required();
  render_cmd->add_option("--trace", render.trace, "trace the plan must describe");
  render_cmd->add_option("--out", render.out, "SVG file to write")->required();

  GenArgs gen;
  auto *gen_cmd = app.add_subcommand("gen", "generate a synthetic trace");
  gen_cmd->add_option("--model", gen.model, "cnn | rnn")
      ->check(CLI::IsMember({"cnn", "rnn"}));
  gen_cmd->add_option("--layers", gen.spec.layers)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--batch", gen.spec.batch)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.spec.seed);
  gen_cmd->add_option("--epochs", gen.spec.epochs, "rnn passes")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--min-len", gen.min_len, "rnn minimum sequence length");
  gen_cmd->add_option("--max-len", gen.max_len, "rnn maximum sequence length");
  bool no_workspace = false;
  gen_cmd->add_flag("--no-workspace", no_workspace, "cnn without workspaces");
  gen_cmd->add_flag("--untimed", gen.spec.untimed,
                    "rnn interrupted decode region");
  gen_cmd->add_option("--out", gen.out, "trace file (default stdout)");

  BenchArgs bench;
  auto *bench_cmd = app.add_subcommand("bench", "time the best-fit solver");
  bench_cmd->add_option("--sizes", bench.sizes, "block counts")->delimiter(',');
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--repeats", bench.repeats)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*plan_cmd) return cmd_plan(plan, std::cout, std::cerr);
  if (*verify_cmd) return cmd_verify(verify, std::cout, std::cerr);
  if (*replay_cmd) return cmd_replay(replay, std::cout, std::cerr);
  if (*render_cmd) return cmd_render(render, std::cout, std::cerr);
  if (*gen_cmd) {
    gen.spec.workspace = !no_workspace;
    return cmd_gen(gen, std::cout, std::cerr);
  }
  if (*bench_cmd) return cmd_bench(bench, std::cout, std::cerr);
  return kUsage;
}
