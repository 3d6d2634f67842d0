#include <iostream>

#include <CLI11.hpp>

#include "multsys/cli.hpp"

namespace {

void common_options(CLI::App* sub, multsys::cli::RunConfig& c) {
  sub->add_option("--out", c.out, "Report path (stdout when omitted)");
  sub->add_option("--csv", c.csv, "CSV export path");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--no-meta", c.no_meta, "Omit the timestamped meta block");
  sub->add_option("--rel-tol", c.rel_tol, "Relative tolerance for floating comparisons");
  sub->add_option("--abs-tol", c.abs_tol, "Absolute tolerance for tail comparisons");
}

}  // namespace

int main(int argc, char** argv) {
  multsys::cli::RunConfig c;
  CLI::App app{"Exact checks for multiplicative systems of step functions"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Moment table and multiplicative error");
  analyze->add_option("--system", c.system, "Builtin name or system JSON")->required();
  analyze->add_option("--family", c.family, "l=k, full, or a JSON list of index lists");

  auto* reduce = app.add_subcommand("reduce", "Reduce to an independent system and check domination");
  reduce->add_option("--system", c.system)->required();
  reduce->add_option("--family", c.family);
  reduce->add_option("--coeffs", c.coeffs, "Comma-separated rationals")->delimiter(',');
  reduce->add_option("--phi", c.phis, "power:p, exp:g, hinge:x or abs");

  auto* khin = app.add_subcommand("khintchine", "Khintchin-type norm bound");
  khin->add_option("--system", c.system)->required();
  khin->add_option("--coeffs", c.coeffs, "Comma-separated rationals or a JSON list file")->delimiter(',');
  khin->add_option("--p", c.p)->required();
  khin->add_option("--mode", c.mode, "general or even")->check(CLI::IsMember({"general", "even"}));
  bool even_mode = false;
  khin->add_flag("--even-mode", even_mode, "Same as --mode even");

  auto* tail = app.add_subcommand("tail", "Hoeffding-type tail bound");
  tail->add_option("--system", c.system)->required();
  tail->add_option("--family", c.family);
  tail->add_option("--lambda", c.lambdas, "Levels (rationals)")->required()->delimiter(',');

  auto* lac = app.add_subcommand("lacunary", "Lacunary trigonometric systems");
  lac->add_option("--rule", c.rule, "geometric:<lambda>:<tau1> or explicit:<t1>,<t2>,...")->required();
  lac->add_option("--lambda-claim", c.lambda_claim, "Claimed lacunarity for explicit rules");
  lac->add_option("--n", c.n);
  lac->add_option("--nu-max", c.nu_max);

  auto* sel = app.add_subcommand("select", "Greedy quasi-multiplicative subsequence");
  sel->add_option("--system", c.system)->required();
  sel->add_option("--rho", c.rho);
  sel->add_option("--steps", c.steps);

  auto* rub = app.add_subcommand("rubinshtein", "Dyadic dilates of a reflection-symmetric generator");
  rub->add_option("--f", c.f, "Step function JSON on [0,1/4)")->required();
  rub->add_option("--n", c.n)->required();
  rub->add_option("--l", c.l);
  rub->add_option("--phi", c.phis);
  rub->add_option("--lambda", c.lambdas)->delimiter(',');

  for (auto* sub : {analyze, reduce, khin, tail, lac, sel, rub}) common_options(sub, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (even_mode) c.mode = "even";
  return multsys::cli::run(c, std::cout, std::cerr);
}
