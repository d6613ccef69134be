#include "mfvol/cli.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfvol/error.hpp"
#include "mfvol/pipeline.hpp"

namespace mfvol::cli {

namespace {

namespace pl = pipeline;
namespace ev = evaluation;

void print_report(const std::vector<ev::ReportRow>& rows) {
  std::cout << "model,group,n,mse,hmse,mae,mape,qlike,r2log\n";
  for (const auto& r : rows) {
    std::cout << r.model << ',' << r.group << ',' << r.n << ',' << r.mse << ',' << r.hmse << ','
              << r.mae << ',' << r.mape << ',' << r.qlike << ',' << r.r2log << '\n';
    if (r.excluded > 0)
      std::cerr << r.model << ' ' << r.group << ": excluded " << r.excluded << " pairs with rv <= 0\n";
  }
  std::cout << '\n' << ev::formula_notes();
}

int dispatch(const std::string& command, const pl::RunConfig& cfg) {
  if (command == "simulate") {
    const auto sc = pl::run_simulate(cfg);
    std::cout << "wrote " << sc.daily.size() << " trading days, " << sc.monthly.size()
              << " months to " << cfg.out_dir.string() << '\n';
  } else if (command == "rv") {
    const auto rv = pl::run_rv(cfg);
    std::cout << "rv: " << rv.dates.size() << " days, lambda " << rv.lambda << " (from "
              << rv.lambda_days << " days)";
    if (rv.incomplete_days() > 0) std::cout << ", " << rv.incomplete_days() << " partial days";
    std::cout << '\n';
  } else if (command == "pca") {
    const auto fp = pl::run_pca(cfg);
    for (const auto& m : fp.models) {
      std::cout << m.group << ":";
      for (Eigen::Index j = 0; j < m.variances.size(); ++j) std::cout << ' ' << m.contributions(j);
      std::cout << '\n';
    }
  } else if (command == "midas-fit") {
    const auto fit = pl::run_midas_fit(cfg);
    const auto names = garch_midas::parameter_names(fit.spec);
    const auto values = garch_midas::parameter_values(fit.spec, fit.params);
    for (std::size_t i = 0; i < names.size(); ++i) std::cout << names[i] << " = " << values[i] << '\n';
    std::cout << "loglik = " << fit.loglik << '\n';
  } else if (command == "train") {
    const auto m = pl::run_train(cfg);
    std::cout << "trained " << ev::group_name(m.group) << " for " << m.result.epochs_run
              << " epochs, final loss " << m.result.loss_history.back() << '\n';
  } else if (command == "predict") {
    const auto p = pl::run_predict(cfg);
    std::cout << "wrote " << p.dates.size() << " predictions\n";
  } else if (command == "evaluate") {
    print_report(pl::run_evaluate(cfg));
  } else if (command == "ablate") {
    print_report(pl::run_ablate(cfg));
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Mixed-frequency stock volatility toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::map<std::string, std::string> flags;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "flat key = value settings file");

  // Every setting is also a flag; flags win over the file, the file over defaults.
  for (const auto& key : pl::RunConfig::keys()) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    app.add_option_function<std::string>(
        flag, [&flags, key](const std::string& v) { flags[key] = v; }, "setting '" + key + "'");
  }
  app.add_option("--set", overrides, "key=value override, repeatable");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "write a synthetic scenario (intraday, daily, monthly, attention, truth.json)"},
      {"rv", "daily returns and realized variance from intraday bars"},
      {"pca", "factor scores for the macro, technical and attention groups"},
      {"midas-fit", "estimate GARCH-MIDAS on the macro factors and write h.csv"},
      {"train", "train the transformer regressor on the training span"},
      {"predict", "predict next-day RV over the test span"},
      {"evaluate", "score pred.csv and write report.csv"},
      {"ablate", "train and score indicator groups G1-G4"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    pl::RunConfig cfg;
    if (config_path) cfg.load_file(*config_path);
    for (const auto& [k, v] : flags) cfg.set(k, v);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) fail(Errc::BadParameter, "--set expects key=value, got '" + o + "'");
      cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
    return dispatch(app.get_subcommands().front()->get_name(), cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mfvol::cli
