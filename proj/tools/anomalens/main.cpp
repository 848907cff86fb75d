#include <CLI11.hpp>

#include <iostream>

#include "anomalens/error.hpp"
#include "common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"anomalens: autoencoder anomaly detection with sparse contribution degrees"};
  app.require_subcommand(1);
  app.fallthrough(false);

  anomalens::cli::register_model_commands(app);
  anomalens::cli::register_eval_commands(app);
  anomalens::cli::register_data_commands(app);
  anomalens::cli::register_experiment_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const anomalens::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
