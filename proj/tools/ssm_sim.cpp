// ssm_sim: SNR sweeps and beta profiles of the average secrecy rate.
//
// Exit codes: 0 success, 2 usage/config error, 3 I/O error,
// 4 numeric-failure budget exceeded.

#include <cstdio>
#include <exception>
#include <iostream>

#include "ssm/cli_spec.hpp"
#include "ssm/experiment.hpp"

namespace {

int run(const ssm::ExperimentSpec& spec) {
  if (spec.beta_profile) {
    const auto prof = ssm::run_beta_profile(spec, spec.snr_db_grid, ssm::profile_grid(spec.es.grid_points));
    ssm::write_profile_csv(prof, spec.out_path);
    if (!spec.plot_script_path.empty())
      ssm::emit_profile_plot_script(prof, spec.plot_script_path, spec.out_path);
    for (std::size_t s = 0; s < prof.snr_db.size(); ++s)
      std::cout << "snr_db=" << ssm::format_double(prof.snr_db[s])
                << " argmax_beta=" << ssm::format_double(prof.argmax_beta[s]) << '\n';
    return 0;
  }
  const auto records = ssm::run_sweep(spec);
  ssm::write_csv(records, spec.out_path);
  if (!spec.plot_script_path.empty()) ssm::emit_plot_script(records, spec.plot_script_path, spec.out_path);
  for (const auto& r : records)
    std::cout << "snr_db=" << ssm::format_double(r.snr_db) << " method=" << r.method
              << " mean_beta=" << r.mean_beta << " mean_sr=" << r.mean_sr << " +/- " << r.sr_std_error << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const ssm::ParsedArgs args = ssm::parse_spec(argc, argv);
    if (args.help_requested) {
      std::cout << args.help_text;
      return 0;
    }
    return run(args.spec);
  } catch (const ssm::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << e.usage();
    return 2;
  } catch (const ssm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ssm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ssm::FailureBudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
