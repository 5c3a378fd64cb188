#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "robust_pr/harness.hpp"

namespace robust_pr {

/// Config problem with its location; what() reads "source:line: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);

  std::string source;
  int line;  // 0 when the problem is not tied to one line
  std::string message;
};

// Flat `key = value` documents, one key per line, `#` starts a comment.
//
//   n                               signal length                     (default 32)
//   m_over_n                        M / N                             (default 8)
//   model                           intensity | amplitude             (required)
//   algorithms                      comma list of wf, gs, lad-admm   (required)
//   snr_grid_db                     comma list, or start:step:stop    (required)
//   trials                          Monte Carlo trials                (default 100)
//   master_seed                     unsigned 64-bit                   (default 1)
//   noise                           gmm | none                        (default gmm)
//   noise.c2                        outlier probability               (default 0.1)
//   noise.variance_ratio            sigma2^2 / sigma1^2               (default 100)
//   solver_options.rho              ADMM penalty                      (default 1)
//   solver_options.max_outer_iters                                     (default 200)
//   solver_options.outer_tol                                           (default 1e-6)
//   solver_options.inner_iters      default 50 (intensity) / 25 (amplitude)
//   solver_options.wf_tau0                                             (default 330)
//   solver_options.wf_mu_max                                           (default 0.2)
//   record_traces                   true | false                      (default false)
//
// Unknown or repeated keys are errors.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace robust_pr
