#include "tploc/diffcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tploc {

double GradCheckReport::worst_rel_error() const {
  double w = 0.0;
  for (const auto& e : entries) w = std::max(w, e.rel_error);
  return w;
}

bool GradCheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

std::string GradCheckReport::table() const {
  std::string out = "parameter                                    coords   max_abs_err   rel_err  ok\n";
  char line[256];
  for (const auto& e : entries) {
    std::snprintf(line, sizeof(line), "%-44s %6zu   %.3e   %.3e  %s\n", e.name.c_str(),
                  e.coords_checked, e.max_abs_error, e.rel_error, e.passed ? "yes" : "NO");
    out += line;
  }
  return out;
}

GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::vector<std::pair<std::string, Tensor>> leaves,
                           const GradCheckOptions& options) {
  for (auto& [_, t] : leaves) t.node()->grad.assign(t.numel(), 0.0);
  Tensor loss = f();
  run_backward(loss);
  std::vector<std::vector<double>> analytic;
  for (auto& [_, t] : leaves) {
    const auto& g = t.node()->grad;
    analytic.push_back(g.size() == t.numel() ? g : std::vector<double>(t.numel(), 0.0));
  }

  GradCheckReport report;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    auto& [name, t] = leaves[k];
    auto vals = t.mutable_values();
    std::size_t n = vals.size();
    std::size_t stride = 1;
    if (options.max_coords && n > options.max_coords) stride = (n + options.max_coords - 1) / options.max_coords;

    GradCheckEntry e;
    e.name = name;
    double max_a = 0.0, max_n = 0.0, max_diff = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
      double orig = vals[i];
      vals[i] = orig + options.step;
      double up = f().item();
      vals[i] = orig - options.step;
      double down = f().item();
      vals[i] = orig;
      double numeric = (up - down) / (2.0 * options.step);
      double a = analytic[k][i];
      max_a = std::max(max_a, std::fabs(a));
      max_n = std::max(max_n, std::fabs(numeric));
      max_diff = std::max(max_diff, std::fabs(a - numeric));
      ++e.coords_checked;
    }
    e.max_abs_error = max_diff;
    e.rel_error = max_diff / std::max({max_a, max_n, options.denominator_floor});
    e.passed = e.rel_error <= options.tolerance;
    report.entries.push_back(e);
  }
  return report;
}

GradCheckReport grad_check(const std::function<Tensor()>& f, ParameterStore& store,
                           const GradCheckOptions& options) {
  std::vector<std::pair<std::string, Tensor>> leaves;
  for (auto& [name, p] : store.entries()) leaves.emplace_back(name, p.value);
  return grad_check(f, std::move(leaves), options);
}

}  // namespace tploc
