// Runs the quadrant plan and prints mean +- std per method and measure.
//
//   quadrant_experiment [plan.json]

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "limo/limo.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : LIMO_SAMPLE_PLAN;
  try {
    const auto text = limo::io_detail::read_file(path);
    const auto plan =
        limo::plan_from_json(nlohmann::ordered_json::parse(text), std::filesystem::path(path).parent_path());
    const auto report = limo::run_experiment(plan);

    std::printf("%-18s %-18s %10s %10s %8s\n", "method", "measure", "mean", "std", "rank");
    for (const auto& row : report.summary) {
      const auto rank = row.average_rank ? std::to_string(*row.average_rank).substr(0, 4) : std::string("-");
      std::printf("%-18s %-18s %10.4f %10.4f %8s\n", row.entry.c_str(), std::string(limo::measure_name(row.measure)).c_str(),
                  row.stats.mean, row.stats.std, rank.c_str());
    }
    for (const auto& e : report.errors)
      std::fprintf(stderr, "warning: %s replicate %zu (%s): %s\n", e.variant.c_str(), e.replicate, e.stage.c_str(),
                   e.message.c_str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
