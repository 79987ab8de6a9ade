#include <fmt/format.h>

#include "lfsim/harness.hpp"

namespace lfsim {

namespace {

ExperimentConfig base(std::string name, int antennas, int subsets) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.antennas = antennas;
  c.subsets = subsets;
  c.drops = 1000;
  c.output.clear();
  return c;
}

ExperimentConfig fig1() {
  auto c = base("fig1", 16, 1);
  c.users = {20};
  c.fading = {Fading::kIid};
  c.snr_db = {0, 5, 10, 15, 20, 25, 30};
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr, Scheme::kRbf};
  return c;
}

ExperimentConfig fig2() {
  auto c = base("fig2", 4, 2);
  c.users = {4, 6, 8, 12, 16, 24, 32, 40, 50};
  c.fading = {Fading::kIid, Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.schemes = {Scheme::kZfbfSus, Scheme::kFullInr, Scheme::kPartialInr, Scheme::kDftSinr,
               Scheme::kRbf};
  return c;
}

ExperimentConfig fig3() {
  auto c = base("fig3", 8, 2);
  c.users = {8, 12, 16, 24, 32, 48, 64, 80, 100};
  c.fading = {Fading::kIid, Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.schemes = {Scheme::kZfbfSus, Scheme::kFullInrGreedy, Scheme::kPartialInr, Scheme::kDftSinr,
               Scheme::kRbf};
  return c;
}

ExperimentConfig fig4() {
  auto c = base("fig4", 16, 2);
  c.users = {8, 16, 24, 32, 40};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.schemes = {Scheme::kZfbfSus, Scheme::kFullInrGreedy, Scheme::kPartialInr, Scheme::kDftSinr,
               Scheme::kRbf};
  return c;
}

ExperimentConfig fig5() {
  auto c = base("fig5", 8, 2);
  c.users = {4, 8, 12, 16, 20, 24};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 10}, {10, 20}, {20, 40}};
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr, Scheme::kDftSinr};
  return c;
}

ExperimentConfig fig6() {
  auto c = base("fig6", 16, 2);
  c.users = {8, 16, 24, 32, 40};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.err_var = {0.1, 0.2};
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr, Scheme::kDftSinr};
  return c;
}

ExperimentConfig fig7() {
  auto c = base("fig7", 16, 2);
  c.users = {8, 16, 24, 32, 40};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.err_var = {0.1};
  c.overhead = OverheadMode::kGrouping;
  c.schemes = {Scheme::kZfbfSus, Scheme::kPartialInr, Scheme::kDftSinr};
  return c;
}

ExperimentConfig fig8() {
  auto c = base("fig8", 16, 2);
  c.users = {8, 16, 24, 32, 40};
  c.fading = {Fading::kOneRing};
  c.spread_deg = {{5, 20}};
  c.snr_spread_db = Range{0, 20};
  c.err_var = {0.1};
  c.gamma_threshold = 0.02;
  c.schemes = {Scheme::kFullInrGreedy, Scheme::kPartialInr, Scheme::kOneBitInr};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
}

ExperimentConfig preset(std::string_view name) {
  if (name == "fig1") return fig1();
  if (name == "fig2") return fig2();
  if (name == "fig3") return fig3();
  if (name == "fig4") return fig4();
  if (name == "fig5") return fig5();
  if (name == "fig6") return fig6();
  if (name == "fig7") return fig7();
  if (name == "fig8") return fig8();
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

}  // namespace lfsim
