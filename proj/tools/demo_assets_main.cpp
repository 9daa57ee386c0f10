// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

// Writes the procedural demo pools: drforge-demo-assets <out-dir> [--env-width N]

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "drforge/demo_assets.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Writes procedural mesh, texture and environment pools for drforge", "drforge-demo-assets"};
  std::string out;
  int env_width = 256;
  app.add_option("out", out, "output directory")->required();
  app.add_option("--env-width", env_width, "environment map width (height is half)")
      ->check(CLI::PositiveNumber)
      ->check([](const std::string& s) { return std::stoi(s) % 2 == 0 ? "" : "width must be even"; });
  CLI11_PARSE(app, argc, argv);
  try {
    auto pools = drforge::write_demo_assets(out, env_width);
    std::cout << "assets: " << pools.assets.string() << "\ntextures: " << pools.textures.string()
              << "\nenvs: " << pools.envs.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "drforge-demo-assets: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
