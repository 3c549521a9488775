#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmg/types.hpp"

namespace cmg {

struct RunManifest {
    std::string command;       // solve | experiment | case-study
    std::string spec_path;
    std::string fixture;
    std::string method = "lp-cg";
    std::vector<std::string> methods;  // experiment only
    std::vector<uint64_t> seeds{0};
    std::string out_dir = ".";
    double eps = 1e-5;
    int batch = 5000;
    int iters = 500;
    int inner_steps = 5;
    double lr_defender = 3e-4;
    double lr_attacker = 3e-3;
    int atk_warmup = 300;
    int restarts = 1;
    double gen_bias_init = -3.0;
    int eval_samples = 100000;
    // Generator parameters, used when no spec/fixture is given.
    int n = 20;
    int m = 1;
    int num_exploits = 20;
    int V = 3;
    double c = 0.01;
    // Sweep axis (experiment).
    std::string axis;
    std::vector<double> axis_values;
};

// Resolves a bundled fixture name to a game-spec path. Looks at
// $CMG_FIXTURES_DIR, then ./fixtures, then the build-time fixture directory.
std::string resolve_fixture(const std::string& name);

// Builds the game for one run seed: loads the spec/fixture, or generates a
// seeded instance from the manifest parameters.
GameSpec manifest_game(const RunManifest& manifest, uint64_t seed);

int run_cli(int argc, const char* const* argv);

}  // namespace cmg
