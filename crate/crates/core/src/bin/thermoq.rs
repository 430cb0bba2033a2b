// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

use thermoq::cli::{run, RunEnv};

fn main() {
    std::process::exit(run(std::env::args_os(), &RunEnv::from_process()));
}
