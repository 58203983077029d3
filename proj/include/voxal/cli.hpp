// Copyright 2026 the voxal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace voxal {

/// Entry point for the `voxal` binary. Subcommands: synth, segment,
/// features, run, sweep-radius, report. Returns the process exit code:
/// 0 on success (including --help), 1 on validation or runtime failure,
/// 2 on a usage error (unknown subcommand, unknown flag, malformed value).
int run_cli(int argc, const char* const* argv);

}  // namespace voxal
