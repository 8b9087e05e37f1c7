// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latebind::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitDenied = 1,
  kExitUsage = 2,
  kExitNoMarker = 3,
  kExitExpired = 4,
  kExitOther = 5,
};

using Env = std::function<std::optional<std::string>(const std::string&)>;

/// getenv().
Env process_env();

/// Entry point shared by the latebind binary and the tests. `args` excludes
/// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Env& env = process_env());

/// Byte range of the text between <!--name--> and <!--/name-->.
struct MarkerRegion {
  std::size_t inner_begin = 0;
  std::size_t inner_end = 0;
};

/// Every marked region, in document order. Throws Error(invalid_argument)
/// for an opening marker without its closing marker.
std::vector<MarkerRegion> find_markers(std::string_view html, std::string_view name);

/// Plain text of an HTML fragment: tags dropped, <br> and block ends become
/// newlines, the common entities decoded.
std::string html_to_text(std::string_view html);

}  // namespace latebind::cli
