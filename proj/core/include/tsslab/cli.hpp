#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsslab {

// The tss-lab command line: subcommands derive, lts, pure, stratify, meaning,
// bisim, lift, check, sum, minimize, export-dot.
// Exit codes: 0 pass/related, 1 fail/unrelated (witness printed),
// 2 unknown/truncated, 64 usage, 65 bad input data, 70 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsslab
