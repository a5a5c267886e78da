#pragma once

#include <string>

#include "soskit/sdp.hpp"

namespace sos {

// SDPA sparse format (.dat-s): comment lines, mDIM, nBLOCK, block sizes
// (negative for diagonal blocks), the c vector, then "matno blkno i j value"
// entries with 1-based indices and i <= j; matno 0 is the constant matrix.
// The emitted problem is the dual pairing: F_0 = C, F_i = A_i, c = b.
void emit_sdpa(const SdpProblem& sdp, const std::string& path);
SdpProblem parse_sdpa(const std::string& path);
std::string sdpa_text(const SdpProblem& sdp);
SdpProblem parse_sdpa_text(const std::string& text);

// Solution files: plain text with a "y" line of mDIM values followed by one
// "blk i j value" line per stored primal entry (1-based, i <= j).
void write_solution(const SdpSolution& sol, const std::string& path);
SdpSolution read_solution(const std::string& path, const SdpProblem& shape);

}  // namespace sos
