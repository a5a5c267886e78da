#pragma once

#include <optional>

#include "soskit/polyprog.hpp"
#include "soskit/sdp.hpp"

namespace sos {

// Degree-d moment relaxation: linear functional L on monomials up to degree d
// (multilinear-reduced when boolean equalities are present), L(1) = 1, the
// moment matrix and one localizing matrix per inequality PSD, and L(r m) = 0
// for the general equalities.
struct MomentRelaxation {
  RegistryPtr reg;
  SdpProblem sdp;
  int degree = 0;
  std::vector<Monomial> monomials;          // distinct reduced monomials (the y's)
  std::vector<Monomial> principal_basis;    // rows of the moment block
  std::map<size_t, std::pair<int, std::pair<int, int>>> representative;  // y -> position
  Sense sense = Sense::Min;
};

MomentRelaxation build_moment(const PolyProgram& prog, int d, int monomial_cap = 250000);

// Solution functional of a moment SDP.
struct PseudoExpectation {
  std::map<std::string, double> moments;  // canonical monomial text -> value
  double value = 0;                       // objective value L(p)
  SdpStatus status = SdpStatus::NumericalTrouble;
  double gap = 1;
};
PseudoExpectation solve_moment(const MomentRelaxation& rel, const SdpOptions& opt = {});

// Margin feasibility of the moment side: maximize lambda with all moment
// blocks >= lambda I. Positive maximum = an explicit pseudo-expectation.
struct MomentFeasibility {
  double margin = -1;
  PseudoExpectation pe;
};
MomentFeasibility moment_feasible(const PolyProgram& prog, int d, const SdpOptions& opt = {});

// SOS side at threshold beta: a margin SDP searching for the decomposition
//   target = u_0 + sum u_q q (+ product axioms when `products`)
//          + sum v_r r (free multipliers),
// where target encodes the degree-d refutation of {axioms, p <= beta} (min
// sense; p >= beta for max). Gram blocks are capped by total trace <= trace_cap.
struct SosSide {
  SdpProblem sdp;
  int degree = 0;
  Rational beta;
  // Metadata for extraction.
  std::vector<Polynomial> multiplied_axioms;   // q for each Gram block (index 0: u0 => poly 1)
  std::vector<std::vector<Monomial>> gram_bases;
  std::vector<Polynomial> eq_axioms;           // general equalities (free multipliers)
  std::vector<std::vector<Monomial>> eq_bases;
  int lambda_block = -1;  // block holding lambda+ / lambda-
  int free_block = -1;    // diagonal block with the split free variables
  int slack_block = -1;
  const PolyProgram* prog = nullptr;
};
SosSide build_sos_side(const PolyProgram& prog, int d, const Rational& beta, bool products,
                       double trace_cap = 1e6);

struct SosSideResult {
  double margin = -1;  // max lambda; > 0 means a refutation with PSD margin
  SdpSolution sol;
};
SosSideResult solve_sos_side(const SosSide& side, const SdpOptions& opt = {});

// Binary search for the refutation threshold: for min-sense programs the
// largest beta with a degree-d refutation of {axioms, p <= beta}; for
// max-sense the smallest beta refuting {axioms, p >= beta}.
struct RefuteSearchResult {
  double lo = 0, hi = 0;      // final bracket
  double threshold = 0;       // midpoint
  SosSide side;               // at the certified endpoint
  SosSideResult certificate;  // margin solution at the certified endpoint
  std::optional<Claim> claim; // exactly verified refutation at that endpoint
};
RefuteSearchResult refute_search(const PolyProgram& prog, int d, double lo, double hi,
                                 bool products = true, double width = 1e-6,
                                 int max_bisections = 40, const SdpOptions& opt = {});

// Exact rationalization of a solved SOS side into a verified Claim. The Gram
// matrices are rounded by continued fractions (denominators <= 2^48), the
// coefficient equations are re-balanced exactly (free variables absorb what
// they can; the rest lands on Gram diagonals), and exact LDL^T both certifies
// PSD-ness and provides the weighted squares. A failed certification returns
// the numeric-grade flag, never a false "verified".
struct ExtractionResult {
  bool exact = false;
  std::optional<Claim> claim;  // set iff exact (claim verifies)
  std::string note;
};
ExtractionResult extract_refutation(const SosSide& side, const SdpSolution& sol,
                                    double min_margin = 1e-7);

Rational rationalize(double x, uint64_t max_den = (uint64_t{1} << 48));

}  // namespace sos
