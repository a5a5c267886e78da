#pragma once

#include <functional>
#include <string>
#include <vector>

#include "soskit/interval.hpp"

namespace sos {

// One scalar inequality inside an asymptotic proof, certified by interval
// arithmetic with directed rounding. An entry holds when the relation is
// provable from the two enclosures.
struct LedgerEntry {
  enum class Relation { LessEq, AbsTol };
  std::string name;
  std::string description;
  Relation relation = Relation::LessEq;
  Interval lhs, rhs;
  std::function<std::pair<Interval, Interval>()> recompute;

  bool holds() const {
    if (relation == Relation::AbsTol) return abs(lhs - rhs).certainly_le(Interval(1e-9));
    return lhs.certainly_le(rhs);
  }
};

class ScalarLedger {
 public:
  void add_le(const std::string& name, const std::string& desc,
              std::function<std::pair<Interval, Interval>()> recompute);
  void add_eq(const std::string& name, const std::string& desc,
              std::function<std::pair<Interval, Interval>()> recompute);

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  bool holds() const;
  std::vector<std::string> failing() const;
  // Structured text table: entry name, enclosures, verdict.
  std::string report() const;

 private:
  std::vector<LedgerEntry> entries_;
};

struct LedgerReport {
  bool all_pass = false;
  std::vector<std::string> failures;
  std::string table;
};

// Re-evaluates every entry from its closure (128-bit interval precision,
// deterministic) and reports the verdicts.
LedgerReport check_ledger(const ScalarLedger& ledger);

}  // namespace sos
