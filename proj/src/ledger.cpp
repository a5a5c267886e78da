#include "soskit/ledger.hpp"

#include <sstream>

namespace sos {

void ScalarLedger::add_le(const std::string& name, const std::string& desc,
                          std::function<std::pair<Interval, Interval>()> recompute) {
  auto [l, r] = recompute();
  entries_.push_back(LedgerEntry{name, desc, LedgerEntry::Relation::LessEq, l, r,
                                 std::move(recompute)});
}

void ScalarLedger::add_eq(const std::string& name, const std::string& desc,
                          std::function<std::pair<Interval, Interval>()> recompute) {
  auto [l, r] = recompute();
  entries_.push_back(LedgerEntry{name, desc, LedgerEntry::Relation::AbsTol, l, r,
                                 std::move(recompute)});
}

bool ScalarLedger::holds() const {
  for (auto& e : entries_)
    if (!e.holds()) return false;
  return true;
}

std::vector<std::string> ScalarLedger::failing() const {
  std::vector<std::string> out;
  for (auto& e : entries_)
    if (!e.holds()) out.push_back(e.name);
  return out;
}

std::string ScalarLedger::report() const {
  std::ostringstream os;
  os << "entry                          lhs                      rhs                      verdict\n";
  for (auto& e : entries_) {
    std::string name = e.name;
    name.resize(30, ' ');
    std::string l = e.lhs.str(), r = e.rhs.str();
    l.resize(24, ' ');
    r.resize(24, ' ');
    os << name << " " << l << " " << r << " " << (e.holds() ? "pass" : "FAIL") << "\n";
  }
  return os.str();
}

LedgerReport check_ledger(const ScalarLedger& ledger) {
  ScalarLedger fresh;
  for (auto& e : ledger.entries()) {
    if (e.relation == LedgerEntry::Relation::AbsTol)
      fresh.add_eq(e.name, e.description, e.recompute);
    else
      fresh.add_le(e.name, e.description, e.recompute);
  }
  LedgerReport rep;
  rep.all_pass = fresh.holds();
  rep.failures = fresh.failing();
  rep.table = fresh.report();
  return rep;
}

}  // namespace sos
