#pragma once

#include "wavescat/potential.hpp"

#include <span>
#include <string>
#include <vector>

namespace wavescat {

struct NamedPotential {
  std::string name;
  PotentialSpec spec;
};

/// zero, square wells (-0.1, -3, -4, +2 on [0,1]) and oscillatory_decay
/// (0.5, 1.5, b) for b = 0.6, 0.7.
std::vector<NamedPotential> acceptance_potentials();

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;  // worst measured values against their tolerances
  double seconds = 0;
  double budget = 0;  // seconds; reported, not enforced
};

constexpr int kCriteria = 12;

/// Runs one criterion (1..12); exceptions become failures with the message
/// in `detail`.
CriterionResult run_criterion(int id);

/// Runs the given criteria (all when empty) in order.
std::vector<CriterionResult> run_acceptance(std::span<const int> ids = {});

/// "[PASS]  7  title  (12.3 s / 120 s)  detail"
std::string format_result(const CriterionResult& r);

}  // namespace wavescat
