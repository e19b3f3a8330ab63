//! \file claims.hpp
//! \brief Registered verification claims and the deterministic claims runner.
//!
//! Each claim checks one statement about one metric family at one fiber
//! dimension, over a seeded random sample of chart points.  Claims are pure
//! functions of (seed, samples); the runner executes them in claim-id order
//! and reports a deterministic JSON-lines stream.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cflat {

struct ClaimResult {
  std::string claim_id;
  std::string family;
  int n = 0;
  int samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  long elapsed_ms = 0;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::string note;  // human table only, not part of the report schema
};

struct ClaimConfig {
  std::uint64_t seed = 42;
  int samples = 100;
  int order = 2;
  std::optional<double> tol_override;
};

struct Claim {
  std::string id;
  std::string group;   // weyl, lemma1, ricci, scalar, holonomy, dim4, thc2,
                       // products, killing, crossval, nordstrom
  std::string family;
  int n = 0;
  //! Returns (max_residual, tolerance, note); pass is residual <= tolerance.
  std::function<ClaimResult(const ClaimConfig&)> run;
};

//! The full registered suite (all acceptance criteria).
std::vector<Claim> default_claims();

//! Claims filtered by exact ids (comma-separated list semantics handled by
//! the caller); unknown ids are ignored.
std::vector<Claim> select_claims(const std::vector<Claim>& all,
                                 const std::vector<std::string>& ids);

//! Claims filtered by group and optionally by family label and n.
std::vector<Claim> filter_claims(const std::vector<Claim>& all, const std::string& group,
                                 const std::string& family = "", int n = 0);

//! Execute in id order; catches constraint violations as skipped results.
std::vector<ClaimResult> run_claims(const std::vector<Claim>& claims,
                                    const ClaimConfig& cfg);

//! Deterministic JSON-lines report (one object per claim, summary last).
//! elapsed_ms is written as 0 so reports are bit-identical across runs.
std::string render_report_jsonl(const std::vector<ClaimResult>& results);

//! Human-readable fixed-width table.
std::string render_table(const std::vector<ClaimResult>& results);

//! 0 if all pass, 1 if any failed, 2 if any skipped.
int exit_code_for(const std::vector<ClaimResult>& results);

}  // namespace cflat
