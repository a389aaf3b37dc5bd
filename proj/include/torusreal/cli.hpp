// Copyright 2026 The torusreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command dispatch shared by the executable and the tests.

#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "torusreal/io.hpp"

namespace torusreal {

enum ExitStatus : int { kSuccess = 0, kCheckFailed = 1, kInputFailure = 2 };

enum class OutputFormat { human, machine };

inline constexpr std::array<std::string_view, 7> kCommands = {"check-bundle", "check-real", "decompose", "solve",
                                                              "sample",       "certify",    "reconstruct"};

inline bool is_command(std::string_view name) {
  for (auto c : kCommands)
    if (c == name) return true;
  return false;
}

struct JobSpec {
  std::string command;
  std::string input_path;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;  // residual and lattice-membership threshold of the checks
  int samples = 20;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::human;
};

struct JobResult {
  int status = kSuccess;
  Json report;
};

namespace detail {

/// Report skeleton; failed conditions are collected under "failed".
class ReportBuilder {
 public:
  explicit ReportBuilder(const std::string& command) { doc_ = {{"command", command}, {"status", "pass"}}; }
  Json& doc() { return doc_; }
  void require(bool holds, const std::string& condition) {
    if (!holds) failed_.push_back(condition);
  }
  void require_all(const std::vector<ConditionResult>& conditions) {
    for (const auto& c : conditions) require(c.holds, c.label);
  }
  JobResult finish() {
    doc_["status"] = failed_.empty() ? "pass" : "fail";
    doc_["failed"] = failed_;
    return {failed_.empty() ? kSuccess : kCheckFailed, doc_};
  }

 private:
  Json doc_;
  std::vector<std::string> failed_;
};

inline const BundleDatum& need_bundle(const JobInput& in) {
  if (!in.bundle) throw InputError("this command needs a bundle section", "input");
  return *in.bundle;
}

inline const RealStructureData& need_real(const JobInput& in) {
  if (!in.real) throw InputError("this command needs a real section", "input");
  return *in.real;
}

inline ComplexStructurePair structure_pair(const JobInput& in) {
  if (!in.structure) throw InputError("this command needs a structure section", "input");
  const StructureInput& s = *in.structure;
  if (s.J1) {
    if (!squares_to_minus_identity(*s.J1) || !squares_to_minus_identity(*s.J2))
      throw InputError("J1 and J2 must square to -1", "structure");
    return make_structure_pair(*s.J1, *s.J2);
  }
  if (!in.real) throw InputError("B1 and B2 are eigenbasis blocks and need a real section", "structure");
  const EigenSplit split = eigensplit(*in.real, need_bundle(in));
  try {
    return build_J(split, *s.blocks);
  } catch (const DimensionError& e) {
    throw InputError(e.what(), "structure");
  }
}

/// The system section if present, otherwise the blocks of the real structure.
inline ConstraintSystem system_of(const JobInput& in) {
  if (in.system) return *in.system;
  if (in.bundle && in.real) {
    const IntegralConditionReport report = check_integral_conditions(*in.real, *in.bundle);
    if (!report.all()) throw InputError("the real structure fails its integral conditions; run check-real", "real");
    return system_from_split(eigensplit(*in.real, *in.bundle));
  }
  throw InputError("this command needs a system section, or bundle and real sections", "input");
}

inline JobResult check_bundle(const JobSpec&, const JobInput& in) {
  const BundleDatum& datum = need_bundle(in);
  ReportBuilder r("check-bundle");
  const bool nondegenerate = is_nondegenerate(datum);
  r.doc()["m"] = datum.m;
  r.doc()["d"] = datum.d;
  r.doc()["nondegenerate"] = nondegenerate;
  r.require(nondegenerate, "nondegenerate form");
  if (datum.d == 1) {
    r.doc()["pfaffian_pencil"] = to_json(pfaffian_pencil(datum).coefficients());
    if (datum.m == 2) {
      const PfaffianQuadratic q = pfaffian_quadratic(datum);
      r.doc()["pfaffian_quadratic"] = {{"a", rational_json(q.a)}, {"b", rational_json(q.b)}, {"c", rational_json(q.c)},
                                       {"discriminant", rational_json(q.discriminant())}};
    }
    r.doc()["pfaffian_reality"] = pfaffian_reality(datum);
  }
  return r.finish();
}

inline JobResult check_real(const JobSpec& spec, const JobInput& in) {
  const BundleDatum& datum = need_bundle(in);
  const RealStructureData& data = need_real(in);
  ReportBuilder r("check-real");
  const IntegralConditionReport integral = check_integral_conditions(data, datum);
  r.doc()["integral_conditions"] = to_json(integral.conditions);
  r.doc()["nondegenerate"] = integral.nondegenerate;
  if (integral.witness) r.doc()["square_witness"] = to_json(*integral.witness);
  r.require_all(integral.conditions);
  if (!integral.all()) return r.finish();

  const EigenSplit split = eigensplit(data, datum);
  r.doc()["eigenspaces"] = {{"U_plus", split.dim_U_plus()},
                            {"U_minus", split.dim_U_minus()},
                            {"V_plus", split.dim_V_plus()},
                            {"V_minus", split.dim_V_minus()}};
  r.doc()["effective_linear_part"] = to_json(effective_linear_part(data, datum));
  if (split.dim_U_plus() == 1 && split.dim_U_minus() == 1 && split.dim_V_plus() == split.dim_V_minus() &&
      split.dim_V_plus() <= 2)
    r.doc()["system"] = to_json(system_from_split(split));
  if (in.structure) {
    const ComplexStructurePair pair = structure_pair(in);
    const double tol = spec.tolerance.value_or(kLatticeTolerance);
    const DianalyticReport dian = check_dianalytic_conditions(data, decompose(datum, pair), pair, tol);
    r.doc()["dianalytic_conditions"] = to_json(dian.conditions);
    r.require_all(dian.conditions);
  }
  return r.finish();
}

inline JobResult decompose_job(const JobSpec& spec, const JobInput& in) {
  const BundleDatum& datum = need_bundle(in);
  const ComplexStructurePair pair = structure_pair(in);
  ReportBuilder r("decompose");
  const double tol = spec.tolerance.value_or(kResidualTolerance);
  const RiemannResidual riemann = riemann_residuals(datum, pair);
  r.doc()["riemann_residual"] = {{"component_route", riemann.component_route},
                                 {"identity_route", riemann.identity_route}};
  const bool compatible = riemann.value() <= tol;
  r.require(compatible, "first Riemann relation");
  if (!compatible) return r.finish();
  const HodgeDecomposition dec = decompose(datum, pair, tol);
  Json bp = Json::array(), bpp = Json::array();
  for (const auto& b : dec.B_prime) bp.push_back(to_json(b));
  for (const auto& b : dec.B_doubleprime) bpp.push_back(to_json(b));
  r.doc()["V"] = to_json(dec.V);
  r.doc()["U"] = to_json(dec.U);
  r.doc()["B_prime"] = std::move(bp);
  r.doc()["B_doubleprime"] = std::move(bpp);
  r.doc()["parallelizable"] = is_parallelizable(dec, tol);
  r.doc()["singular_point"] = is_singular_point(datum, dec, tol);
  return r.finish();
}

inline JobResult solve_job(const JobSpec& spec, const JobInput& in) {
  const ConstraintSystem sys = system_of(in);
  ReportBuilder r("solve");
  r.doc()["system"] = to_json(sys);
  r.doc()["seed"] = spec.seed;
  r.doc()["solution_set"] = to_json(solve_system(sys, spec.seed));
  return r.finish();
}

inline JobResult sample_job(const JobSpec& spec, const JobInput& in) {
  const ConstraintSystem sys = system_of(in);
  ReportBuilder r("sample");
  r.doc()["system"] = to_json(sys);
  r.doc()["seed"] = spec.seed;
  const SolutionSet set = sys.m == 1 ? analyze_kodaira(sys) : analyze_threefold(sys);
  r.doc()["case"] = set.info.leaf;
  r.require(!set.empty, "nonempty solution set");
  if (set.empty) {
    r.doc()["reason"] = set.info.reason;
    return r.finish();
  }
  const SampleReport samples = sample_solutions(sys, set, spec.samples, spec.seed);
  Json ws = Json::array();
  for (const auto& w : samples.witnesses) ws.push_back(to_json(w));
  r.doc()["requested"] = spec.samples;
  r.doc()["rejected_draws"] = samples.rejected;
  r.doc()["samples"] = std::move(ws);
  r.require(static_cast<int>(samples.witnesses.size()) == spec.samples, "requested sample count");
  return r.finish();
}

inline JobResult certify_job(const JobSpec& spec, const JobInput& in) {
  const ConstraintSystem sys = system_of(in);
  ReportBuilder r("certify");
  const ConnectivityCertificate cert = connectivity_certificate(sys, spec.samples, spec.seed);
  r.require(!cert.witnesses.empty(), "nonempty solution set");
  if (!cert.witnesses.empty()) r.require(cert.component_count == 1, "single component");
  r.doc()["certificate"] = to_json(cert, sys);
  return r.finish();
}

inline JobResult reconstruct_job(const JobSpec&, const JobInput& in) {
  const BundleDatum& datum = need_bundle(in);
  ReportBuilder r("reconstruct");
  ConjugationData conj;
  if (in.conjugation) {
    conj = *in.conjugation;
  } else {
    conj = emit_conjugation_data(need_real(in), datum);
    r.doc()["conjugation"] = to_json(conj);
  }
  RealStructureData back;
  try {
    back = reconstruct_from_orbifold(conj, datum);
  } catch (const InconsistentDataError& e) {
    r.doc()["error"] = e.what();
    r.require(false, "consistent conjugation data");
    return r.finish();
  }
  r.doc()["reconstructed"] = to_json(back);
  if (!in.conjugation) {
    RealStructureData expected = *in.real;
    expected.d1 = normalize_fibre_translation(expected.A1, expected.d1);
    const bool same = expected.A1 == back.A1 && expected.A2 == back.A2 && expected.L == back.L &&
                      expected.d1 == back.d1 && expected.d2 == back.d2;
    r.require(same, "round trip");
  }
  const IntegralConditionReport integral = check_integral_conditions(back, datum);
  r.doc()["integral_conditions"] = to_json(integral.conditions);
  r.require_all(integral.conditions);
  return r.finish();
}

}  // namespace detail

/// Runs a parsed job. Input problems surface as InputError.
inline JobResult execute(const JobSpec& spec, const JobInput& input) {
  if (spec.samples < 1) throw InputError("--samples must be positive", "options");
  if (spec.tolerance && !(*spec.tolerance > 0)) throw InputError("--tol must be positive", "options");
  try {
    if (spec.command == "check-bundle") return detail::check_bundle(spec, input);
    if (spec.command == "check-real") return detail::check_real(spec, input);
    if (spec.command == "decompose") return detail::decompose_job(spec, input);
    if (spec.command == "solve") return detail::solve_job(spec, input);
    if (spec.command == "sample") return detail::sample_job(spec, input);
    if (spec.command == "certify") return detail::certify_job(spec, input);
    if (spec.command == "reconstruct") return detail::reconstruct_job(spec, input);
  } catch (const DimensionError& e) {
    throw InputError(e.what(), "input");
  } catch (const PreconditionError& e) {
    throw InputError(e.what(), "input");
  }
  throw InputError("unknown command '" + spec.command + "'", "command");
}

inline void write_report(const Json& report, OutputFormat format, std::ostream& os) {
  if (format == OutputFormat::machine)
    os << report.dump(2) << '\n';
  else
    render_table(report, os);
}

/// Loads the input, executes, writes the report to out or to --out, and
/// returns the exit status. Diagnostics go to err.
inline int run(const JobSpec& spec, std::ostream& out, std::ostream& err) {
  if (!is_command(spec.command)) {
    err << "error: unknown command '" << spec.command << "'\n";
    return kInputFailure;
  }
  JobResult result;
  try {
    result = execute(spec, load_job(spec.input_path));
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputFailure;
  }
  if (spec.output_path) {
    std::ofstream file(*spec.output_path);
    if (!file) {
      err << "input error: cannot write " << *spec.output_path << '\n';
      return kInputFailure;
    }
    write_report(result.report, spec.format, file);
  } else {
    write_report(result.report, spec.format, out);
  }
  return result.status;
}

}  // namespace torusreal
