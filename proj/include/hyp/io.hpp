#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyp/constants.hpp"
#include "hyp/manifold.hpp"
#include "hyp/partition.hpp"
#include "hyp/shadowing.hpp"
#include "hyp/symbolic.hpp"

namespace hyp {

inline constexpr const char* TOOL_NAME = "hyp";
inline constexpr const char* TOOL_VERSION = "1.0.0";

// Built-in name ("horseshoe", "catmap") or a key=value model file; CLI
// overrides (lambda, matrix, ...) are applied on top. parse_error on
// malformed files, validation_error on inconsistent ledger data.
SystemModel load_model(const std::string& name_or_path);
SystemModel parse_model_text(const std::string& text);
std::string model_name(const SystemModel& m);

// Lossless text round trips. Doubles are printed with 17 significant digits;
// readers accept exactly what writers emit.
std::string partition_to_csv(const Partition& p, const std::vector<std::string>& header);
Partition partition_from_csv(const std::string& text);
std::string matrix_to_text(const TransitionMatrix& A, const std::vector<std::string>& header);
TransitionMatrix matrix_from_text(const std::string& text);
std::string orbit_to_csv(const PseudoOrbit& o, const std::vector<std::string>& header);
PseudoOrbit orbit_from_csv(const std::string& text);

std::string shadow_result_to_csv(const ShadowResult& r, const std::vector<std::string>& header);
std::string manifold_to_csv(const ManifoldResult& r, const std::vector<std::string>& header);

std::string constants_report_to_json(const ConstantsReport& r);
ConstantsReport constants_report_from_json(const std::string& text);

// CLI surface. Flags not used by a subcommand are ignored by it.
struct RunConfig {
    std::string subcommand;
    std::string model = "horseshoe";
    std::string matrix_file;
    std::string input;
    std::string out;    // empty = stdout
    std::string format; // "json" or "csv"; empty = subcommand default
    double x = 0.0, y = 0.0;
    double x2 = 0.0, y2 = 0.0;
    bool have_point2 = false;
    double delta = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    long long N = -1;
    long long k = -1;
    long long length = 50;
    long long period = 0;
    double amplitude = 0.0;
    std::string word;
    long long offset = 0;
    bool periodic = false;
    bool unstable = false;
    std::string segments; // "x,y,len;x,y,len;..."
    int samples = 64;
    std::uint64_t seed = 2026;
    int jobs = 1;
    std::vector<std::string> argv_echo;
};

// Dispatch a parsed invocation; writes to cfg.out or out_stream. Returns the
// process exit code: 0 success, 1 failed check/computation, 2 usage error.
int run(const RunConfig& cfg, std::ostream& out_stream, std::ostream& err_stream);

} // namespace hyp
