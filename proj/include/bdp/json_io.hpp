#ifndef BDP_JSON_IO_HPP
#define BDP_JSON_IO_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "bdp/bounds.hpp"
#include "bdp/lognorm.hpp"
#include "bdp/oracle.hpp"
#include "bdp/verify.hpp"
#include "bdp/weights.hpp"

namespace bdp {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// %.17g; non-finite values become "inf", "-inf", "nan".
std::string format_double(double x);

/// Pretty-printed JSON with every float at 17 significant digits and
/// non-finite floats written as strings. Output is byte-stable.
std::string dump_json(const Json &j);

/// Non-finite doubles are stored as strings so the writer never sees them.
Json number(double x);

Json to_json(const RateCombination &r);
Json to_json(const Interval &i);
Json to_json(const WeightSequence &w, std::size_t head = 20);
Json to_json(const ErgodicFeasibility &f);
Json to_json(const NullFeasibility &f);
Json to_json(const PresetWeights &p);
Json to_json(const BoundCertificate &c);
Json to_json(const VerificationReport &r, bool with_samples = true);
Json to_json(const CoefficientProfile &p);

void write_text(const std::string &path, const std::string &text);
void write_json(const std::string &path, const Json &j);

/// t, p_0 .. p_N, mass, truncation_loss
void write_trajectory_csv(const std::string &path, const Trajectory &traj);
/// t, envelope_value
void write_envelope_csv(const std::string &path, const BoundCertificate &cert,
                        const RateFunction &a, const RateFunction &b,
                        const std::vector<double> &grid, double initial_value);
/// t, k, value (k = -1 is the limit row)
void write_profile_csv(const std::string &path, const std::vector<CoefficientProfile> &rows);

} // namespace bdp

#endif
