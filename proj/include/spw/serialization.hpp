#pragma once

#include <json.hpp>

#include "spw/bounds.hpp"
#include "spw/photon_stats.hpp"
#include "spw/sdp.hpp"
#include "spw/witness.hpp"

namespace spw {

using Json = nlohmann::ordered_json;

// Matrices are written row-major as arrays of rows. Non-finite numbers are
// written as null.

Json matrix_to_json(const RealMatrix& m);
RealMatrix matrix_from_json(const Json& j);

Json to_json(const LocalPhotonStats& s);
LocalPhotonStats stats_from_json(const Json& j);

Json to_json(const WitnessResult& w);
Json to_json(const CertificateData& c);
Json to_json(const SdpSummary& s);
Json to_json(const BoundResult& b);

Json to_json(const SdpProblem& p);
SdpProblem problem_from_json(const Json& j);
Json to_json(const SdpSolution& s);

}  // namespace spw
