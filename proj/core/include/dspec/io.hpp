#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "dspec/spectrum.hpp"
#include "dspec/timoshenko.hpp"

namespace dspec {

using nlohmann::json;

// Parses text and reports syntax errors as "source:line:column: message".
json parse_json_text(const std::string& text, const std::string& source = "<input>");
json load_json_file(const std::string& path);

json complex_to_json(cplx z);
// Accepts {"re": x, "im": y} or a bare number; `where` names the field in error messages.
cplx complex_from_json(const json& j, const std::string& where);
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j, const std::string& where, int rows = -1, int cols = -1);

json bvp_to_json(const DiracBVP& bvp);
DiracBVP bvp_from_json(const json& j);
DiracBVP load_bvp(const std::string& path);

json beam_to_json(const BeamModel& beam);
BeamModel beam_from_json(const json& j);
BeamModel load_beam(const std::string& path);

json to_json(const SectorFan& fan, const DiracBVP& bvp);
json to_json(const RegularityReport& r);
json to_json(const CompletenessCertificate& c);
json to_json(const RieszVerdict& v);
json to_json(const SynthesisVerdict& v);
json to_json(const SectorModel& m);
json to_json(const SpectrumSlice& s);
json to_json(const RieszBlocks& b);
json to_json(const BeamConditions& c);

// Every verdict for one system, as emitted by `classify`.
json classification_report(const DiracBVP& bvp, const StepControl& ctrl = {});

}  // namespace dspec
