#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "pcvx3/aniso_scale.hpp"
#include "pcvx3/bergman.hpp"
#include "pcvx3/jet.hpp"
#include "pcvx3/levi.hpp"
#include "pcvx3/normal_form.hpp"

namespace pcvx3::io {

using nlohmann::json;

// Full-precision scientific notation ("%.17e").
std::string fmt(double x);

json complex_to_json(cplx z);

// {"trunc_degree": n, "real": bool, "coeffs": {"a,b,c,d,e": [re, im], ...}}
json jet_to_json(const Jet& j);
Jet jet_from_json(const json& doc);  // throws ParseError

// Accepts a path to a JSON file or an inline JSON object (text starting with '{').
json load_json(const std::string& path_or_text);
Jet load_jet(const std::string& path_or_text);

json normalization_to_json(const NormalizationResult& r);

std::string levi_csv(const LeviReport& r);
json levi_verdict(const LeviReport& r);

std::string scale_probe_csv(const ScalingProbeReport& r, const json& footer);

std::string kernel_csv(const KernelEstimate& e);
json gram_to_json(const GramReport& g);
json kernel_summary(const KernelEstimate& e, double fit_tolerance);

std::string witness_csv(const WitnessReport& r);
json witness_summary(const WitnessReport& r);

// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace pcvx3::io
