#pragma once

#include <string>

#include <json.hpp>

namespace bdk {

using ojson = nlohmann::ordered_json;

/// "%.17g" for finite values; JSON has no spelling for the rest, so they
/// become null there and nan/inf/-inf in CSV.
std::string format_double(double x);

/// Serialise with every floating value at 17 significant digits and keys in
/// insertion order, so equal inputs give byte-identical text.
std::string dump_json(const ojson& doc, int indent = 2);

/// First line of every CSV table we emit.
std::string csv_header(const std::string& table);

} // namespace bdk
