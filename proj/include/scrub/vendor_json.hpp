// Single include point for the vendored nlohmann/json header so the include
// path quirk (vendor/ on the include path) lives in one place.
#pragma once

#include <json.hpp>
