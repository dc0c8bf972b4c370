#pragma once
// forwards to the vendored single-header json.hpp
#include <json.hpp>
