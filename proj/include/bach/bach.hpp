#pragma once

// Umbrella header: the whole toolkit.

#include "bach/errors.hpp"     // IWYU pragma: export
#include "bach/term.hpp"       // IWYU pragma: export
#include "bach/store.hpp"      // IWYU pragma: export
#include "bach/agent.hpp"      // IWYU pragma: export
#include "bach/logic.hpp"      // IWYU pragma: export
#include "bach/interpreter.hpp"  // IWYU pragma: export
#include "bach/explorer.hpp"   // IWYU pragma: export
#include "bach/parser.hpp"     // IWYU pragma: export
#include "bach/ns_model.hpp"   // IWYU pragma: export
