#pragma once

// Umbrella header for the pure modules. service.hpp (which pulls in
// cpp-httplib) is included separately.

#include "teachqa/classifier.hpp"
#include "teachqa/dataset.hpp"
#include "teachqa/error.hpp"
#include "teachqa/eval.hpp"
#include "teachqa/kb.hpp"
#include "teachqa/responder.hpp"
#include "teachqa/sample_bundle.hpp"
#include "teachqa/templates.hpp"
#include "teachqa/text.hpp"
#include "teachqa/workspace.hpp"
