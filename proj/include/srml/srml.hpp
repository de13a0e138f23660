#pragma once

#include "srml/arith.hpp"
#include "srml/csv.hpp"
#include "srml/error.hpp"
#include "srml/expr.hpp"
#include "srml/finding.hpp"
#include "srml/path.hpp"
#include "srml/relational.hpp"
#include "srml/rules.hpp"
#include "srml/schema.hpp"
#include "srml/validator.hpp"
#include "srml/xml.hpp"
