//
// Copyright 2026 The FairCert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include "faircert/concolic.hpp"
#include "faircert/dataset.hpp"
#include "faircert/driver.hpp"
#include "faircert/dual.hpp"
#include "faircert/explore.hpp"
#include "faircert/linear.hpp"
#include "faircert/model.hpp"
#include "faircert/model_io.hpp"
#include "faircert/rational.hpp"
#include "faircert/report.hpp"
#include "faircert/simplex.hpp"
#include "faircert/smtlib.hpp"
#include "faircert/sym_expr.hpp"
#include "faircert/tree_io.hpp"
#include "faircert/version.hpp"
