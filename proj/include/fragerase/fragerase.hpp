/*
   Copyright 2026 The fragerase Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "fragerase/counter_rng.hpp"
#include "fragerase/error.hpp"
#include "fragerase/fragmenter.hpp"
#include "fragerase/limits.hpp"
#include "fragerase/measure.hpp"
#include "fragerase/normal.hpp"
#include "fragerase/proportions.hpp"
#include "fragerase/rule_spec.hpp"
#include "fragerase/verify.hpp"
#include "fragerase/walk.hpp"
