// Copyright 2026 The text2art Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXT2ART_MODELS_HPP
#define TEXT2ART_MODELS_HPP

#include "text2art/models/projection.hpp"
#include "text2art/models/losses.hpp"
#include "text2art/models/cca.hpp"
#include "text2art/models/cml.hpp"
#include "text2art/models/training.hpp"
#include "text2art/models/checkpoint.hpp"

#endif  // TEXT2ART_MODELS_HPP
