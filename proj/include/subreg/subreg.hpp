// Copyright 2026 The subreg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBREG_SUBREG_HPP_
#define SUBREG_SUBREG_HPP_

#include "subreg/bpe.hpp"
#include "subreg/error.hpp"
#include "subreg/lattice.hpp"
#include "subreg/log_math.hpp"
#include "subreg/model_io.hpp"
#include "subreg/normalizer.hpp"
#include "subreg/sampler.hpp"
#include "subreg/seed_vocab.hpp"
#include "subreg/suffix_array.hpp"
#include "subreg/unicode.hpp"
#include "subreg/unigram_model.hpp"
#include "subreg/unigram_trainer.hpp"
#include "subreg/vocabulary.hpp"

#endif  // SUBREG_SUBREG_HPP_
