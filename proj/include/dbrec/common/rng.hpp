// Copyright 2026 The DBRec Authors.
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dbrec {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Derives a seed from an ordered list of components, e.g. (seed, epoch) or
// (seed, user, item). Different tuples give statistically independent streams.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

Rng make_rng(std::initializer_list<std::uint64_t> parts);

}  // namespace dbrec
