// Copyright 2026 The NeuroView Authors.
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

#ifndef NEUROVIEW_RANDOM_H_
#define NEUROVIEW_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace nv {

// Seeded generator with portable transforms. The engine's output sequence is
// fixed by the standard; the std:: distributions are not, so uniform/normal
// draws and shuffles are implemented here to keep runs bit-identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; caches the second draw.
  double normal();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  void shuffle(std::vector<std::size_t>& items);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nv

#endif  // NEUROVIEW_RANDOM_H_
