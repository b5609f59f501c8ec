/*
 * Copyright 2026 The storedispatch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "storedispatch/core_model.hpp"

namespace testing {

inline storedispatch::Fleet example1_fleet() {
    using storedispatch::make_store;
    return storedispatch::Fleet({make_store("b1", 200, 500), make_store("b2", 200, 400), make_store("b3", 200, 400),
                                 make_store("b4", 200, 300), make_store("b5", 200, 200)});
}

inline storedispatch::DemandTrace example1_demand() {
    return storedispatch::DemandTrace(storedispatch::make_grid(0.5, 8), {400, 400, 400, 400, 1000, 1000, 200, 200});
}

inline storedispatch::DemandTrace trace(double step_h, std::vector<double> values) {
    const auto grid = storedispatch::make_grid(step_h, values.size());
    return storedispatch::DemandTrace(grid, std::move(values));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("storedispatch-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

private:
    std::filesystem::path path_;
};

}  // namespace testing
