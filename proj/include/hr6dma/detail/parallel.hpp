// SPDX-License-Identifier: Apache-2.0
//
// hr6dma: max-min beam coverage with hierarchically rotatable arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HR6DMA_DETAIL_PARALLEL_HPP
#define HR6DMA_DETAIL_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace hr6dma
{
    template <typename Result, typename Fn>
    std::vector<Result> parallel_map(std::size_t count, int threads, Fn &&fn)
    {
        std::vector<std::optional<Result>> slots(count);
        const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(resolve_threads(threads)));
        if (workers <= 1)
        {
            for (std::size_t k = 0; k < count; ++k)
                slots[k].emplace(fn(k));
        }
        else
        {
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (std::size_t t = 0; t < workers; ++t)
                pool.emplace_back([&] {
                    for (std::size_t k = next++; k < count; k = next++)
                    {
                        try
                        {
                            slots[k].emplace(fn(k));
                        }
                        catch (...)
                        {
                            std::lock_guard<std::mutex> lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                        }
                    }
                });
            for (auto &th : pool)
                th.join();
            if (failure)
                std::rethrow_exception(failure);
        }
        std::vector<Result> out;
        out.reserve(count);
        for (auto &s : slots)
            out.push_back(std::move(*s));
        return out;
    }
}

#endif
