#include "polyhybrid/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace polyhybrid
{

void parallel_for(int n, int threads, const std::function<void(int, int, int)>& body)
{
    const int workers = std::max(1, std::min(threads, n));
    if (workers == 1)
    {
        body(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w)
    {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try
            {
                body(w, begin, end);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace polyhybrid
